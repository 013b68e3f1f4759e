"""Command-line front end."""

from .commands import main
from .parser import build_parser

__all__ = ["main", "build_parser"]
