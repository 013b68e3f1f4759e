"""HTML evaluation reports."""

from .render import render_report, write_report

__all__ = ["render_report", "write_report"]
