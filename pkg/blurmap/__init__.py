"""blurmap - spatially-varying blur detection maps from a single image."""

__version__ = "2.0.0"
