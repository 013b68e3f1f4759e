"""Application services built on the transform core."""
