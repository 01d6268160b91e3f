"""Strategy-diagram toolkit: data -> insights -> framework -> SVG."""

__version__ = "0.1.0"
