"""Image-driven hypsometric tint design for terrain rendering."""

__version__ = "0.1.0"
