"""Sentiment prediction for social-media mentions of research articles."""

__version__ = "0.1.0"
