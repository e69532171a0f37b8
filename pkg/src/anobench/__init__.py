"""Desk-scale anomaly-detection benchmarking toolkit."""

__version__ = "0.1.0"
