"""Exact dual-polynomial and approximating-polynomial toolkit for k-distinctness."""

__version__ = "0.1.0"
