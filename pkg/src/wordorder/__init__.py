"""Continuous-valued word-order typology from dependency treebanks."""

__version__ = "0.1.0"
