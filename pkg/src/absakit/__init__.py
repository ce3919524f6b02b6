"""Prefix-enhanced instruction prompting and evaluation toolkit for ABSA."""

__version__ = "0.1.0"
