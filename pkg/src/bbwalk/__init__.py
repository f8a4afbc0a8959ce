"""Commutativity testing for black-box groups via random walks on tuples."""

__version__ = "0.1.0"
