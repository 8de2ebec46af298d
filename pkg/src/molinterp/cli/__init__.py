"""Command-line interface. Importing this package does not import numpy,
so ``--threads`` can take effect before any numeric library loads."""

from .main import build_parser, main

__all__ = ["build_parser", "main"]
