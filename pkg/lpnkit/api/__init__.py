"""
Command-line interface.
"""

from lpnkit.api.cli import build_parser, main

__all__ = ["build_parser", "main"]
