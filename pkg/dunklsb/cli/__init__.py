"""
Command-line interface for verification runs.
"""
from dunklsb.cli.cli import cli

__all__ = ["cli"]
