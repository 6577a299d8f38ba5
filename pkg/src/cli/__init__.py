"""Command-line surface: expression grammar, subcommands and output rendering."""

from src.cli.main import create_parser, main

__all__ = ["create_parser", "main"]
