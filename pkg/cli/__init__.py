"""Command-line interface: ``python -m cli.app <verb>``."""
