"""Allow running the command-line interface as ``python -m tenseg``."""

from .cli import run

run()
