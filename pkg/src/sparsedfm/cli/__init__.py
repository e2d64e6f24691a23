# src/sparsedfm/cli/__init__.py
# Re-exporting the `main` function here would shadow the `main` submodule
# (breaking `sparsedfm.cli.main.<name>` lookups); the entry point uses
# `sparsedfm.cli.main:main` directly.
from .main import cli

__all__ = ["cli"]
