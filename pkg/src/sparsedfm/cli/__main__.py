#!/usr/bin/env python3
"""
Entry point for running sparsedfm.cli as a module.

This allows commands like:
    python -m sparsedfm.cli fit --input panel.csv --r 2
    python -m sparsedfm.cli tune-factors --input panel.csv --plot
"""

from .main import main

if __name__ == "__main__":
    main()
