# src/sparsedfm/utils/__init__.py
