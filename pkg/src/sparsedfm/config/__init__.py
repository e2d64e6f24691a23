# src/sparsedfm/config/__init__.py
from .manager import *
from .options import *
