# src/sparsedfm/statespace/__init__.py
from .params import *
from .simulate import *
