# src/sparsedfm/nowcast/__init__.py
from .harness import HarnessConfig, HarnessReport, mae_quantiles, run_harness

__all__ = ["HarnessConfig", "HarnessReport", "mae_quantiles", "run_harness"]
