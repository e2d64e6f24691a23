# src/sparsedfm/kalman/registry.py
"""Registry for looking up filter/smoother engines by name."""

import inspect
import logging
from types import ModuleType
from typing import Dict, List, Optional, Union

from ..config.options import KalmanEngine
from ..errors import ModelError
from . import multivariate, univariate
from .base import FunctionSmoother, KalmanSmoother, KfsInput, KfsOutput

logger = logging.getLogger(__name__)


class EngineRegistry:
    """Registry for managing Kalman engines."""

    def __init__(self):
        self._engines: Dict[str, KalmanSmoother] = {}

    def register_engine(self, engine: KalmanSmoother) -> None:
        """Register an engine."""
        if engine.name in self._engines:
            raise ValueError(f"Engine '{engine.name}' is already registered")
        self._engines[engine.name] = engine

    def register_function(self, func) -> None:
        """Register a function decorated with @kalman_engine."""
        if not hasattr(func, "_is_engine"):
            raise ValueError(
                f"Function {func.__name__} is not decorated with @kalman_engine"
            )
        self.register_engine(
            FunctionSmoother(
                func, name=func._engine_name, description=func._engine_description
            )
        )

    def discover_engines_in_module(self, module: ModuleType) -> List[str]:
        """Register every decorated function in ``module``."""
        discovered = []
        for _, obj in inspect.getmembers(module, inspect.isfunction):
            if getattr(obj, "_is_engine", False) and obj._engine_name not in self:
                self.register_function(obj)
                discovered.append(obj._engine_name)
        return discovered

    def get_engine(self, name: Union[str, KalmanEngine]) -> KalmanSmoother:
        """Get an engine by name.

        Raises:
            ModelError: No engine registered under that name
        """
        key = name.value if isinstance(name, KalmanEngine) else str(name)
        engine = self._engines.get(key)
        if engine is None:
            raise ModelError(
                f"Unknown Kalman engine '{key}'; "
                f"available: {', '.join(self.list_engines())}"
            )
        return engine

    def list_engines(self) -> List[str]:
        """List all registered engine names."""
        return sorted(self._engines)

    def __contains__(self, name: str) -> bool:
        return name in self._engines


# Global registry instance
_registry = EngineRegistry()
_registry.discover_engines_in_module(multivariate)
_registry.discover_engines_in_module(univariate)


def get_registry() -> EngineRegistry:
    """Get the global engine registry."""
    return _registry


def run_kfs(
    inp: KfsInput, engine: Optional[Union[str, KalmanEngine]] = None
) -> KfsOutput:
    """Filter and smooth ``inp`` with the named engine (default univariate)."""
    return _registry.get_engine(engine or KalmanEngine.UNIVARIATE).run(inp)
