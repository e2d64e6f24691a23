# src/sparsedfm/config/options.py
import enum
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..errors import ModelError

__all__ = [
    "ALG_SPECS",
    "DEFAULT_ALPHAS",
    "THREADS_ENV_VAR",
    "Alg",
    "AlgSpec",
    "ErrorModel",
    "FitConfig",
    "KalmanEngine",
    "resolve_threads",
]

THREADS_ENV_VAR = "SPARSEDFM_THREADS"


class Alg(enum.Enum):
    PCA = "PCA"
    TWO_STAGE = "2Stage"
    EM = "EM"
    EM_SPARSE = "EM-sparse"


class ErrorModel(enum.Enum):
    IID = "IID"
    AR1 = "AR1"


class KalmanEngine(enum.Enum):
    UNIVARIATE = "univariate"
    MULTIVARIATE = "multivariate"


@dataclass(frozen=True)
class AlgSpec:
    name: str
    dynamic: bool
    iterative: bool
    sparse: bool
    description: str


ALG_SPECS: Dict[Alg, AlgSpec] = {
    Alg.PCA: AlgSpec(
        name="PCA",
        dynamic=False,
        iterative=False,
        sparse=False,
        description="Principal components on the filled, standardized panel",
    ),
    Alg.TWO_STAGE: AlgSpec(
        name="2Stage",
        dynamic=True,
        iterative=False,
        sparse=False,
        description="PCA and a VAR(1) fit, then one Kalman smoother pass",
    ),
    Alg.EM: AlgSpec(
        name="EM",
        dynamic=True,
        iterative=True,
        sparse=False,
        description="Quasi-maximum likelihood via EM with dense loadings",
    ),
    Alg.EM_SPARSE: AlgSpec(
        name="EM-sparse",
        dynamic=True,
        iterative=True,
        sparse=True,
        description="EM with an L1-penalised loadings step solved by ADMM",
    ),
}

DEFAULT_ALPHAS: Tuple[float, ...] = tuple(
    float(a) for a in 10.0 ** np.linspace(-2.0, 3.0, 100)
)


@dataclass(frozen=True)
class FitConfig:
    """Settings for a single call to ``sparse_dfm_fit``.

    ``r`` has no default: it must come from the caller or from
    ``tune_factors``.
    """

    r: Optional[int] = None
    q: int = 0
    alphas: Tuple[float, ...] = field(default=DEFAULT_ALPHAS)
    alg: Alg = Alg.EM_SPARSE
    err: ErrorModel = ErrorModel.IID
    engine: KalmanEngine = KalmanEngine.UNIVARIATE
    store_all_alphas: bool = False
    standardize: bool = True
    max_iter: int = 100
    threshold: float = 1e-4

    def __post_init__(self):
        # Accept plain strings and lists (JSON, CLI) alongside enums/tuples
        try:
            object.__setattr__(self, "alg", Alg(self.alg))
            object.__setattr__(self, "err", ErrorModel(self.err))
            object.__setattr__(self, "engine", KalmanEngine(self.engine))
        except ValueError as e:
            raise ModelError(str(e)) from e
        object.__setattr__(
            self, "alphas", tuple(float(a) for a in np.atleast_1d(self.alphas))
        )

        if self.r is not None and int(self.r) < 1:
            raise ModelError(f"r must be at least 1, got {self.r}")
        if self.q < 0:
            raise ModelError(f"q must be nonnegative, got {self.q}")
        if not self.alphas:
            raise ModelError("alphas must contain at least one value")
        if any(not np.isfinite(a) or a < 0 for a in self.alphas):
            raise ModelError("alphas must be finite and nonnegative")
        if self.max_iter < 1:
            raise ModelError(f"max_iter must be at least 1, got {self.max_iter}")
        if not self.threshold > 0:
            raise ModelError(f"threshold must be positive, got {self.threshold}")

    @property
    def spec(self) -> AlgSpec:
        return ALG_SPECS[self.alg]

    def replace(self, **changes: Any) -> "FitConfig":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary"""
        data = asdict(self)
        data["alg"] = self.alg.value
        data["err"] = self.err.value
        data["engine"] = self.engine.value
        data["alphas"] = list(self.alphas)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FitConfig":
        """Create from a dictionary, ignoring unknown keys"""
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


def resolve_threads(default: int = 1) -> int:
    """Worker cap from SPARSEDFM_THREADS (unset means ``default``)."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        threads = int(raw)
    except ValueError:
        raise ModelError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    if threads < 1:
        raise ModelError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return threads
