"""Fitting-error metrics and the objective functions optimizers minimize."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .failure_data import FailureDataset
from .models import DomainError, ModelKind, Params, shape

__all__ = ["Metric", "Objective", "euclidean_distance", "evaluate", "rmse"]


class Metric(enum.Enum):
    RMSE = "rmse"
    ED = "ed"

    @classmethod
    def parse(cls, name: str) -> "Metric":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise DomainError(f"unknown metric {name!r}; valid names: rmse, ed") from None


def _residuals(actual, predicted) -> np.ndarray:
    m = np.asarray(actual, dtype=float)
    mu = np.asarray(predicted, dtype=float)
    if m.ndim != 1 or mu.ndim != 1:
        raise DomainError("metrics take 1-D sequences")
    if len(m) != len(mu):
        raise DomainError(f"length mismatch: {len(m)} actual vs {len(mu)} predicted")
    if len(m) == 0:
        raise DomainError("metrics need at least one observation")
    return m - mu


def rmse(actual, predicted) -> float:
    """Root mean square error, ``sqrt(mean((m_i - mu_i)**2))``."""
    r = _residuals(actual, predicted)
    return math.hypot(*r.tolist()) / math.sqrt(len(r))


def euclidean_distance(actual, predicted) -> float:
    """``sqrt(sum((m_i - mu_i)**2))``; equals ``rmse * sqrt(N)``."""
    # hypot rescales internally, so tiny or huge residuals neither underflow nor overflow
    return math.hypot(*_residuals(actual, predicted).tolist())


_METRICS = {Metric.RMSE: rmse, Metric.ED: euclidean_distance}


@dataclass(frozen=True)
class Objective:
    """Fitting error of one model over a window of observations.

    Callable with a :class:`Params`; lower is better. Results that overflow
    to a non-finite value come back as ``inf`` so optimizers discard them.
    """

    kind: ModelKind
    window: FailureDataset
    metric: Metric = Metric.RMSE
    _t: np.ndarray = field(init=False, repr=False, compare=False)
    _m: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.window) == 0:
            raise DomainError("objective window is empty")
        object.__setattr__(self, "_t", self.window.t)
        object.__setattr__(self, "_m", self.window.m)

    def predict(self, p: Params) -> np.ndarray:
        return p.a * shape(self.kind, p.b, self._t)

    def __call__(self, p: Params) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            value = _METRICS[self.metric](self._m, self.predict(p))
        return value if math.isfinite(value) else math.inf

    def on(self, window: FailureDataset) -> "Objective":
        """Same model and metric over a different window (e.g. the test set)."""
        return Objective(self.kind, window, self.metric)


def evaluate(obj: Objective, p: Params) -> float:
    return obj(p)
