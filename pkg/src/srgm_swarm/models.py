"""Mean-value and failure-intensity curves for four NHPP reliability growth models.

Every model is linear in the scale parameter ``a``::

    G-O   mu(t) = a (1 - exp(-b t))          lambda(t) = a b exp(-b t)
    POW   mu(t) = a t**b                      lambda(t) = a b t**(b - 1)
    DSS   mu(t) = a (1 - (1 + b t) exp(-b t)) lambda(t) = a b**2 t exp(-b t)
    M-O   mu(t) = a ln(1 + b t)               lambda(t) = a b / (1 + b t)

Time units are whatever the dataset uses; nothing here normalizes them.

The power-model intensity is the derivative of ``a t**b``. The frequently
reprinted ``a b t e**(b - 1)`` is not the derivative of that curve and is
treated as a misprint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "ModelKind",
    "Params",
    "SearchSpace",
    "default_bounds",
    "failure_intensity",
    "mean_value",
    "shape",
]

# beyond this exponent exp(-x) is flushed to zero instead of underflowing
_EXP_CUTOFF = 700.0


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class ModelKind(enum.Enum):
    GO_EXPONENTIAL = "go"
    POWER = "pow"
    DELAYED_S_SHAPED = "dss"
    MUSA_OKUMOTO = "mo"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name: str) -> "ModelKind":
        """Resolve a model from its enum name, short code or table label.

        Matching is case-insensitive. Raises ``DomainError`` listing the
        valid names if nothing matches.
        """
        key = name.strip().lower().replace("-", "_")
        for kind in cls:
            aliases = {kind.value, kind.name.lower(), kind.label.lower().replace("-", "_")}
            aliases.update(_EXTRA_ALIASES.get(kind, ()))
            if key in aliases:
                return kind
        valid = ", ".join(k.value for k in cls)
        raise DomainError(f"unknown model {name!r}; valid names: {valid}")


_LABELS = {
    ModelKind.GO_EXPONENTIAL: "EXP(G-O)",
    ModelKind.POWER: "POW",
    ModelKind.DELAYED_S_SHAPED: "DSS",
    ModelKind.MUSA_OKUMOTO: "M-O",
}

_EXTRA_ALIASES = {
    ModelKind.GO_EXPONENTIAL: ("exp", "g_o", "goel_okumoto", "exponential"),
    ModelKind.POWER: ("power",),
    ModelKind.DELAYED_S_SHAPED: ("delayed_s_shaped", "s_shaped", "yamada"),
    ModelKind.MUSA_OKUMOTO: ("m_o", "musa_okumoto", "logarithmic"),
}


@dataclass(frozen=True)
class Params:
    """Model parameters: ``a`` is the failure scale, ``b`` the shape/rate."""

    a: float
    b: float

    def __post_init__(self):
        # comparisons are False for NaN, so this also rejects non-finite values
        if not (0 < self.a < math.inf and 0 < self.b < math.inf):
            raise DomainError(f"parameters must be finite and > 0, got a={self.a!r}, b={self.b!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=float)


@dataclass(frozen=True)
class SearchSpace:
    a_min: float
    a_max: float
    b_min: float
    b_max: float

    def __post_init__(self):
        for name in ("a_min", "a_max", "b_min", "b_max"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        if not self.a_min < self.a_max:
            raise DomainError(f"a_min must be < a_max, got [{self.a_min}, {self.a_max}]")
        if not self.b_min < self.b_max:
            raise DomainError(f"b_min must be < b_max, got [{self.b_min}, {self.b_max}]")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.a_min, self.b_min])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.a_max, self.b_max])

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        """Clamp points (shape ``(..., 2)``) onto the box."""
        return np.clip(x, self.lower, self.upper)

    def contains(self, p: Params) -> bool:
        return self.a_min <= p.a <= self.a_max and self.b_min <= p.b <= self.b_max

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` points uniformly from the box."""
        return self.lower + rng.random((n, 2)) * self.width


def default_bounds() -> SearchSpace:
    """a in [1e-5, 2000], b in [1e-5, 1]; shared by every optimizer."""
    return SearchSpace(a_min=1e-5, a_max=2000.0, b_min=1e-5, b_max=1.0)


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("time must be finite")
    if np.any(t < 0):
        raise DomainError("time must be >= 0")
    return t


def _exp_neg(x: np.ndarray) -> np.ndarray:
    return np.where(x > _EXP_CUTOFF, 0.0, np.exp(-np.minimum(x, _EXP_CUTOFF)))


def shape(kind: ModelKind, b, t) -> np.ndarray:
    """Unit-scale mean value ``mu(t) / a``.

    No validation; ``b`` and ``t`` broadcast against each other. Used by the
    grid oracle to evaluate whole parameter rows at once.
    """
    bt = np.multiply(b, t)
    if kind is ModelKind.GO_EXPONENTIAL:
        return -np.expm1(-bt)
    if kind is ModelKind.POWER:
        return np.power(t, b)
    if kind is ModelKind.DELAYED_S_SHAPED:
        # regularized lower incomplete gamma P(2, x) = 1 - (1 + x) e^-x, stable near 0
        return special.gammainc(2.0, bt)
    if kind is ModelKind.MUSA_OKUMOTO:
        return np.log1p(bt)
    raise DomainError(f"unsupported model kind {kind!r}")


def _unwrap(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def mean_value(kind: ModelKind, p: Params, t):
    """Expected cumulative failures by time ``t`` (scalar or array)."""
    t = _check_time(t)
    return _unwrap(p.a * shape(kind, p.b, t))


def failure_intensity(kind: ModelKind, p: Params, t):
    """Failure rate ``d mu / dt`` at time ``t`` (scalar or array)."""
    t = _check_time(t)
    a, b = p.a, p.b
    bt = b * t
    if kind is ModelKind.GO_EXPONENTIAL:
        out = a * b * _exp_neg(bt)
    elif kind is ModelKind.POWER:
        if b < 1 and np.any(t == 0):
            raise DomainError("power-model intensity diverges at t = 0 when b < 1")
        with np.errstate(divide="ignore"):
            out = a * b * np.power(t, b - 1.0)
    elif kind is ModelKind.DELAYED_S_SHAPED:
        out = a * b * b * t * _exp_neg(bt)
    elif kind is ModelKind.MUSA_OKUMOTO:
        out = a * b / (1.0 + bt)
    else:
        raise DomainError(f"unsupported model kind {kind!r}")
    return _unwrap(np.asarray(out, dtype=float))
