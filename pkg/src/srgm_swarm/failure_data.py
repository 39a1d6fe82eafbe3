"""Cumulative failure datasets: CSV ingest, chronological splits, synthetic data."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .models import DomainError, ModelKind, Params, mean_value

__all__ = [
    "DataSplit",
    "DatasetError",
    "FailureDataset",
    "SyntheticMode",
    "generate_synthetic",
    "load_csv",
    "read_csv_path",
    "split_chronological",
    "write_csv",
]

HEADER = ("time", "failures")
MIN_POINTS = 3


class DatasetError(ValueError):
    """Raised when failure data cannot be parsed or violates an invariant."""


class SyntheticMode(enum.Enum):
    DETERMINISTIC = "deterministic"
    POISSON = "poisson"


@dataclass(frozen=True)
class FailureDataset:
    """Ordered ``(time, cumulative failures)`` observations.

    Validated on construction unless ``validate=False`` is passed to
    :meth:`from_points`; the only unvalidated instances are empty test
    windows produced by :func:`split_chronological`.
    """

    name: str
    times: tuple[float, ...]
    failures: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.failures):
            raise DatasetError(f"{self.name}: {len(self.times)} times but {len(self.failures)} counts")

    @classmethod
    def from_points(cls, name: str, points: Iterable[tuple[float, float]], validate: bool = True):
        pts = [(float(t), float(m)) for t, m in points]
        ds = cls(name, tuple(t for t, _ in pts), tuple(m for _, m in pts))
        if validate:
            ds.validate()
        return ds

    def validate(self) -> None:
        if len(self) < MIN_POINTS:
            raise DatasetError(f"{self.name}: need at least {MIN_POINTS} points, got {len(self)}")
        prev_t, prev_m = None, None
        for i, (t, m) in enumerate(self.points):
            if not (math.isfinite(t) and math.isfinite(m)):
                raise DatasetError(f"{self.name}: point {i} is not finite")
            if t <= 0:
                raise DatasetError(f"{self.name}: point {i} has non-positive time {t}")
            if m < 0:
                raise DatasetError(f"{self.name}: point {i} has negative count {m}")
            if prev_t is not None and t <= prev_t:
                raise DatasetError(f"{self.name}: time not strictly increasing at point {i} ({prev_t} -> {t})")
            if prev_m is not None and m < prev_m:
                raise DatasetError(f"{self.name}: cumulative count decreases at point {i} ({prev_m} -> {m})")
            prev_t, prev_m = t, m

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.times, self.failures))

    @property
    def t(self) -> np.ndarray:
        return np.array(self.times, dtype=float)

    @property
    def m(self) -> np.ndarray:
        return np.array(self.failures, dtype=float)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class DataSplit:
    train: FailureDataset
    test: FailureDataset


def load_csv(source: IO, name: str = "dataset") -> FailureDataset:
    """Parse a ``time,failures`` CSV from a text or byte stream.

    Errors name the offending line number (the header is line 1).
    """
    raw = source.read()
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise DatasetError(f"{name}: not valid UTF-8 ({exc})") from None
    elif raw.startswith("﻿"):
        raw = raw[1:]

    rows = list(csv.reader(io.StringIO(raw, newline="")))
    if not rows or [c.strip().lower() for c in rows[0]] != list(HEADER):
        got = ",".join(rows[0]) if rows else "<empty>"
        raise DatasetError(f"{name}: line 1: expected header 'time,failures', got {got!r}")

    points = []
    prev_t, prev_m = None, None
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise DatasetError(f"{name}: line {lineno}: expected 2 columns, got {len(row)}")
        try:
            t, m = float(row[0]), float(row[1])
        except ValueError:
            raise DatasetError(f"{name}: line {lineno}: non-numeric cell in {','.join(row)!r}") from None
        if not (math.isfinite(t) and math.isfinite(m)):
            raise DatasetError(f"{name}: line {lineno}: non-finite value")
        if t <= 0:
            raise DatasetError(f"{name}: line {lineno}: time must be > 0, got {t}")
        if m < 0:
            raise DatasetError(f"{name}: line {lineno}: negative failure count {m}")
        if prev_t is not None and t <= prev_t:
            raise DatasetError(f"{name}: line {lineno}: time {t} does not increase (previous {prev_t})")
        if prev_m is not None and m < prev_m:
            raise DatasetError(f"{name}: line {lineno}: cumulative count {m} decreases (previous {prev_m})")
        points.append((t, m))
        prev_t, prev_m = t, m

    if len(points) < MIN_POINTS:
        raise DatasetError(f"{name}: need at least {MIN_POINTS} data rows, got {len(points)}")
    return FailureDataset.from_points(name, points)


def read_csv_path(path, name: str | None = None) -> FailureDataset:
    from pathlib import Path

    path = Path(path)
    with open(path, "rb") as fh:
        return load_csv(fh, name=name or path.stem)


def _fmt(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return format(x, ".17g")


def write_csv(dataset: FailureDataset, dest: IO[str]) -> None:
    """Write ``dataset`` with enough digits for a lossless reload."""
    dest.write(",".join(HEADER) + "\n")
    for t, m in dataset.points:
        dest.write(f"{_fmt(t)},{_fmt(m)}\n")


def split_chronological(d: FailureDataset, train_fraction: float) -> DataSplit:
    """First ``round(f * n)`` points train, the rest test (half rounds up)."""
    if not (0 < train_fraction <= 1) or math.isnan(train_fraction):
        raise DomainError(f"train_fraction must lie in (0, 1], got {train_fraction}")
    n = len(d)
    n_train = min(n, max(1, math.floor(train_fraction * n + 0.5)))
    pts = d.points
    train = FailureDataset.from_points(f"{d.name}[train]", pts[:n_train], validate=False)
    test = FailureDataset.from_points(f"{d.name}[test]", pts[n_train:], validate=False)
    return DataSplit(train, test)


def generate_synthetic(
    kind: ModelKind,
    p: Params,
    times: Sequence[float],
    mode: SyntheticMode = SyntheticMode.DETERMINISTIC,
    seed: int = 0,
    name: str | None = None,
) -> FailureDataset:
    """Failure data following a model's mean-value curve.

    DETERMINISTIC records ``mu(t_i)`` exactly. POISSON draws independent
    Poisson increments with means ``mu(t_i) - mu(t_{i-1})`` (the NHPP
    increment law) and accumulates them, so counts are integers and never
    decrease.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or len(t) < MIN_POINTS:
        raise DomainError(f"need a 1-D sequence of at least {MIN_POINTS} times")
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise DomainError("times must be finite and > 0")
    if np.any(np.diff(t) <= 0):
        raise DomainError("times must be strictly increasing")

    mu = np.asarray(mean_value(kind, p, t), dtype=float)
    if mode is SyntheticMode.DETERMINISTIC:
        counts = mu
    elif mode is SyntheticMode.POISSON:
        rng = np.random.default_rng(seed)
        increments = np.diff(mu, prepend=0.0)
        counts = np.cumsum(rng.poisson(np.maximum(increments, 0.0))).astype(float)
    else:
        raise DomainError(f"unknown synthetic mode {mode!r}")
    label = name or f"synthetic-{kind.value}-{mode.value}"
    return FailureDataset.from_points(label, zip(t.tolist(), counts.tolist()))
