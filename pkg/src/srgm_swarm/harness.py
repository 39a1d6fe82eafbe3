"""Experiment grids over datasets x models x algorithms x seeds.

A :class:`ExperimentPlan` names what to run; :func:`run_plan` fits every
combination once per seed and aggregates the runs into a
:class:`ComparisonReport`. :func:`grid_oracle` gives an exhaustive-search
reference point for judging optimizer quality, and :func:`emit_report`
renders reports as text, Markdown or CSV.
"""

from __future__ import annotations

import csv
import enum
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Callable, Sequence

import numpy as np

from .failure_data import FailureDataset, split_chronological
from .fitness import Metric, Objective
from .models import DomainError, ModelKind, Params, SearchSpace, default_bounds, shape
from .optimizers import OptimizerConfig, minimize

__all__ = [
    "CSV_HEADER",
    "STATISTICS",
    "CellSummary",
    "ComparisonReport",
    "ExperimentPlan",
    "ReportFormat",
    "RunRecord",
    "emit_report",
    "grid_oracle",
    "read_report_csv",
    "run_plan",
]

DEFAULT_SEEDS = tuple(range(11))
CSV_HEADER = ("dataset", "model", "algorithm", "statistic", "value")
STATISTICS = ("fit_median", "fit_min", "fit_mean", "test_median", "time_ms_median", "iters_median", "best_a", "best_b")
TIME_STATISTICS = frozenset({"time_ms_median"})


class ReportFormat(enum.Enum):
    TEXT = "text"
    CSV = "csv"
    MARKDOWN = "markdown"

    @classmethod
    def parse(cls, name: str) -> "ReportFormat":
        key = name.strip().lower()
        if key == "md":
            key = "markdown"
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown report format {name!r}; valid: text, csv, markdown") from None


@dataclass(frozen=True)
class ExperimentPlan:
    datasets: Sequence[FailureDataset]
    models: Sequence[ModelKind]
    algorithms: Sequence[OptimizerConfig]
    train_fraction: float = 0.7
    metric: Metric = Metric.RMSE
    seeds: Sequence[int] = DEFAULT_SEEDS
    space: SearchSpace = field(default_factory=default_bounds)

    def validate(self) -> None:
        for label in ("datasets", "models", "algorithms", "seeds"):
            if not getattr(self, label):
                raise DomainError(f"plan has no {label}")
        if len(set(self.seeds)) != len(self.seeds):
            raise DomainError("plan seeds must be distinct")
        if not 0 < self.train_fraction <= 1:
            raise DomainError(f"train_fraction must lie in (0, 1], got {self.train_fraction}")
        for names, what in (
            ([d.name for d in self.datasets], "dataset"),
            ([m.value for m in self.models], "model"),
            ([a.name for a in self.algorithms], "algorithm"),
        ):
            dup = {n for n in names if names.count(n) > 1}
            if dup:
                raise DomainError(f"duplicate {what} name(s) in plan: {', '.join(sorted(dup))}")
        for cfg in self.algorithms:
            cfg.validate()
        for d in self.datasets:
            d.validate()


@dataclass
class RunRecord:
    seed: int
    train_fitness: float = math.nan
    test_fitness: float | None = None
    wall_time_ms: float = math.nan
    iter_of_best: int = 0
    best_params: Params | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class CellSummary:
    """Aggregates for one (dataset, model, algorithm) cell.

    ``stats`` maps each name in :data:`STATISTICS` to a float (NaN when not
    applicable, e.g. ``test_median`` without a test window). ``runs`` is
    empty for reports read back from CSV.
    """

    dataset: str
    model: ModelKind
    algorithm: str
    stats: dict[str, float]
    runs: list[RunRecord] = field(default_factory=list)

    @property
    def failures(self) -> list[RunRecord]:
        return [r for r in self.runs if not r.ok]

    @property
    def best_params(self) -> Params | None:
        a, b = self.stats.get("best_a", math.nan), self.stats.get("best_b", math.nan)
        return Params(a, b) if math.isfinite(a) and math.isfinite(b) else None

    @classmethod
    def from_runs(cls, dataset: str, model: ModelKind, algorithm: str, runs: list[RunRecord]) -> "CellSummary":
        good = [r for r in runs if r.ok]
        stats = dict.fromkeys(STATISTICS, math.nan)
        if good:
            fits = [r.train_fitness for r in good]
            stats["fit_median"] = float(statistics.median(fits))
            stats["fit_min"] = float(min(fits))
            stats["fit_mean"] = float(math.fsum(fits) / len(fits))
            tests = [r.test_fitness for r in good if r.test_fitness is not None]
            if tests:
                stats["test_median"] = float(statistics.median(tests))
            stats["time_ms_median"] = float(statistics.median(r.wall_time_ms for r in good))
            stats["iters_median"] = float(statistics.median(r.iter_of_best for r in good))
            # first seed wins ties, keeping the choice independent of scheduling
            best = min(good, key=lambda r: r.train_fitness)
            stats["best_a"], stats["best_b"] = best.best_params.a, best.best_params.b
        return cls(dataset, model, algorithm, stats, list(runs))


@dataclass
class ComparisonReport:
    datasets: list[str] = field(default_factory=list)
    models: list[ModelKind] = field(default_factory=list)
    algorithms: list[str] = field(default_factory=list)
    cells: dict[tuple[str, ModelKind, str], CellSummary] = field(default_factory=dict)
    metric: Metric | None = None

    def cell(self, dataset: str, model: ModelKind, algorithm: str) -> CellSummary:
        return self.cells[(dataset, model, algorithm)]

    def add(self, cell: CellSummary) -> None:
        if cell.dataset not in self.datasets:
            self.datasets.append(cell.dataset)
        if cell.model not in self.models:
            self.models.append(cell.model)
        if cell.algorithm not in self.algorithms:
            self.algorithms.append(cell.algorithm)
        self.cells[(cell.dataset, cell.model, cell.algorithm)] = cell

    def rows(self, include_time: bool = True) -> list[tuple[str, str, str, str, float]]:
        """Flat ``(dataset, model, algorithm, statistic, value)`` rows in plan order."""
        out = []
        for d in self.datasets:
            for m in self.models:
                for a in self.algorithms:
                    c = self.cells.get((d, m, a))
                    if c is None:
                        continue
                    for s in STATISTICS:
                        if include_time or s not in TIME_STATISTICS:
                            out.append((d, m.value, a, s, c.stats[s]))
        return out


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def _run_one(dataset: FailureDataset, kind: ModelKind, cfg: OptimizerConfig, train_fraction: float,
             metric: Metric, space: SearchSpace, seed: int) -> RunRecord:
    try:
        split = split_chronological(dataset, train_fraction)
        obj = Objective(kind, split.train, metric)
        result = minimize(obj, space, cfg, seed)
        test = obj.on(split.test)(result.best_params) if len(split.test) else None
        return RunRecord(
            seed=seed,
            train_fitness=result.best_fitness,
            test_fitness=test,
            wall_time_ms=result.wall_time,
            iter_of_best=result.iter_of_best,
            best_params=result.best_params,
        )
    except Exception as exc:  # recorded per run; the cell keeps going
        return RunRecord(seed=seed, error=f"{type(exc).__name__}: {exc}")


def run_plan(plan: ExperimentPlan, workers: int = 1, progress: Callable[[str], None] | None = None) -> ComparisonReport:
    """Fit every (dataset, model, algorithm) cell once per seed.

    Runs are independent; with ``workers > 1`` they are spread over a process
    pool and reassembled in plan order, so the report does not depend on
    scheduling. Invalid datasets abort before any run starts.
    """
    plan.validate()
    tasks = [
        (d, m, cfg, seed)
        for d in plan.datasets
        for m in plan.models
        for cfg in plan.algorithms
        for seed in plan.seeds
    ]
    args = [(d, m, cfg, plan.train_fraction, plan.metric, plan.space, seed) for d, m, cfg, seed in tasks]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, *zip(*args), chunksize=max(1, len(args) // (4 * workers))))
    else:
        records = []
        for a in args:
            records.append(_run_one(*a))
            if progress is not None:
                progress(f"{a[0].name} {a[1].value} {a[2].name} seed={a[6]}")

    report = ComparisonReport(metric=plan.metric)
    n = len(plan.seeds)
    for k in range(0, len(records), n):
        d, m, cfg, _ = tasks[k]
        report.add(CellSummary.from_runs(d.name, m, cfg.name, records[k : k + n]))
    return report


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def _objective_grid(obj: Objective, a_values: np.ndarray, b_values: np.ndarray, chunk: int = 16) -> np.ndarray:
    t, m = obj.window.t, obj.window.m
    unit = shape(obj.kind, b_values[:, None], t[None, :])
    n = len(t)
    out = np.empty((len(a_values), len(b_values)))
    with np.errstate(over="ignore", invalid="ignore"):
        for start in range(0, len(a_values), chunk):
            a = a_values[start : start + chunk, None, None]
            r = m[None, None, :] - a * unit[None, :, :]
            sse = np.einsum("ijk,ijk->ij", r, r)
            out[start : start + chunk] = np.sqrt(sse / n if obj.metric is Metric.RMSE else sse)
    out[~np.isfinite(out)] = np.inf
    return out


def grid_oracle(obj, space: SearchSpace, resolution_a: int = 2001, resolution_b: int = 1001) -> tuple[Params, float]:
    """Exhaustive minimum over a regular grid that includes both box edges.

    ``obj`` may be an :class:`Objective` (evaluated a block at a time) or any
    callable on :class:`Params`. Ties go to the first point in row-major
    order, ``a`` outer and ``b`` inner. The returned fitness is re-evaluated
    through ``obj`` at the chosen node.
    """
    for name, res in (("resolution_a", resolution_a), ("resolution_b", resolution_b)):
        if int(res) != res or res < 2:
            raise DomainError(f"{name} must be an integer >= 2, got {res}")
    a_values = np.linspace(space.a_min, space.a_max, int(resolution_a))
    b_values = np.linspace(space.b_min, space.b_max, int(resolution_b))
    if isinstance(obj, Objective):
        values = _objective_grid(obj, a_values, b_values)
    else:
        values = np.array([[obj(Params(float(a), float(b))) for b in b_values] for a in a_values], dtype=float)
        values[np.isnan(values)] = np.inf
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    best = Params(float(a_values[i]), float(b_values[j]))
    return best, float(obj(best))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _fmt_value(x: float) -> str:
    if math.isnan(x):
        return "-"
    return f"{x:.4f}" if abs(x) < 1e6 else f"{x:.4e}"


def _table(report: ComparisonReport, dataset: str, statistic: str) -> list[list[str]]:
    header = ["model"] + [a.upper() for a in report.algorithms]
    rows = [header]
    for m in report.models:
        row = [m.label]
        for a in report.algorithms:
            c = report.cells.get((dataset, m, a))
            row.append(_fmt_value(c.stats[statistic]) if c else "")
        rows.append(row)
    return rows


def _title(report: ComparisonReport, statistic: str) -> str:
    metric = f", metric {report.metric.value.upper()}" if report.metric else ""
    return f"Comparison report ({statistic}{metric})"


def emit_report(report: ComparisonReport, fmt: ReportFormat, dest: IO[str], statistic: str = "fit_median") -> None:
    """Write ``report`` to ``dest``.

    TEXT and MARKDOWN print one table per dataset, models down and algorithms
    across, showing ``statistic``. CSV writes every statistic of every cell as
    ``dataset,model,algorithm,statistic,value`` with round-trip precision.
    """
    if statistic not in STATISTICS:
        raise DomainError(f"unknown statistic {statistic!r}; valid: {', '.join(STATISTICS)}")
    if fmt is ReportFormat.CSV:
        writer = csv.writer(dest, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for d, m, a, s, v in report.rows():
            writer.writerow((d, m, a, s, repr(float(v))))
        return

    if fmt is ReportFormat.TEXT:
        dest.write(_title(report, statistic) + "\n")
        for d in report.datasets:
            rows = _table(report, d, statistic)
            widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
            dest.write(f"\nDataset: {d}\n")
            for n, r in enumerate(rows):
                dest.write("  ".join(cell.ljust(w) if k == 0 else cell.rjust(w) for k, (cell, w) in enumerate(zip(r, widths))).rstrip() + "\n")
                if n == 0:
                    dest.write("  ".join("-" * w for w in widths) + "\n")
        return

    if fmt is ReportFormat.MARKDOWN:
        dest.write(f"# {_title(report, statistic)}\n")
        for d in report.datasets:
            rows = _table(report, d, statistic)
            dest.write(f"\n## {d}\n\n")
            dest.write("| " + " | ".join(rows[0]) + " |\n")
            dest.write("|" + "|".join(["---"] + ["---:"] * (len(rows[0]) - 1)) + "|\n")
            for r in rows[1:]:
                dest.write("| " + " | ".join(r) + " |\n")
        return
    raise DomainError(f"unsupported format {fmt!r}")


def read_report_csv(source: IO[str]) -> ComparisonReport:
    """Rebuild a report (statistics only) from :func:`emit_report` CSV output."""
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise DomainError(f"expected CSV header {','.join(CSV_HEADER)!r}, got {header!r}")
    report = ComparisonReport()
    pending: dict[tuple[str, ModelKind, str], dict[str, float]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise DomainError(f"line {lineno}: expected 5 columns, got {len(row)}")
        d, m, a, s, v = row
        if s not in STATISTICS:
            raise DomainError(f"line {lineno}: unknown statistic {s!r}")
        try:
            value = float(v)
        except ValueError:
            raise DomainError(f"line {lineno}: non-numeric value {v!r}") from None
        key = (d, ModelKind.parse(m), a)
        if key not in pending:
            pending[key] = dict.fromkeys(STATISTICS, math.nan)
        pending[key][s] = value
    for (d, m, a), stats in pending.items():
        report.add(CellSummary(d, m, a, stats))
    return report
