"""Command-line front end.

Commands: ``fit``, ``benchmark``, ``gendata``, ``oracle``, ``report``.
Exit status is 0 on success, 1 on a runtime failure and 2 on a usage or
validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .failure_data import DatasetError, SyntheticMode, generate_synthetic, read_csv_path, split_chronological, write_csv
from .fitness import Metric, Objective
from .harness import (
    DEFAULT_SEEDS,
    STATISTICS,
    ExperimentPlan,
    ReportFormat,
    emit_report,
    grid_oracle,
    read_report_csv,
    run_plan,
)
from .models import DomainError, ModelKind, Params, SearchSpace, default_bounds
from .optimizers import OptimizationError, config_from_dict, minimize

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
WORKERS_ENV = "SRGM_SWARM_WORKERS"

PLAN_KEYS = {"datasets", "models", "algorithms", "train_fraction", "metric", "seeds", "n_seeds", "space", "workers", "outputs"}
SPACE_KEYS = {"a_min", "a_max", "b_min", "b_max"}
OUTPUT_KEYS = {f.value for f in ReportFormat}
DATASET_KEYS = {"name", "path"}


class ConfigError(ValueError):
    """A benchmark configuration is malformed."""


@dataclass
class CliConfig:
    plan: ExperimentPlan
    outputs: dict[ReportFormat, Path] = field(default_factory=dict)
    workers: int | None = None


def _reject_unknown(data: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}; allowed: {', '.join(sorted(allowed))}")


def parse_space(data: dict | None) -> SearchSpace:
    if data is None:
        return default_bounds()
    if not isinstance(data, dict):
        raise ConfigError("'space' must be an object")
    _reject_unknown(data, SPACE_KEYS, "space")
    base = default_bounds()
    values = {k: float(data.get(k, getattr(base, k))) for k in SPACE_KEYS}
    return SearchSpace(**values)


def load_config(path, load_datasets: bool = True) -> CliConfig:
    """Read a benchmark JSON config.

    Dataset and output paths are resolved relative to the config file. With
    ``load_datasets=False`` datasets are left as unresolved specs, which is
    enough to inspect the grid shape without the data present.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    _reject_unknown(data, PLAN_KEYS, "config")
    base = path.parent

    for key in ("datasets", "models", "algorithms"):
        if key not in data:
            raise ConfigError(f"missing key {key!r}")
        if not isinstance(data[key], list) or not data[key]:
            raise ConfigError(f"{key!r} must be a non-empty list")

    specs = []
    for entry in data["datasets"]:
        if isinstance(entry, str):
            entry = {"path": entry}
        if not isinstance(entry, dict) or "path" not in entry:
            raise ConfigError("each dataset needs a 'path'")
        _reject_unknown(entry, DATASET_KEYS, "datasets entry")
        p = Path(entry["path"])
        p = p if p.is_absolute() else base / p
        specs.append((entry.get("name") or p.stem, p))

    try:
        models = [ModelKind.parse(str(m)) for m in data["models"]]
    except DomainError as exc:
        raise ConfigError(f"models: {exc}") from None
    algorithms = []
    for entry in data["algorithms"]:
        entry = {"name": entry} if isinstance(entry, str) else entry
        if not isinstance(entry, dict):
            raise ConfigError("each algorithm must be a name or an object with 'name'")
        try:
            algorithms.append(config_from_dict(entry))
        except (DomainError, TypeError) as exc:
            raise ConfigError(f"algorithms: {exc}") from None

    if "seeds" in data and "n_seeds" in data:
        raise ConfigError("give either 'seeds' or 'n_seeds', not both")
    if "seeds" in data:
        seeds = data["seeds"]
        if not isinstance(seeds, list) or not all(isinstance(s, int) and not isinstance(s, bool) for s in seeds):
            raise ConfigError("'seeds' must be a list of integers")
    elif "n_seeds" in data:
        n = data["n_seeds"]
        if not isinstance(n, int) or n < 1:
            raise ConfigError("'n_seeds' must be a positive integer")
        seeds = list(range(n))
    else:
        seeds = list(DEFAULT_SEEDS)

    try:
        metric = Metric.parse(str(data.get("metric", "rmse")))
        space = parse_space(data.get("space"))
        train_fraction = float(data.get("train_fraction", 0.7))
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    outputs = {}
    raw_out = data.get("outputs", {})
    if not isinstance(raw_out, dict):
        raise ConfigError("'outputs' must be an object mapping format to path")
    _reject_unknown(raw_out, OUTPUT_KEYS, "outputs")
    for fmt, p in raw_out.items():
        p = Path(p)
        outputs[ReportFormat(fmt)] = p if p.is_absolute() else Path(os.path.normpath(base / p))

    workers = data.get("workers")
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise ConfigError("'workers' must be a positive integer")

    if load_datasets:
        datasets = []
        for name, p in specs:
            if not p.exists():
                raise ConfigError(f"dataset {name!r}: file not found: {p}")
            try:
                datasets.append(read_csv_path(p, name=name))
            except DatasetError as exc:
                raise ConfigError(f"dataset {name!r}: {exc}") from None
    else:
        datasets = specs

    plan = ExperimentPlan(
        datasets=datasets,
        models=models,
        algorithms=algorithms,
        train_fraction=train_fraction,
        metric=metric,
        seeds=seeds,
        space=space,
    )
    if len(set(seeds)) != len(seeds):
        raise ConfigError("'seeds' must be distinct")
    if not 0 < train_fraction <= 1:
        raise ConfigError(f"'train_fraction' must lie in (0, 1], got {train_fraction}")
    return CliConfig(plan, outputs, workers)


def _default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _parse_times(spec: str) -> np.ndarray:
    """``start:stop[:step]`` (stop inclusive) or a comma-separated list."""
    try:
        if ":" in spec:
            parts = [float(x) for x in spec.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1.0
            if step <= 0:
                raise ValueError
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return start + step * np.arange(n)
        return np.array([float(x) for x in spec.split(",")])
    except ValueError:
        raise DomainError(f"cannot parse times {spec!r}; use start:stop[:step] or a comma list") from None


def _algorithm(name: str, overrides: list[str] | None):
    cfg = {"name": name}
    for item in overrides or ():
        if "=" not in item:
            raise DomainError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        try:
            cfg[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            raise DomainError(f"--set {key.strip()}: value {value!r} is not a number or JSON literal") from None
    return config_from_dict(cfg)


def _space_from_args(args) -> SearchSpace:
    base = default_bounds()
    return SearchSpace(
        a_min=base.a_min if args.a_min is None else args.a_min,
        a_max=base.a_max if args.a_max is None else args.a_max,
        b_min=base.b_min if args.b_min is None else args.b_min,
        b_max=base.b_max if args.b_max is None else args.b_max,
    )


def _add_space_flags(p):
    for name in ("a-min", "a-max", "b-min", "b-max"):
        p.add_argument(f"--{name}", type=float, default=None, help="search-space bound (default: 1e-5..2000 for a, 1e-5..1 for b)")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    dataset = read_csv_path(args.dataset)
    kind = ModelKind.parse(args.model)
    metric = Metric.parse(args.metric)
    cfg = _algorithm(args.algorithm, args.set)
    split = split_chronological(dataset, args.train_fraction)
    obj = Objective(kind, split.train, metric)
    result = minimize(obj, _space_from_args(args), cfg, args.seed)
    name = metric.value.upper()
    print(f"dataset:    {dataset.name} ({len(split.train)} train / {len(split.test)} test points)")
    print(f"model:      {kind.label}")
    print(f"algorithm:  {cfg.label} (seed {args.seed})")
    print(f"a:          {result.best_params.a:.10g}")
    print(f"b:          {result.best_params.b:.10g}")
    print(f"train {name}: {result.best_fitness:.10g}")
    if len(split.test):
        print(f"test {name}:  {obj.on(split.test)(result.best_params):.10g}")
    print(f"iter_of_best: {result.iter_of_best}")
    print(f"time_ms:    {result.wall_time:.3f}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    cfg = load_config(args.config)
    extra_format = ReportFormat.parse(args.format) if args.out else None
    workers = args.workers or cfg.workers or _default_workers()
    progress = (lambda msg: print(f"  {msg}", file=sys.stderr)) if args.verbose else None
    report = run_plan(cfg.plan, workers=workers, progress=progress)

    outputs = dict(cfg.outputs)
    if args.out:
        outputs[extra_format] = Path(args.out)
    for fmt, path in outputs.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            emit_report(report, fmt, fh, statistic=args.statistic)

    emit_report(report, ReportFormat.TEXT, sys.stdout, statistic=args.statistic)
    failed = sum(len(c.failures) for c in report.cells.values())
    total = sum(len(c.runs) for c in report.cells.values())
    print(f"\n{len(report.cells)} cells, {total} runs, {failed} failed")
    for path in outputs.values():
        print(f"wrote {path}")
    return EXIT_RUNTIME if failed == total else EXIT_OK


def cmd_gendata(args) -> int:
    kind = ModelKind.parse(args.model)
    mode = SyntheticMode(args.mode)
    times = _parse_times(args.times)
    ds = generate_synthetic(kind, Params(args.a, args.b), times, mode, seed=args.seed)
    out, close = _open_out(args.out)
    try:
        write_csv(ds, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.res_a < 2 or args.res_b < 2:
        raise DomainError(f"grid resolution must be >= 2 per axis, got {args.res_a} x {args.res_b}")
    dataset = read_csv_path(args.dataset)
    kind = ModelKind.parse(args.model)
    metric = Metric.parse(args.metric)
    split = split_chronological(dataset, args.train_fraction)
    obj = Objective(kind, split.train, metric)
    best, value = grid_oracle(obj, _space_from_args(args), args.res_a, args.res_b)
    print(f"grid:       {args.res_a} x {args.res_b}")
    print(f"a:          {best.a!r}")
    print(f"b:          {best.b!r}")
    print(f"{metric.value.upper()}:       {value!r}")
    return EXIT_OK


def cmd_report(args) -> int:
    with open(args.report, encoding="utf-8", newline="") as fh:
        report = read_report_csv(fh)
    out, close = _open_out(args.out)
    try:
        emit_report(report, ReportFormat.parse(args.format), out, statistic=args.statistic)
    finally:
        if close:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srgm-swarm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one model to one dataset")
    p.add_argument("dataset", help="CSV file with header time,failures")
    p.add_argument("--model", required=True, help="go, pow, dss or mo")
    p.add_argument("--algorithm", default="cs", help="cs, fa, pso or aco (default cs)")
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--metric", default="rmse", help="rmse or ed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override an optimizer setting, e.g. --set max_iter=200")
    _add_space_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("benchmark", help="run an experiment grid from a JSON config")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None, help=f"worker processes (default ${WORKERS_ENV} or CPU count; 1 = serial)")
    p.add_argument("--out", default=None, help="extra report file to write")
    p.add_argument("--format", default="csv", help="format for --out: text, csv or markdown")
    p.add_argument("--statistic", default="fit_median", choices=STATISTICS)
    p.add_argument("-v", "--verbose", action="store_true", help="log each run to stderr (serial mode)")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("gendata", help="write a synthetic failure dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--times", default="1:100", help="start:stop[:step] or comma list (default 1:100)")
    p.add_argument("--mode", default="deterministic", choices=[m.value for m in SyntheticMode])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_gendata)

    p = sub.add_parser("oracle", help="exhaustive grid minimum for one model and dataset")
    p.add_argument("dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--metric", default="rmse")
    p.add_argument("--train-fraction", type=float, default=1.0)
    p.add_argument("--res-a", type=int, default=2001)
    p.add_argument("--res-b", type=int, default=1001)
    _add_space_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="re-render a CSV report")
    p.add_argument("report", help="CSV written by benchmark")
    p.add_argument("--format", default="text")
    p.add_argument("--statistic", default="fit_median", choices=STATISTICS)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, DatasetError, ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OptimizationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
