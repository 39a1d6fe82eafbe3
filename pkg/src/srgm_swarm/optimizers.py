"""Bound-constrained swarm minimizers over the (a, b) parameter plane.

Four algorithms share one entry point, :func:`minimize`:

* Cuckoo Search (Levy-flight cuckoos, abandonment of the worst nests)
* Firefly Algorithm (pairwise attraction, exp(-gamma r^2) decay)
* Particle Swarm Optimization (global-best, inertia weight)
* ACO for continuous domains (solution archive, Gaussian kernels)

Each algorithm exposes a single-generation ``*_step`` function so its update
rule can be exercised in isolation. All randomness flows from one
``numpy.random.Generator`` (PCG64) seeded per run, so a (config, seed,
objective) triple replays bit-for-bit.

Candidates are always clamped to the search box. The trace records the
best-so-far fitness after each generation; ``iter_of_best`` is the 1-based
generation at which that value was first reached.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, fields, replace
from typing import Callable, ClassVar, Union

import numpy as np
from scipy.special import gamma as gamma_fn

from .models import DomainError, Params, SearchSpace

__all__ = [
    "ACOConfig",
    "CuckooConfig",
    "FireflyConfig",
    "OptimizationError",
    "OptimizerConfig",
    "PSOConfig",
    "Population",
    "RunResult",
    "Swarm",
    "aco_step",
    "config_from_dict",
    "config_to_dict",
    "cs_step",
    "default_config",
    "fa_step",
    "levy_step",
    "mantegna_levy",
    "minimize",
    "pso_step",
]

ObjectiveFn = Callable[[Params], float]


class OptimizationError(RuntimeError):
    """The optimizer could not produce a usable result."""


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CuckooConfig:
    n_nests: int = 10
    discovery_rate: float = 0.25
    alpha: float = 0.01
    max_iter: int = 100
    # cuckoos laid per generation
    n_cuckoos: int = 1
    # components per solution; the (a, b) pair
    n_eggs: int = 2
    levy_beta: float = 1.5

    name: ClassVar[str] = "cs"
    label: ClassVar[str] = "CS"

    def validate(self):
        _check_counts(self, "n_nests", "max_iter", "n_cuckoos")
        _check_unit(self, "discovery_rate")
        if self.n_eggs != 2:
            raise DomainError(f"n_eggs is the solution dimensionality and must be 2, got {self.n_eggs}")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not 0 < self.levy_beta <= 2:
            raise DomainError(f"levy_beta must lie in (0, 2], got {self.levy_beta}")


@dataclass(frozen=True)
class FireflyConfig:
    n_fireflies: int = 25
    dimensions: int = 2
    max_iter: int = 100
    alpha: float = 0.01
    beta0: float = 1.0
    gamma: float = 1.0
    # alpha shrinks geometrically to alpha * alpha_final_ratio over max_iter;
    # 1.0 keeps it fixed
    alpha_final_ratio: float = 1e-4
    # measure distances and random steps in box-normalized units
    normalize: bool = True

    name: ClassVar[str] = "fa"
    label: ClassVar[str] = "FA"

    def validate(self):
        _check_counts(self, "n_fireflies", "max_iter")
        _check_unit(self, "alpha")
        if self.dimensions != 2:
            raise DomainError(f"dimensions must be 2 for (a, b), got {self.dimensions}")
        if self.beta0 < 0 or self.gamma < 0:
            raise DomainError("beta0 and gamma must be >= 0")
        if not 0 < self.alpha_final_ratio <= 1:
            raise DomainError(f"alpha_final_ratio must lie in (0, 1], got {self.alpha_final_ratio}")


@dataclass(frozen=True)
class PSOConfig:
    swarm_size: int = 20
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    max_iter: int = 100
    # per-coordinate velocity cap as a fraction of the box width
    max_velocity: float = 0.2

    name: ClassVar[str] = "pso"
    label: ClassVar[str] = "PSO"

    def validate(self):
        _check_counts(self, "swarm_size", "max_iter")
        _check_unit(self, "inertia")
        if self.cognitive < 0 or self.social < 0:
            raise DomainError("cognitive and social coefficients must be >= 0")
        if not 0 < self.max_velocity <= 1:
            raise DomainError(f"max_velocity must lie in (0, 1], got {self.max_velocity}")


@dataclass(frozen=True)
class ACOConfig:
    archive_size: int = 10
    locality: float = 0.1
    deviation_ratio: float = 0.85
    n_ants: int = 10
    max_iter: int = 100

    name: ClassVar[str] = "aco"
    label: ClassVar[str] = "ACO"

    def validate(self):
        _check_counts(self, "archive_size", "n_ants", "max_iter")
        _check_unit(self, "locality")
        _check_unit(self, "deviation_ratio")


OptimizerConfig = Union[CuckooConfig, FireflyConfig, PSOConfig, ACOConfig]

_CONFIGS = {cls.name: cls for cls in (CuckooConfig, FireflyConfig, PSOConfig, ACOConfig)}


def _check_counts(cfg, *names):
    for name in names:
        value = getattr(cfg, name)
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
            raise DomainError(f"{cfg.name}.{name} must be an integer >= 1, got {value!r}")


def _check_unit(cfg, name):
    value = getattr(cfg, name)
    if not 0 <= value <= 1:
        raise DomainError(f"{cfg.name}.{name} must lie in [0, 1], got {value!r}")


def default_config(name: str) -> OptimizerConfig:
    """Published defaults for ``cs``/``fa``; canonical values for ``pso``/``aco``."""
    key = name.strip().lower()
    if key not in _CONFIGS:
        raise DomainError(f"unknown algorithm {name!r}; valid names: {', '.join(_CONFIGS)}")
    return _CONFIGS[key]()


def config_from_dict(data: dict) -> OptimizerConfig:
    """Build a config from ``{"name": "cs", <overrides>...}``; unknown keys raise."""
    data = dict(data)
    if "name" not in data:
        raise DomainError("algorithm entry needs a 'name'")
    base = default_config(str(data.pop("name")))
    allowed = {f.name for f in fields(base)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise DomainError(f"unknown key {unknown[0]!r} for algorithm {base.name}; allowed: {', '.join(sorted(allowed))}")
    cfg = replace(base, **data)
    cfg.validate()
    return cfg


def config_to_dict(cfg: OptimizerConfig) -> dict:
    out = {"name": cfg.name}
    out.update({f.name: getattr(cfg, f.name) for f in fields(cfg)})
    return out


# ---------------------------------------------------------------------------
# shared machinery
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    best_params: Params
    best_fitness: float
    trace: list[float]
    wall_time: float  # milliseconds, optimizer loop only
    iter_of_best: int
    n_evals: int = 0
    algorithm: str = ""


@dataclass
class Population:
    """Candidate positions (``n x 2``) with their cached fitness."""

    x: np.ndarray
    f: np.ndarray

    def best_index(self) -> int:
        return int(np.argmin(self.f))

    def copy(self) -> "Population":
        return Population(self.x.copy(), self.f.copy())


@dataclass
class Swarm(Population):
    """PSO particles: positions, velocities and personal bests."""

    v: np.ndarray = field(default=None)
    pbest_x: np.ndarray = field(default=None)
    pbest_f: np.ndarray = field(default=None)

    def copy(self) -> "Swarm":
        return Swarm(self.x.copy(), self.f.copy(), self.v.copy(), self.pbest_x.copy(), self.pbest_f.copy())


class _Counted:
    """Evaluate raw (a, b) rows through the objective, mapping NaN to inf."""

    def __init__(self, fn: ObjectiveFn):
        self.fn = fn
        self.n_evals = 0

    def __call__(self, x) -> float:
        self.n_evals += 1
        value = float(self.fn(Params(float(x[0]), float(x[1]))))
        return value if not math.isnan(value) else math.inf

    def many(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self(x) for x in xs], dtype=float)


def _as_counted(obj) -> _Counted:
    return obj if isinstance(obj, _Counted) else _Counted(obj)


def _random_population(obj: _Counted, space: SearchSpace, n: int, rng) -> Population:
    x = space.sample(rng, n)
    return Population(x, obj.many(x))


# ---------------------------------------------------------------------------
# Cuckoo Search
# ---------------------------------------------------------------------------


def _mantegna_sigma(beta: float) -> float:
    num = gamma_fn(1 + beta) * math.sin(math.pi * beta / 2)
    den = gamma_fn((1 + beta) / 2) * beta * 2 ** ((beta - 1) / 2)
    return (num / den) ** (1 / beta)


def mantegna_levy(rng, size, beta: float = 1.5) -> np.ndarray:
    """Symmetric Levy-stable-like steps via Mantegna's ratio ``u / |v|**(1/beta)``.

    ``u ~ N(0, sigma_u^2)``, ``v ~ N(0, 1)``; tails decay like ``|s|**-(1+beta)``.
    """
    u = rng.standard_normal(size) * _mantegna_sigma(beta)
    v = rng.standard_normal(size)
    return u / np.abs(v) ** (1 / beta)


def levy_step(current, best, alpha: float, rng, space: SearchSpace | None = None, beta: float = 1.5) -> np.ndarray:
    """Move ``current`` by ``alpha * L * (current - best)`` with Levy-distributed ``L``.

    The step is taken per coordinate, so its scale follows each coordinate's
    spread around the best solution. When ``current`` coincides with
    ``best`` on a coordinate, the box width stands in for the spread so the
    elite solution still explores. Returns a clamped copy when ``space`` is
    given.
    """
    current = np.asarray(current, dtype=float)
    if alpha == 0:
        return current.copy()
    best = np.asarray(best, dtype=float)
    direction = current - best
    if space is not None:
        direction = np.where(direction == 0, space.width, direction)
    out = current + alpha * mantegna_levy(rng, current.shape, beta) * direction
    return space.clip(out) if space is not None else out


def cs_step(nests: Population, obj, space: SearchSpace, cfg: CuckooConfig, rng) -> Population:
    """One Cuckoo Search generation.

    Each cuckoo is a Levy flight away from the current best nest (with a
    zero offset the flight is scaled by the box width). It then replaces a
    uniformly chosen nest ``j`` if its error is strictly lower; ties keep the
    incumbent. Afterwards the worst ``ceil(p_a * n)`` nests, never including
    the best, are rebuilt at uniform random positions.
    """
    obj = _as_counted(obj)
    nests = nests.copy()
    n = len(nests.f)
    for _ in range(cfg.n_cuckoos):
        best = nests.x[nests.best_index()]
        cuckoo = levy_step(best, best, cfg.alpha, rng, space, cfg.levy_beta)
        fc = obj(cuckoo)
        j = int(rng.integers(n))
        if fc < nests.f[j]:
            nests.x[j] = cuckoo
            nests.f[j] = fc

    n_abandon = min(math.ceil(cfg.discovery_rate * n - 1e-12), n - 1)
    if n_abandon > 0:
        order = np.argsort(nests.f, kind="stable")
        worst = order[::-1][:n_abandon]
        fresh = space.sample(rng, n_abandon)
        nests.x[worst] = fresh
        nests.f[worst] = obj.many(fresh)
    return nests


# ---------------------------------------------------------------------------
# Firefly Algorithm
# ---------------------------------------------------------------------------


def fa_step(fireflies: Population, obj, space: SearchSpace, cfg: FireflyConfig, rng, alpha: float | None = None) -> Population:
    """One Firefly generation.

    For every pair, a dimmer firefly ``i`` moves toward a brighter ``j``::

        x_i += beta0 * exp(-gamma * r_ij**2) * (x_j - x_i) + alpha * (rand - 1/2)

    and is re-evaluated straight away. A firefly that found nobody brighter
    during the sweep (the brightest) takes only the random term.
    ``alpha`` overrides ``cfg.alpha`` for annealed schedules.
    """
    obj = _as_counted(obj)
    alpha = cfg.alpha if alpha is None else alpha
    n = len(fireflies.f)
    # plain floats: this double loop dominates FA run time
    x = fireflies.x.tolist()
    f = fireflies.f.tolist()
    (lo_a, lo_b), (hi_a, hi_b) = space.lower.tolist(), space.upper.tolist()
    w_a, w_b = space.width.tolist()
    d_a, d_b = (w_a, w_b) if cfg.normalize else (1.0, 1.0)
    beta0, gamma = cfg.beta0, cfg.gamma
    noise = ((rng.random((n, n, 2)) - 0.5) * alpha).tolist()
    moved = [False] * n
    for i in range(n):
        xi = x[i]
        for j in range(n):
            if f[j] < f[i]:
                da, db = x[j][0] - xi[0], x[j][1] - xi[1]
                r2 = (da / d_a) ** 2 + (db / d_b) ** 2
                beta = beta0 * math.exp(-gamma * r2)
                ua, ub = noise[i][j]
                xi = [
                    min(max(xi[0] + beta * da + ua * w_a, lo_a), hi_a),
                    min(max(xi[1] + beta * db + ub * w_b, lo_b), hi_b),
                ]
                x[i] = xi
                f[i] = obj(xi)
                moved[i] = True
    walk = ((rng.random((n, 2)) - 0.5) * alpha).tolist()
    for i in range(n):
        if not moved[i]:
            ua, ub = walk[i]
            x[i] = [min(max(x[i][0] + ua * w_a, lo_a), hi_a), min(max(x[i][1] + ub * w_b, lo_b), hi_b)]
            f[i] = obj(x[i])
    return Population(np.array(x, dtype=float), np.array(f, dtype=float))


# ---------------------------------------------------------------------------
# Particle Swarm Optimization
# ---------------------------------------------------------------------------


def _init_swarm(obj: _Counted, space: SearchSpace, cfg: PSOConfig, rng) -> Swarm:
    pop = _random_population(obj, space, cfg.swarm_size, rng)
    vmax = cfg.max_velocity * space.width
    v = (rng.random((cfg.swarm_size, 2)) * 2 - 1) * vmax
    return Swarm(pop.x, pop.f, v, pop.x.copy(), pop.f.copy())


def pso_step(swarm: Swarm, obj, space: SearchSpace, cfg: PSOConfig, rng) -> Swarm:
    """One global-best PSO update with inertia and per-coordinate velocity cap."""
    obj = _as_counted(obj)
    s = swarm.copy()
    n = len(s.f)
    g = s.pbest_x[int(np.argmin(s.pbest_f))]
    r1 = rng.random((n, 2))
    r2 = rng.random((n, 2))
    vmax = cfg.max_velocity * space.width
    s.v = cfg.inertia * s.v + cfg.cognitive * r1 * (s.pbest_x - s.x) + cfg.social * r2 * (g - s.x)
    s.v = np.clip(s.v, -vmax, vmax)
    s.x = space.clip(s.x + s.v)
    s.f = obj.many(s.x)
    improved = s.f < s.pbest_f
    s.pbest_x[improved] = s.x[improved]
    s.pbest_f[improved] = s.f[improved]
    return s


# ---------------------------------------------------------------------------
# ACO for continuous domains
# ---------------------------------------------------------------------------


def _kernel_probabilities(k: int, q: float) -> np.ndarray:
    if q == 0:
        p = np.zeros(k)
        p[0] = 1.0
        return p
    ranks = np.arange(k, dtype=float)
    w = np.exp(-(ranks**2) / (2 * (q * k) ** 2))
    return w / w.sum()


def aco_step(archive: Population, obj, space: SearchSpace, cfg: ACOConfig, rng) -> Population:
    """One archive update: sample ants around ranked kernels, keep the best ``k``.

    Kernel ``l`` (rank order) is picked with weight
    ``exp(-(l-1)^2 / (2 q^2 k^2))``. Each coordinate is then drawn from a
    normal centered on the kernel with deviation ``xi`` times the mean
    absolute distance from the kernel to the rest of the archive, floored
    at ``1e-12`` of the box width.
    """
    obj = _as_counted(obj)
    order = np.argsort(archive.f, kind="stable")
    xs, fs = archive.x[order], archive.f[order]
    k = len(fs)
    probs = _kernel_probabilities(k, cfg.locality)
    floor = 1e-12 * space.width
    ants = np.empty((cfg.n_ants, 2))
    for a in range(cfg.n_ants):
        l = int(rng.choice(k, p=probs))
        if k > 1:
            sigma = cfg.deviation_ratio * np.abs(xs - xs[l]).sum(axis=0) / (k - 1)
        else:
            sigma = np.zeros(2)
        sigma = np.maximum(sigma, floor)
        ants[a] = xs[l] + sigma * rng.standard_normal(2)
    ants = space.clip(ants)
    fa = obj.many(ants)
    all_x = np.vstack([xs, ants])
    all_f = np.concatenate([fs, fa])
    keep = np.argsort(all_f, kind="stable")[:k]
    return Population(all_x[keep], all_f[keep])


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _fa_alpha(cfg: FireflyConfig, generation: int) -> float:
    if cfg.alpha_final_ratio == 1.0 or cfg.max_iter == 1:
        return cfg.alpha
    return cfg.alpha * cfg.alpha_final_ratio ** (generation / (cfg.max_iter - 1))


def minimize(obj: ObjectiveFn, space: SearchSpace, cfg: OptimizerConfig, seed: int = 0) -> RunResult:
    """Run one optimizer to its generation limit and report the best point.

    ``obj`` is any callable taking :class:`Params`; NaN is treated as
    ``inf``. Raises :class:`OptimizationError` if no finite value was seen.
    """
    cfg.validate()
    rng = np.random.default_rng(seed)
    fn = _Counted(obj)
    trace: list[float] = []

    start = time.perf_counter()
    if isinstance(cfg, CuckooConfig):
        pop = _random_population(fn, space, cfg.n_nests, rng)
        step = lambda p, it: cs_step(p, fn, space, cfg, rng)
    elif isinstance(cfg, FireflyConfig):
        pop = _random_population(fn, space, cfg.n_fireflies, rng)
        step = lambda p, it: fa_step(p, fn, space, cfg, rng, alpha=_fa_alpha(cfg, it))
    elif isinstance(cfg, PSOConfig):
        pop = _init_swarm(fn, space, cfg, rng)
        step = lambda p, it: pso_step(p, fn, space, cfg, rng)
    elif isinstance(cfg, ACOConfig):
        pop = _random_population(fn, space, cfg.archive_size, rng)
        step = lambda p, it: aco_step(p, fn, space, cfg, rng)
    else:
        raise DomainError(f"unsupported optimizer config {type(cfg).__name__}")

    i = pop.best_index()
    best_x, best_f = pop.x[i].copy(), float(pop.f[i])
    for it in range(cfg.max_iter):
        pop = step(pop, it)
        i = pop.best_index()
        if pop.f[i] < best_f:
            best_x, best_f = pop.x[i].copy(), float(pop.f[i])
        trace.append(best_f)
    elapsed_ms = (time.perf_counter() - start) * 1000.0

    if not math.isfinite(best_f):
        raise OptimizationError(
            f"{cfg.name}: objective returned no finite value in {fn.n_evals} evaluations (seed {seed})"
        )
    final = trace[-1]
    iter_of_best = next(k for k, v in enumerate(trace, start=1) if v == final)
    return RunResult(
        best_params=Params(float(best_x[0]), float(best_x[1])),
        best_fitness=best_f,
        trace=trace,
        wall_time=elapsed_ms,
        iter_of_best=iter_of_best,
        n_evals=fn.n_evals,
        algorithm=cfg.name,
    )
