"""Seeded instance generators and the two experiment harnesses.

The scalability harness measures iteration counts and wall time of the three
Frank-Wolfe variants on random identity-map instances with radii sqrt(d).  The
regret harness draws a true covariance pair per run, builds nominal moments
from a small number of samples, sweeps the radius grid, and records the excess
average risk of each tuned estimator over the true-Bayes floor.

All randomness flows through counter-based Philox generators; harness runs own
spawned substreams, so results are reproducible independently of scheduling.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInput
from .estimator import average_risk, nash_estimator
from .gelbrich import MomentPair
from .dual_solver import (
    CovariancePair,
    FwConfig,
    ProblemInstance,
    fw_solve,
    objective_f,
)
from .linalg import psd_sqrt

__all__ = [
    "InstanceRecipe",
    "RegretRow",
    "BenchmarkRow",
    "make_rng",
    "gen_random_covariance",
    "sample_covariance",
    "instance_from_recipe",
    "benchmark_scalability",
    "summarize_benchmark",
    "regret_experiment",
    "summarize_regret",
    "default_rho_grid",
]


@dataclass(frozen=True)
class InstanceRecipe:
    """Shape and spectrum ranges for a random identity-map instance."""

    n: int
    m: int
    eig_range_x: tuple[float, float] = (1.0, 5.0)
    eig_range_w: tuple[float, float] = (1.0, 2.0)
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1 and isinstance(self.m, int) and self.m >= 1):
            raise InvalidInput(f"dimensions must be positive integers, got n={self.n!r}, m={self.m!r}")
        for label, rng_pair in (("eig_range_x", self.eig_range_x), ("eig_range_w", self.eig_range_w)):
            lo, hi = float(rng_pair[0]), float(rng_pair[1])
            if not (np.isfinite(lo) and np.isfinite(hi) and 0.0 <= lo <= hi):
                raise InvalidInput(f"{label} must satisfy 0 <= lo <= hi, got {rng_pair!r}")
        object.__setattr__(self, "eig_range_x", (float(self.eig_range_x[0]), float(self.eig_range_x[1])))
        object.__setattr__(self, "eig_range_w", (float(self.eig_range_w[0]), float(self.eig_range_w[1])))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class RegretRow:
    """One measurement of the regret sweep."""

    rho_x: float
    rho_w: float
    regret: float
    run_id: int

    def __post_init__(self):
        if self.regret < -1e-8:
            raise InvalidInput(f"regret {self.regret!r} violates the Bayes floor")


@dataclass(frozen=True)
class BenchmarkRow:
    """One solve of the scalability sweep."""

    dim: int
    variant: str
    run_id: int
    iterations: int
    wall_time: float
    converged: bool
    final_gap: float


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for the given seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def gen_random_covariance(d: int, eig_range, rng: np.random.Generator) -> NDArray:
    """Random covariance with a Haar-like eigenbasis and uniform spectrum.

    The eigenbasis is the set of orthonormal eigenvectors of Q + Q^T for a
    standard normal d-by-d draw Q; the eigenvalues are drawn uniformly from
    ``eig_range``.
    """
    if not (isinstance(d, int) and d >= 1):
        raise InvalidInput(f"dimension must be a positive integer, got {d!r}")
    lo, hi = float(eig_range[0]), float(eig_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and 0.0 <= lo <= hi):
        raise InvalidInput(f"eig_range must satisfy 0 <= lo <= hi, got {eig_range!r}")
    Q = rng.standard_normal((d, d))
    _, R = np.linalg.eigh(Q + Q.T)
    lam = rng.uniform(lo, hi, size=d)
    S = (R * lam) @ R.T
    return 0.5 * (S + S.T)


def sample_covariance(mu, sigma, N: int, rng: np.random.Generator) -> MomentPair:
    """Empirical moments of N normal draws: sample mean and 1/N-normalized covariance."""
    if not (isinstance(N, int) and N >= 2):
        raise InvalidInput(f"N must be an integer >= 2, got {N!r}")
    mu = np.asarray(mu, dtype=float)
    root = psd_sqrt(sigma)
    X = mu + rng.standard_normal((N, mu.shape[0])) @ root
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / N
    return MomentPair(mean, cov)


def instance_from_recipe(
    recipe: InstanceRecipe, rho_x: float, rho_w: float, rng: np.random.Generator
) -> ProblemInstance:
    """Identity-map instance with random nominal covariances and zero nominal means."""
    if recipe.n != recipe.m:
        raise InvalidInput(
            f"identity-map recipes need n == m, got n={recipe.n}, m={recipe.m}"
        )
    n = recipe.n
    sigma_x = gen_random_covariance(n, recipe.eig_range_x, rng)
    sigma_w = gen_random_covariance(n, recipe.eig_range_w, rng)
    zero = np.zeros(n)
    return ProblemInstance(
        H=np.eye(n),
        nominal_x=MomentPair(zero, sigma_x),
        nominal_w=MomentPair(zero, sigma_w),
        rho_x=rho_x,
        rho_w=rho_w,
    )


def benchmark_scalability(
    dims, configs, runs: int, rng: np.random.Generator | None = None
) -> list[BenchmarkRow]:
    """Time the Frank-Wolfe variants across dimensions; radii are sqrt(d).

    Each (dim, run) pair gets one random instance, solved once per config,
    yielding ``len(dims) * runs * len(configs)`` rows.  Use
    :func:`summarize_benchmark` for mean/min/max per (dim, variant).
    """
    if rng is None:
        rng = make_rng(0)
    if not (isinstance(runs, int) and runs >= 1):
        raise InvalidInput(f"runs must be a positive integer, got {runs!r}")
    dims = [int(d) for d in dims]
    configs = list(configs)
    children = rng.spawn(len(dims) * runs)
    rows: list[BenchmarkRow] = []
    k = 0
    for d in dims:
        rho = float(np.sqrt(d))
        for run_id in range(runs):
            child = children[k]
            k += 1
            recipe = InstanceRecipe(n=d, m=d)
            instance = instance_from_recipe(recipe, rho, rho, child)
            for config in configs:
                start = time.perf_counter()
                report = fw_solve(instance, config)
                wall = time.perf_counter() - start
                rows.append(
                    BenchmarkRow(
                        dim=d,
                        variant=config.variant,
                        run_id=run_id,
                        iterations=report.iterations,
                        wall_time=wall,
                        converged=report.converged,
                        final_gap=report.final_gap,
                    )
                )
    return rows


def summarize_benchmark(rows) -> dict:
    """Mean/min/max of iterations and wall time per (dim, variant)."""
    grouped: dict[tuple[int, str], list[BenchmarkRow]] = {}
    for row in rows:
        grouped.setdefault((row.dim, row.variant), []).append(row)
    summary = {}
    for key, group in sorted(grouped.items()):
        iters = [r.iterations for r in group]
        walls = [r.wall_time for r in group]
        summary[key] = {
            "iterations": (float(np.mean(iters)), min(iters), max(iters)),
            "wall_time": (float(np.mean(walls)), min(walls), max(walls)),
            "converged": all(r.converged for r in group),
        }
    return summary


def regret_experiment(
    recipe: InstanceRecipe,
    rho_grid,
    runs: int,
    samples_per_run: int = 100,
    rng: np.random.Generator | None = None,
    config: FwConfig | None = None,
) -> list[RegretRow]:
    """Excess risk of radius-tuned robust estimators over the true-Bayes floor.

    Per run: draw a true covariance pair from the recipe, build nominal
    moments from ``samples_per_run`` normal draws, and for every (rho_x,
    rho_w) in the grid product fit the robust estimator to the nominal
    moments and evaluate its average risk under the true moments.  A grid
    value of 0 is evaluated as 1e-9 (the nominal Bayes estimator) but
    recorded as 0.
    """
    if recipe.n != recipe.m:
        raise InvalidInput(f"the regret harness needs n == m, got n={recipe.n}, m={recipe.m}")
    if not (isinstance(runs, int) and runs >= 1):
        raise InvalidInput(f"runs must be a positive integer, got {runs!r}")
    grid = [float(r) for r in rho_grid]
    if not grid or any(not np.isfinite(r) or r < 0.0 for r in grid):
        raise InvalidInput("rho_grid must be a nonempty list of finite nonnegative reals")
    if rng is None:
        rng = make_rng(recipe.seed)
    if config is None:
        config = FwConfig()
    n = recipe.n
    eye = np.eye(n)
    zero = np.zeros(n)
    children = rng.spawn(runs)
    rows: list[RegretRow] = []
    for run_id, child in enumerate(children):
        true_x = gen_random_covariance(n, recipe.eig_range_x, child)
        true_w = gen_random_covariance(n, recipe.eig_range_w, child)
        nominal_x = sample_covariance(zero, true_x, samples_per_run, child)
        nominal_w = sample_covariance(zero, true_w, samples_per_run, child)
        true_mx = MomentPair(zero, true_x)
        true_mw = MomentPair(zero, true_w)
        floor = objective_f(CovariancePair(true_x, true_w), eye)
        for rho_x in grid:
            for rho_w in grid:
                instance = ProblemInstance(
                    H=eye,
                    nominal_x=nominal_x,
                    nominal_w=nominal_w,
                    rho_x=rho_x if rho_x > 0.0 else 1e-9,
                    rho_w=rho_w if rho_w > 0.0 else 1e-9,
                )
                report = fw_solve(instance, config)
                est = nash_estimator(report.pair, instance)
                regret = average_risk(est, true_mx, true_mw, eye) - floor
                rows.append(RegretRow(rho_x, rho_w, regret, run_id))
    return rows


def summarize_regret(rows) -> dict:
    """Across-run mean regret per grid point, plus the headline curve minima.

    ``nominal`` is the mean at (0, 0); ``best_joint`` the smallest mean over
    points with both radii positive; the slice entries are the smallest means
    along each zero-radius axis.  Entries are None when the grid lacks the
    corresponding points.
    """
    sums: dict[tuple[float, float], list[float]] = {}
    for row in rows:
        sums.setdefault((row.rho_x, row.rho_w), []).append(row.regret)
    mean_by_point = {pt: float(np.mean(v)) for pt, v in sorted(sums.items())}
    joint = [v for (rx, rw), v in mean_by_point.items() if rx > 0.0 and rw > 0.0]
    slice_x0 = [v for (rx, rw), v in mean_by_point.items() if rx == 0.0 and rw > 0.0]
    slice_w0 = [v for (rx, rw), v in mean_by_point.items() if rw == 0.0 and rx > 0.0]
    return {
        "mean_by_point": mean_by_point,
        "nominal": mean_by_point.get((0.0, 0.0)),
        "best_joint": min(joint) if joint else None,
        "best_slice_rho_x_zero": min(slice_x0) if slice_x0 else None,
        "best_slice_rho_w_zero": min(slice_w0) if slice_w0 else None,
    }


def default_rho_grid(points: int = 20, lo: float = 0.1, hi: float = 10.0, include_zero: bool = False):
    """Log-spaced radius grid over [lo, hi], optionally prefixed with 0."""
    if not (isinstance(points, int) and points >= 1):
        raise InvalidInput(f"points must be a positive integer, got {points!r}")
    if not (0.0 < lo <= hi):
        raise InvalidInput(f"need 0 < lo <= hi, got lo={lo!r}, hi={hi!r}")
    grid = list(np.logspace(np.log10(lo), np.log10(hi), points))
    return ([0.0] + grid) if include_zero else grid
