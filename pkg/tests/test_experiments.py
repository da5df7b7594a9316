"""Reproducible instance generation and the two experiment harnesses."""

import numpy as np
import pytest

from drmmse.dual_solver import FwConfig
from drmmse.errors import InvalidInput
from drmmse.experiments import (
    BenchmarkRow,
    InstanceRecipe,
    RegretRow,
    benchmark_scalability,
    default_rho_grid,
    gen_random_covariance,
    instance_from_recipe,
    make_rng,
    regret_experiment,
    sample_covariance,
    summarize_benchmark,
    summarize_regret,
)
from drmmse.gelbrich import MomentPair


def test_make_rng_is_deterministic():
    a = make_rng(123).standard_normal(5)
    b = make_rng(123).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, make_rng(124).standard_normal(5))


def test_gen_random_covariance_spectrum_in_range():
    rng = make_rng(0)
    for _ in range(30):
        d = int(rng.integers(1, 8))
        S = gen_random_covariance(d, (1.0, 5.0), rng)
        assert S.shape == (d, d)
        np.testing.assert_allclose(S, S.T, atol=1e-12)
        evals = np.linalg.eigvalsh(S)
        assert evals[0] >= 1.0 - 1e-8
        assert evals[-1] <= 5.0 + 1e-8


def test_gen_random_covariance_validation():
    rng = make_rng(0)
    with pytest.raises(InvalidInput):
        gen_random_covariance(0, (1.0, 2.0), rng)
    with pytest.raises(InvalidInput):
        gen_random_covariance(3, (2.0, 1.0), rng)
    with pytest.raises(InvalidInput):
        gen_random_covariance(3, (-1.0, 2.0), rng)


def test_sample_covariance_matches_numpy():
    rng = make_rng(1)
    mu = np.array([1.0, -2.0, 0.5])
    S = gen_random_covariance(3, (0.5, 2.0), rng)
    draws_rng = make_rng(2)
    pair = sample_covariance(mu, S, 500, draws_rng)
    assert isinstance(pair, MomentPair)
    # 1/N normalization (biased), consistent with np.cov(ddof=0) on the draws
    assert pair.dim == 3
    # with many samples the estimate approaches the truth
    big = sample_covariance(mu, S, 200_000, make_rng(3))
    assert np.linalg.norm(big.cov - S) < 0.05 * np.linalg.norm(S)
    assert np.linalg.norm(big.mean - mu) < 0.05


def test_instance_from_recipe_shape():
    recipe = InstanceRecipe(n=4, m=4, seed=9)
    inst = instance_from_recipe(recipe, 2.0, 1.0, make_rng(9))
    np.testing.assert_array_equal(inst.H, np.eye(4))
    np.testing.assert_array_equal(inst.nominal_x.mean, np.zeros(4))
    np.testing.assert_array_equal(inst.nominal_w.mean, np.zeros(4))
    ex = np.linalg.eigvalsh(inst.nominal_x.cov)
    ew = np.linalg.eigvalsh(inst.nominal_w.cov)
    assert ex[0] >= 1.0 - 1e-8 and ex[-1] <= 5.0 + 1e-8
    assert ew[0] >= 1.0 - 1e-8 and ew[-1] <= 2.0 + 1e-8
    assert inst.rho_x == 2.0 and inst.rho_w == 1.0


def test_instance_from_recipe_requires_square():
    with pytest.raises(InvalidInput):
        instance_from_recipe(InstanceRecipe(n=3, m=4), 1.0, 1.0, make_rng(0))


def test_recipe_validation():
    with pytest.raises(InvalidInput):
        InstanceRecipe(n=0, m=0)
    with pytest.raises(InvalidInput):
        InstanceRecipe(n=2, m=2, eig_range_x=(3.0, 1.0))


def test_benchmark_rows_and_determinism():
    dims = (3, 5)
    configs = (
        FwConfig(variant="fully_adaptive", max_iters=100),
        FwConfig(variant="vanilla", max_iters=100),
    )
    rows1 = benchmark_scalability(dims, configs, runs=2, rng=make_rng(5))
    rows2 = benchmark_scalability(dims, configs, runs=2, rng=make_rng(5))
    assert len(rows1) == len(dims) * len(configs) * 2
    for a, b in zip(rows1, rows2):
        assert (a.dim, a.variant, a.run_id, a.iterations, a.converged) == (
            b.dim, b.variant, b.run_id, b.iterations, b.converged,
        )
        assert a.final_gap == b.final_gap  # bitwise reproducible
    summary = summarize_benchmark(rows1)
    key = (3, "fully_adaptive")
    assert key in summary
    mean, lo, hi = summary[key]["iterations"]
    assert lo <= mean <= hi


def test_regret_rows_shape_and_nonnegativity():
    recipe = InstanceRecipe(n=3, m=3, seed=17)
    grid = (0.0, 0.5, 2.0)
    rows = regret_experiment(recipe, grid, runs=2, samples_per_run=40)
    assert len(rows) == 2 * len(grid) ** 2
    for r in rows:
        assert r.regret >= -1e-8
    # repeated call with the default rng (seeded by the recipe) is identical
    rows2 = regret_experiment(recipe, grid, runs=2, samples_per_run=40)
    for a, b in zip(rows, rows2):
        assert (a.rho_x, a.rho_w, a.run_id) == (b.rho_x, b.rho_w, b.run_id)
        assert a.regret == b.regret


def test_regret_row_rejects_negative_regret():
    with pytest.raises(InvalidInput):
        RegretRow(1.0, 1.0, -0.5, 0)


def test_summarize_regret_points_and_classes():
    recipe = InstanceRecipe(n=3, m=3, seed=21)
    grid = (0.0, 0.4, 1.5)
    rows = regret_experiment(recipe, grid, runs=3, samples_per_run=60)
    summary = summarize_regret(rows)
    assert len(summary["mean_by_point"]) == len(grid) ** 2
    nominal = summary["nominal"]
    assert nominal == pytest.approx(summary["mean_by_point"][(0.0, 0.0)])
    assert summary["best_joint"] <= max(summary["mean_by_point"].values())
    # slice minima only range over their own axes
    assert summary["best_slice_rho_x_zero"] == pytest.approx(
        min(v for (rx, rw), v in summary["mean_by_point"].items() if rx == 0.0 and rw > 0.0)
    )
    assert summary["best_slice_rho_w_zero"] == pytest.approx(
        min(v for (rx, rw), v in summary["mean_by_point"].items() if rw == 0.0 and rx > 0.0)
    )


def test_regret_smoke_ordering_small():
    # robust joint tuning should beat single-axis tuning, which beats the
    # plain nominal plug-in, already at a small size
    recipe = InstanceRecipe(n=8, m=8, seed=33)
    grid = default_rho_grid(points=4, lo=0.2, hi=6.0, include_zero=True)
    rows = regret_experiment(recipe, grid, runs=4, samples_per_run=30)
    summary = summarize_regret(rows)
    assert summary["best_joint"] < summary["best_slice_rho_x_zero"] < summary["nominal"]


def test_default_rho_grid():
    g = default_rho_grid(points=5, lo=0.1, hi=10.0)
    assert len(g) == 5
    assert g[0] == pytest.approx(0.1)
    assert g[-1] == pytest.approx(10.0)
    gz = default_rho_grid(points=5, include_zero=True)
    assert len(gz) == 6 and gz[0] == 0.0
    with pytest.raises(InvalidInput):
        default_rho_grid(points=0)
