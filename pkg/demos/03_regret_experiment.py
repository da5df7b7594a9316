"""Measure how much robustness helps when nominal moments are estimated.

Each run draws a ground-truth instance, estimates the nominal covariances
from a limited sample, and fits robust estimators across a grid of radius
pairs.  The regret of an estimator is its true average risk minus the risk
of the oracle estimator built from the true covariances.  Averaging over
runs answers: how should the radii be chosen, and does robustifying both
the state and the noise beat robustifying either alone?

Desk-scale version of the experiment (small dimension, few runs) so it
finishes in seconds; `drmmse regret` runs the same pipeline from the CLI.
"""

from drmmse import (
    InstanceRecipe,
    default_rho_grid,
    make_rng,
    regret_experiment,
    summarize_regret,
)


def main():
    recipe = InstanceRecipe(n=10, m=10, seed=11)
    grid = default_rho_grid(points=4, lo=0.1, hi=5.0, include_zero=True)
    print(f"radius grid: {[round(float(g), 3) for g in grid]}")
    rows = regret_experiment(recipe, grid, runs=5, samples_per_run=60, rng=make_rng(11))
    stats = summarize_regret(rows)

    print(f"{len(rows)} measurements ({len(grid)}^2 grid points x 5 runs)\n")
    print(f"mean regret, nominal Bayes (rho_x = rho_w = 0) : {stats['nominal']:.3f}")
    print(f"best mean regret, robust in x only (rho_w = 0) : "
          f"{stats['best_slice_rho_w_zero']:.3f}")
    print(f"best mean regret, robust in w only (rho_x = 0) : "
          f"{stats['best_slice_rho_x_zero']:.3f}")
    print(f"best mean regret, robust in both               : "
          f"{stats['best_joint']:.3f}")
    print()
    print("robustifying both beats each single-axis slice, which beats the")
    print("plug-in nominal estimator; the full mean-by-point table is in")
    print("stats['mean_by_point'] for plotting")


if __name__ == "__main__":
    main()
