"""Compare the three Frank-Wolfe stepsize strategies on one instance.

Every iteration linearizes the concave dual objective and calls a bisection
oracle that maximizes the linearization over the covariance balls in closed
form — no general-purpose SDP solver involved.  The variants differ only in
the stepsize rule:

  vanilla         2/(t+2) schedule, no curvature information
  adaptive        stepsize from a global curvature constant (valid but
                  pessimistic, so progress per iteration is tiny)
  fully_adaptive  backtracking search for a local curvature estimate

The fully adaptive rule usually certifies a small surrogate gap in a few
dozen iterations even at high dimension, while the other two hit the
iteration cap on harder instances.
"""

import time

import numpy as np

from drmmse import FwConfig, InstanceRecipe, fw_solve, instance_from_recipe, make_rng


def main():
    d = 50
    instance = instance_from_recipe(
        InstanceRecipe(n=d, m=d, seed=3), np.sqrt(d), np.sqrt(d), make_rng(3)
    )
    print(f"instance: n = m = {d}, radii sqrt(d), gap tolerance 1e-3, cap 500\n")
    print(f"{'variant':<16} {'iterations':>10} {'converged':>10} "
          f"{'final gap':>12} {'seconds':>8}")
    for variant in ("vanilla", "adaptive", "fully_adaptive"):
        config = FwConfig(variant=variant, gap_tol=1e-3, max_iters=500)
        start = time.perf_counter()
        report = fw_solve(instance, config)
        wall = time.perf_counter() - start
        print(f"{variant:<16} {report.iterations:>10} "
              f"{str(report.converged):>10} {report.trace[-1].gap:>12.2e} "
              f"{wall:>8.2f}")
    print("\nthe objective values agree wherever a run converged; the")
    print("surrogate gap bounds the distance to the optimum either way")


if __name__ == "__main__":
    main()
