"""Affine estimators, their risks, and the robust Nash construction.

An affine estimator ``psi(y) = A y + b`` incurs average risk
``E ||x - psi(H x + w)||^2`` under uncorrelated signal/noise moments.  The
robust pipeline maximizes the MMSE value over the covariance balls
(:func:`drmmse.dual_solver.fw_solve`), reads off the optimal estimator from
the worst-case pair, and certifies optimality by evaluating the estimator's
exact worst-case risk over the ambiguity set: the two values agree up to the
solver tolerance, sandwiching the minimax optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionMismatch, InvalidInput, OutOfDomain, UncenteredIntercept
from .gelbrich import AmbiguityBall, MomentPair
from .dual_solver import (
    CovariancePair,
    FwConfig,
    ProblemInstance,
    SolveReport,
    fw_solve,
    objective_f,
    oracle_linmax,
)
from .linalg import as_symmetric, solve_spd

__all__ = [
    "AffineEstimator",
    "NashSolution",
    "nominal_bayes",
    "nash_estimator",
    "average_risk",
    "worst_case_risk",
    "primal_objective_gamma",
    "solve_nash",
]


@dataclass(frozen=True)
class AffineEstimator:
    """The affine map ``psi(y) = A y + b`` (A is n-by-m, b has length n)."""

    A: NDArray
    b: NDArray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2:
            raise InvalidInput(f"A must be 2-D, got shape {A.shape}")
        if b.ndim != 1:
            raise InvalidInput(f"b must be 1-D, got shape {b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidInput("estimator coefficients contain non-finite entries")
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        A = np.array(A)
        b = np.array(b)
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def residual_map(self, H) -> NDArray:
        """The residual factor K = I - A H, recomputed from the current A."""
        H = np.asarray(H, dtype=float)
        if H.ndim != 2 or H.shape != (self.A.shape[1], self.A.shape[0]):
            raise DimensionMismatch(
                f"H must have shape ({self.A.shape[1]}, {self.A.shape[0]}), got {H.shape}"
            )
        return np.eye(self.A.shape[0]) - self.A @ H

    def __call__(self, y) -> NDArray:
        return self.A @ np.asarray(y, dtype=float) + self.b


@dataclass(frozen=True)
class NashSolution:
    """Equilibrium output: the robust estimator and the prior it is matched to.

    ``least_favorable`` holds the covariance pair of the least favorable
    prior, which is normal with means ``prior_means`` and these covariances
    (no distribution object is materialized).  ``value`` is the equilibrium
    MMSE value and ``gap`` the certified duality gap
    ``worst_case_risk(estimator) - value >= 0``.  ``report`` retains the full
    solver trace.
    """

    estimator: AffineEstimator
    least_favorable: CovariancePair
    value: float
    gap: float
    prior_means: tuple[NDArray, NDArray]
    report: SolveReport


def _bayes_from_covariances(sigma_x, sigma_w, instance: ProblemInstance) -> AffineEstimator:
    H = instance.H
    HS = H @ sigma_x
    G = HS @ H.T + sigma_w
    A = solve_spd(0.5 * (G + G.T), HS).T  # Sx H^T G^{-1}
    mu_x = instance.nominal_x.mean
    mu_w = instance.nominal_w.mean
    b = mu_x - A @ (H @ mu_x + mu_w)
    return AffineEstimator(A, b)


def nominal_bayes(instance: ProblemInstance) -> AffineEstimator:
    """Optimal affine estimator for the nominal moments themselves.

    A = Sx_hat H^T (H Sx_hat H^T + Sw_hat)^{-1}, b = mu_x - A (H mu_x + mu_w).
    """
    return _bayes_from_covariances(
        instance.nominal_x.cov, instance.nominal_w.cov, instance
    )


def nash_estimator(pair: CovariancePair, instance: ProblemInstance) -> AffineEstimator:
    """Optimal affine estimator for a worst-case covariance pair.

    Identical to :func:`nominal_bayes` applied to an instance whose nominal
    covariances are replaced by the pair (the nominal means are kept: the
    worst case never moves them).
    """
    if pair.sigma_x.shape[0] != instance.n or pair.sigma_w.shape[0] != instance.m:
        raise DimensionMismatch("pair dimensions do not match the instance")
    return _bayes_from_covariances(pair.sigma_x, pair.sigma_w, instance)


def average_risk(est: AffineEstimator, mx: MomentPair, mw: MomentPair, H) -> float:
    """Mean squared estimation error of ``est`` under the given uncorrelated moments.

    Equals <K^T K, Sx> + <A^T A, Sw> + ||K mu_x - A mu_w - b||^2 with
    K = I - A H; always nonnegative.
    """
    A, b = est.A, est.b
    n, m = A.shape
    H = np.asarray(H, dtype=float)
    if H.shape != (m, n):
        raise DimensionMismatch(f"H must have shape ({m}, {n}), got {H.shape}")
    if mx.dim != n or mw.dim != m:
        raise DimensionMismatch(
            f"moments have dimensions {mx.dim}, {mw.dim}; estimator expects {n}, {m}"
        )
    K = est.residual_map(H)
    quad = float(np.sum(K * (K @ mx.cov)) + np.sum(A * (A @ mw.cov)))
    mean_term = float(np.sum((K @ mx.mean - A @ mw.mean - b) ** 2))
    return quad + mean_term


def _ball_linear_max(ball: AmbiguityBall, D) -> float:
    """sup over the ball of <sigma, D> for PSD D, to near-exact precision."""
    if ball.radius == 0.0:
        return float(np.sum(ball.center.cov * D))
    L, _ = oracle_linmax(ball, ball.center.cov, D, delta=1.0 - 1e-9, bisect_tol=1e-14)
    return float(np.sum(L * D))


def worst_case_risk(est: AffineEstimator, instance: ProblemInstance) -> float:
    """Exact worst-case average risk of ``est`` over the instance's ambiguity set.

    Defined only for estimators whose intercept is centered at the nominal
    means, b = (I - A H) mu_x - A mu_w; the supremum then splits into two
    independent ball maximizations with the PSD weight matrices K^T K and
    A^T A, solved by the bisection oracle at precision delta = 1 - 1e-9.
    """
    H = instance.H
    K = est.residual_map(H)
    b_centered = K @ instance.nominal_x.mean - est.A @ instance.nominal_w.mean
    if float(np.linalg.norm(est.b - b_centered)) > 1e-8 * (
        1.0 + float(np.linalg.norm(b_centered))
    ):
        raise UncenteredIntercept(
            "worst_case_risk is defined only for the intercept centered at the "
            "nominal means, b = (I - A H) mu_x - A mu_w"
        )
    Dx = K.T @ K
    Dw = est.A.T @ est.A
    risk_x = _ball_linear_max(instance.ball_x(), 0.5 * (Dx + Dx.T))
    risk_w = _ball_linear_max(instance.ball_w(), 0.5 * (Dw + Dw.T))
    mean_term = float(np.sum((b_centered - est.b) ** 2))
    return risk_x + risk_w + mean_term


def primal_objective_gamma(
    A, gamma_x: float, gamma_w: float, instance: ProblemInstance
) -> float:
    """Penalized upper bound on the worst-case risk of the centered estimator A.

    For gamma_x I > K^T K and gamma_w I > A^T A (strictly) the value is

        gamma_x (rho_x^2 - Tr Sx_hat) + gamma_x^2 <(gamma_x I - K^T K)^{-1}, Sx_hat>
      + gamma_w (rho_w^2 - Tr Sw_hat) + gamma_w^2 <(gamma_w I - A^T A)^{-1}, Sw_hat>,

    which is jointly convex and coercive in (gamma_x, gamma_w) and matches
    worst_case_risk at the minimizing pair.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (instance.n, instance.m):
        raise DimensionMismatch(
            f"A must have shape ({instance.n}, {instance.m}), got {A.shape}"
        )
    gamma_x = float(gamma_x)
    gamma_w = float(gamma_w)
    K = np.eye(instance.n) - A @ instance.H
    Dx = as_symmetric(K.T @ K)
    Dw = as_symmetric(A.T @ A)
    lam_x = float(np.linalg.eigvalsh(Dx)[-1])
    lam_w = float(np.linalg.eigvalsh(Dw)[-1])
    if not gamma_x > lam_x:
        raise OutOfDomain(f"gamma_x={gamma_x!r} must exceed lambda_max(K^T K)={lam_x!r}")
    if not gamma_w > lam_w:
        raise OutOfDomain(f"gamma_w={gamma_w!r} must exceed lambda_max(A^T A)={lam_w!r}")
    Sx = instance.nominal_x.cov
    Sw = instance.nominal_w.cov
    term_x = gamma_x * (instance.rho_x**2 - float(np.trace(Sx)))
    term_x += gamma_x**2 * float(
        np.trace(solve_spd(gamma_x * np.eye(instance.n) - Dx, Sx))
    )
    term_w = gamma_w * (instance.rho_w**2 - float(np.trace(Sw)))
    term_w += gamma_w**2 * float(
        np.trace(solve_spd(gamma_w * np.eye(instance.m) - Dw, Sw))
    )
    return term_x + term_w


def solve_nash(instance: ProblemInstance, config: FwConfig | None = None) -> NashSolution:
    """Solve the robust estimation problem end to end and certify the result.

    Runs the Frank-Wolfe solve, builds the equilibrium estimator from the
    worst-case pair, evaluates its exact worst-case risk, and reports the
    duality gap between the two.
    """
    report = fw_solve(instance, config)
    est = nash_estimator(report.pair, instance)
    value = objective_f(report.pair, instance.H)
    gap = worst_case_risk(est, instance) - value
    return NashSolution(
        estimator=est,
        least_favorable=report.pair,
        value=value,
        gap=gap,
        prior_means=(instance.nominal_x.mean, instance.nominal_w.mean),
        report=report,
    )
