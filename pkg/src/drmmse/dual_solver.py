"""Concave maximization over a product of covariance balls.

The quantity being maximized is the affine-MMSE value

    f(Sx, Sw) = Tr[Sx - Sx H^T (H Sx H^T + Sw)^{-1} H Sx],

a concave function of the covariance pair, over the product of two Gelbrich
covariance balls around the nominal covariances.  The Frank-Wolfe solver
linearizes f at the current pair and maximizes the linearization one ball at a
time through a scalar bisection (:func:`oracle_linmax`), which is available in
quasi-closed form.  Three stepsize rules are provided: the classic ``2/(2+t)``
schedule (``vanilla``), a fixed-smoothness rule using the global curvature
constant (``adaptive``), and a backtracking rule that learns the local
curvature (``fully_adaptive``).
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DimensionMismatch,
    InvalidConfig,
    InvalidGradient,
    InvalidInput,
    NotPositiveDefinite,
    OutOfDomain,
)
from .gelbrich import AmbiguityBall, MomentPair, feas_tol
from .linalg import as_psd, as_symmetric, sym_eig

__all__ = [
    "ProblemInstance",
    "CovariancePair",
    "FwConfig",
    "FwIteration",
    "SolveReport",
    "RegularityConstants",
    "VARIANTS",
    "objective_f",
    "gradients",
    "hessian_quadratic_form",
    "oracle_linmax",
    "phi_and_derivative",
    "closed_form_inner_max",
    "fw_solve",
    "regularity_constants",
]

VARIANTS = ("vanilla", "adaptive", "fully_adaptive")


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ProblemInstance:
    """Observation map, nominal signal/noise moments, and the two ambiguity radii.

    The model is ``y = H x + w`` with uncorrelated signal ``x`` (dimension n)
    and noise ``w`` (dimension m); ``H`` is m-by-n.
    """

    H: NDArray
    nominal_x: MomentPair
    nominal_w: MomentPair
    rho_x: float
    rho_w: float

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        if H.ndim != 2:
            raise InvalidInput(f"H must be a 2-D array, got shape {H.shape}")
        if not np.all(np.isfinite(H)):
            raise InvalidInput("H contains non-finite entries")
        if not isinstance(self.nominal_x, MomentPair) or not isinstance(
            self.nominal_w, MomentPair
        ):
            raise InvalidInput("nominal_x and nominal_w must be MomentPair objects")
        m, n = H.shape
        if self.nominal_x.dim != n:
            raise DimensionMismatch(
                f"H has {n} columns but nominal_x has dimension {self.nominal_x.dim}"
            )
        if self.nominal_w.dim != m:
            raise DimensionMismatch(
                f"H has {m} rows but nominal_w has dimension {self.nominal_w.dim}"
            )
        for label, r in (("rho_x", self.rho_x), ("rho_w", self.rho_w)):
            r = float(r)
            if not np.isfinite(r) or r < 0.0:
                raise InvalidInput(f"{label} must be finite and nonnegative, got {r!r}")
        object.__setattr__(self, "H", _frozen(H))
        object.__setattr__(self, "rho_x", float(self.rho_x))
        object.__setattr__(self, "rho_w", float(self.rho_w))

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def m(self) -> int:
        return self.H.shape[0]

    def ball_x(self) -> AmbiguityBall:
        return AmbiguityBall(self.nominal_x, self.rho_x)

    def ball_w(self) -> AmbiguityBall:
        return AmbiguityBall(self.nominal_w, self.rho_w)


@dataclass(frozen=True)
class CovariancePair:
    """A candidate point (sigma_x, sigma_w) of the covariance-ball product."""

    sigma_x: NDArray
    sigma_w: NDArray

    def __post_init__(self):
        object.__setattr__(self, "sigma_x", _frozen(as_psd(self.sigma_x, "sigma_x")))
        object.__setattr__(self, "sigma_w", _frozen(as_psd(self.sigma_w, "sigma_w")))


@dataclass(frozen=True)
class FwConfig:
    """Frank-Wolfe solver settings.

    delta is the oracle precision in (0,1); beta_init, tau, zeta drive the
    backtracking line search; gap_tol is the surrogate-gap stopping threshold;
    bisect_tol is the relative bracket-width floor of the oracle bisection.
    """

    variant: str = "fully_adaptive"
    delta: float = 0.99
    beta_init: float = 1.0
    tau: float = 2.0
    zeta: float = 2.0
    gap_tol: float = 1e-3
    max_iters: int = 500
    bisect_tol: float = 1e-12

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidConfig(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not (0.0 < self.delta < 1.0):
            raise InvalidConfig(f"delta must lie in (0,1), got {self.delta!r}")
        if not self.beta_init > 0.0:
            raise InvalidConfig(f"beta_init must be positive, got {self.beta_init!r}")
        if not self.tau > 1.0:
            raise InvalidConfig(f"tau must exceed 1, got {self.tau!r}")
        if not self.zeta > 1.0:
            raise InvalidConfig(f"zeta must exceed 1, got {self.zeta!r}")
        if not self.gap_tol > 0.0:
            raise InvalidConfig(f"gap_tol must be positive, got {self.gap_tol!r}")
        if not (isinstance(self.max_iters, int) and self.max_iters >= 1):
            raise InvalidConfig(f"max_iters must be a positive integer, got {self.max_iters!r}")
        if not self.bisect_tol > 0.0:
            raise InvalidConfig(f"bisect_tol must be positive, got {self.bisect_tol!r}")


@dataclass(frozen=True)
class FwIteration:
    """One row of the solve trace (maximization form)."""

    t: int
    objective: float
    gap: float
    stepsize: float
    beta: float
    elapsed: float


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a Frank-Wolfe solve: per-iteration trace and the final pair.

    ``iterations`` counts the update steps actually performed; the trace has
    one extra terminal row (stepsize 0) when the solve converged.  ``iterates``
    is populated only when the solve was run with ``record_iterates=True``.
    """

    trace: tuple[FwIteration, ...]
    pair: CovariancePair
    iterations: int
    converged: bool
    iterates: tuple[CovariancePair, ...] | None = None

    @property
    def final_objective(self) -> float:
        return self.trace[-1].objective

    @property
    def final_gap(self) -> float:
        return self.trace[-1].gap


@dataclass(frozen=True)
class RegularityConstants:
    """Closed-form curvature/steepness constants of the covariance-ball problem.

    beta is the global smoothness constant used by the ``adaptive`` stepsize;
    alpha and epsilon are the strong-convexity and steepness constants of the
    two balls (the minimum over the blocks); c_aux is the auxiliary constant C
    appearing inside beta.  The backtracking variant never exceeds
    ``max(tau*beta, beta_init)``, so either constant bounds its accepted betas.
    """

    beta: float
    alpha: float
    epsilon: float
    c_aux: float


# ---------------------------------------------------------------------------
# Objective, gradients, curvature
# ---------------------------------------------------------------------------


def _check_H(H, n: int, m: int) -> NDArray:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise InvalidInput(f"H must be 2-D, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidInput("H contains non-finite entries")
    if H.shape != (m, n):
        raise DimensionMismatch(
            f"H has shape {H.shape} but the pair has dimensions n={n}, m={m}"
        )
    return H


def _mmse_value(sigma_x, sigma_w, H) -> float:
    HS = H @ sigma_x
    G = HS @ H.T + sigma_w
    G = 0.5 * (G + G.T)
    try:
        cho = cho_factor(G, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"H Sx H^T + Sw is not positive definite: {exc}") from exc
    GiHS = cho_solve(cho, HS, check_finite=False)
    return float(np.trace(sigma_x) - np.sum(HS * GiHS))


def _mmse_core(sigma_x, sigma_w, H):
    """Objective and both gradient blocks from a single factorization of G."""
    n = sigma_x.shape[0]
    HS = H @ sigma_x
    G = HS @ H.T + sigma_w
    G = 0.5 * (G + G.T)
    try:
        cho = cho_factor(G, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"H Sx H^T + Sw is not positive definite: {exc}") from exc
    GiHS = cho_solve(cho, HS, check_finite=False)  # G^{-1} H Sx
    value = float(np.trace(sigma_x) - np.sum(HS * GiHS))
    M = H.T @ GiHS  # H^T G^{-1} H Sx
    IM = np.eye(n) - M
    Dx = IM @ IM.T  # (I - M)(I - M^T) = K~^T K~
    Dw = GiHS @ GiHS.T  # G^{-1} H Sx^2 H^T G^{-1}
    return value, 0.5 * (Dx + Dx.T), 0.5 * (Dw + Dw.T), cho, GiHS


def objective_f(pair: CovariancePair, H) -> float:
    """Affine-MMSE value of the covariance pair under observation map H.

    Always lies in ``[0, Tr[sigma_x]]``.  Raises NotPositiveDefinite when
    ``H sigma_x H^T + sigma_w`` is singular.
    """
    H = _check_H(H, pair.sigma_x.shape[0], pair.sigma_w.shape[0])
    return _mmse_value(pair.sigma_x, pair.sigma_w, H)


def gradients(pair: CovariancePair, H) -> tuple[NDArray, NDArray]:
    """Gradient blocks (D_x, D_w) of the objective at the pair; both PSD.

    D_x = (I - Sx H^T G^{-1} H)^T (I - Sx H^T G^{-1} H) and
    D_w = G^{-1} H Sx^2 H^T G^{-1} with G = H Sx H^T + Sw.
    """
    H = _check_H(H, pair.sigma_x.shape[0], pair.sigma_w.shape[0])
    _, Dx, Dw, _, _ = _mmse_core(pair.sigma_x, pair.sigma_w, H)
    return Dx, Dw


def hessian_quadratic_form(pair: CovariancePair, H, delta_x, delta_w) -> float:
    """Quadratic form of the curvature (Hessian of -f) in direction (delta_x, delta_w).

    Nonnegative up to rounding, since -f is convex.  Matches the second-order
    finite difference -(f(s+t*d) - 2 f(s) + f(s-t*d)) / t^2 as t -> 0.
    """
    n, m = pair.sigma_x.shape[0], pair.sigma_w.shape[0]
    H = _check_H(H, n, m)
    dx = as_symmetric(delta_x, "delta_x")
    dw = as_symmetric(delta_w, "delta_w")
    if dx.shape[0] != n or dw.shape[0] != m:
        raise DimensionMismatch(
            f"directions have shapes {dx.shape}, {dw.shape}; expected ({n},{n}), ({m},{m})"
        )
    _, Dx, Dw, cho, GiHS = _mmse_core(pair.sigma_x, pair.sigma_w, H)
    GiH = cho_solve(cho, H, check_finite=False)  # G^{-1} H
    Mt = H.T @ GiH  # H^T G^{-1} H
    B = H.T @ Dw - GiHS.T  # H^T D_w - Sx H^T G^{-1}
    qxx = 2.0 * float(np.sum(dx * (Mt @ dx @ Dx)))
    qww = 2.0 * float(np.sum(dw * (cho_solve(cho, dw, check_finite=False) @ Dw)))
    cross = float(np.sum(dx * (B @ dw @ GiH).T))  # Tr[dx B dw G^{-1}H]
    return qxx + qww + 4.0 * cross


# ---------------------------------------------------------------------------
# Linear maximization oracle over one ball
# ---------------------------------------------------------------------------


def _dual_curve(gamma, d, tdiag, rho_sq, c_ref):
    """phi, dphi, and the primal value at gamma, all in the eigenbasis of D."""
    r = d / (gamma - d)
    phi = gamma * (rho_sq + float(np.sum(r * tdiag))) - c_ref
    dphi = rho_sq - float(np.sum(r * r * tdiag))
    value = gamma**2 * float(np.sum(d * tdiag / (gamma - d) ** 2)) - c_ref
    return phi, dphi, value


def phi_and_derivative(gamma: float, ball: AmbiguityBall, sigma_ref, D) -> tuple[float, float]:
    """Dual curve phi(gamma) of the ball-constrained linear maximization, and its slope.

    phi(gamma) = gamma * (rho^2 + <gamma (gamma I - D)^{-1} - I, center>) - <sigma_ref, D>
    upper-bounds the maximum of <sigma - sigma_ref, D> over the ball for every
    gamma > lambda_max(D); its slope is rho^2 - <center, (I - gamma(gamma I - D)^{-1})^2>.
    """
    gamma = float(gamma)
    D = as_symmetric(D, "D")
    sigma_ref = as_psd(sigma_ref, "sigma_ref")
    center = ball.center.cov
    if D.shape != center.shape or sigma_ref.shape != center.shape:
        raise DimensionMismatch("D, sigma_ref, and the ball center must share a dimension")
    w, V = sym_eig(D)
    if not gamma > w[0]:
        raise OutOfDomain(f"gamma={gamma!r} must exceed lambda_max(D)={w[0]!r}")
    tdiag = np.einsum("ij,ij->j", V, center @ V)
    c_ref = float(np.sum(sigma_ref * D))
    phi, dphi, _ = _dual_curve(gamma, w, tdiag, ball.radius**2, c_ref)
    return phi, dphi


def closed_form_inner_max(D, gamma: float, sigma_hat) -> tuple[float, NDArray]:
    """Inner penalized maximum sup_S <D,S> - gamma*(Tr[S] - 2 Tr[(hat^{1/2} S hat^{1/2})^{1/2}]).

    For gamma > lambda_max(D) the maximizer is
    S* = gamma^2 (gamma I - D)^{-1} sigma_hat (gamma I - D)^{-1} and the value
    is gamma^2 <(gamma I - D)^{-1}, sigma_hat>.
    """
    gamma = float(gamma)
    D = as_symmetric(D, "D")
    sigma_hat = as_psd(sigma_hat, "sigma_hat")
    if D.shape != sigma_hat.shape:
        raise DimensionMismatch(f"D has shape {D.shape}, sigma_hat {sigma_hat.shape}")
    w, V = sym_eig(D)
    if not gamma > w[0]:
        raise OutOfDomain(f"gamma={gamma!r} must exceed lambda_max(D)={w[0]!r}")
    T = V.T @ sigma_hat @ V
    value = gamma**2 * float(np.sum(np.diag(T) / (gamma - w)))
    c = gamma / (gamma - w)
    S = V @ (np.outer(c, c) * T) @ V.T
    return value, 0.5 * (S + S.T)


def oracle_linmax(
    ball: AmbiguityBall, sigma_ref, D, delta: float, bisect_tol: float = 1e-12
) -> tuple[NDArray, float]:
    """Approximately maximize <sigma - sigma_ref, D> over the covariance ball.

    Runs a bisection on the scalar dual variable gamma.  The returned matrix L
    is feasible in the ball and delta-suboptimal: <L - sigma_ref, D> is at
    least delta times the exact maximum.  Also returns the accepted gamma,
    which lies between lambda_1 (1 + sqrt(v_1^T hat v_1)/rho) and
    lambda_1 (1 + sqrt(Tr hat)/rho), where (lambda_1, v_1) is the top
    eigenpair of D.

    sigma_ref must itself be feasible in the ball (not re-validated here).
    """
    if not (0.0 < delta < 1.0):
        raise InvalidInput(f"delta must lie in (0,1), got {delta!r}")
    if not bisect_tol > 0.0:
        raise InvalidInput(f"bisect_tol must be positive, got {bisect_tol!r}")
    rho = ball.radius
    if not rho > 0.0:
        raise InvalidInput(f"oracle requires a positive radius, got {rho!r}")
    sigma_hat = ball.center.cov
    try:
        np.linalg.cholesky(sigma_hat)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"ball center covariance is singular: {exc}") from exc
    D = as_symmetric(D, "D")
    if D.shape != sigma_hat.shape:
        raise DimensionMismatch(f"D has shape {D.shape}, ball center {sigma_hat.shape}")
    sigma_ref = np.asarray(sigma_ref, dtype=float)
    if sigma_ref.shape != sigma_hat.shape:
        raise DimensionMismatch(
            f"sigma_ref has shape {sigma_ref.shape}, ball center {sigma_hat.shape}"
        )

    w, V = sym_eig(D)
    lam1 = float(w[0])
    tol = 1e-9 * max(1.0, abs(lam1))
    if w[-1] < -tol:
        raise InvalidGradient(f"D has eigenvalue {w[-1]:.6e} below -{tol:.1e}")
    d = np.clip(w, 0.0, None)

    trace_hat = float(np.trace(sigma_hat))
    if float(np.linalg.norm(D)) <= 1e-12:
        # Vanishing linearization: every feasible point is optimal to working
        # precision, so return the center and the upper bracket endpoint.
        return sigma_hat.copy(), lam1 * (1.0 + np.sqrt(trace_hat) / rho)

    T = V.T @ sigma_hat @ V
    tdiag = np.diag(T).copy()
    c_ref = float(np.sum(sigma_ref * D))
    rho_sq = rho**2
    ftol = feas_tol(ball)

    lo = lam1 * (1.0 + np.sqrt(max(tdiag[0], 0.0)) / rho)
    hi = lam1 * (1.0 + np.sqrt(trace_hat) / rho)
    width0 = hi - lo

    gamma = hi
    for _ in range(200):
        gamma = 0.5 * (lo + hi)
        phi, dphi, value = _dual_curve(gamma, d, tdiag, rho_sq, c_ref)
        if dphi < 0.0:
            lo = gamma
        else:
            hi = gamma
        if dphi >= -ftol and value >= delta * phi:
            break
        if hi - lo <= bisect_tol * width0:
            gamma = hi  # feasible side of the bracket
            break
    else:
        gamma = hi

    c = gamma / (gamma - d)
    L = V @ (np.outer(c, c) * T) @ V.T
    return 0.5 * (L + L.T), float(gamma)


# ---------------------------------------------------------------------------
# Frank-Wolfe
# ---------------------------------------------------------------------------


def _regularity_from_parts(H, sigma_x, sigma_w, rho_x, rho_w):
    lamH = float(np.linalg.eigvalsh(H.T @ H)[-1])
    lam_min_x = float(np.linalg.eigvalsh(sigma_x)[0])
    lam_min_w = float(np.linalg.eigvalsh(sigma_w)[0])
    tx = rho_x + np.sqrt(float(np.trace(sigma_x)))
    tw = rho_w + np.sqrt(float(np.trace(sigma_w)))
    C = lamH * lam_min_w**-2 * tx**4
    beta = 2.0 / lam_min_w * (C + C * lamH**2 + lamH)
    alpha_x = lam_min_x**1.25 / (2.0 * rho_x * tx**3.5)
    alpha_w = lam_min_w**1.25 / (2.0 * rho_w * tw**3.5)
    eps_x = (lam_min_w / (tx**2 * lamH + tw**2)) ** 2
    eps_w = lamH * (lam_min_x / (tw**2 + lam_min_x * lamH)) ** 2
    return beta, min(alpha_x, alpha_w), min(eps_x, eps_w), C


def regularity_constants(instance: ProblemInstance) -> RegularityConstants:
    """Closed-form smoothness/strong-convexity/steepness constants of the instance.

    All four are strictly positive when both radii are positive and both
    nominal covariances are positive definite.
    """
    if not (instance.rho_x > 0.0 and instance.rho_w > 0.0):
        raise InvalidInput("regularity constants require strictly positive radii")
    for label, cov in (("nominal_x", instance.nominal_x.cov), ("nominal_w", instance.nominal_w.cov)):
        if float(np.linalg.eigvalsh(cov)[0]) <= 0.0:
            raise NotPositiveDefinite(f"{label} covariance is singular")
    beta, alpha, eps, C = _regularity_from_parts(
        instance.H, instance.nominal_x.cov, instance.nominal_w.cov, instance.rho_x, instance.rho_w
    )
    return RegularityConstants(beta=beta, alpha=alpha, epsilon=eps, c_aux=C)


def fw_solve(
    instance: ProblemInstance, config: FwConfig | None = None, record_iterates: bool = False
) -> SolveReport:
    """Maximize the affine-MMSE value over the covariance-ball product by Frank-Wolfe.

    Starts from the nominal covariances, stops once the surrogate gap
    g_t = <Lx - Sx, D_x> + <Lw - Sw, D_w> drops to ``gap_tol`` or after
    ``max_iters`` update steps.  A near-singular nominal signal covariance is
    accepted with eigenvalue clamping at 1e-12 and a warning (convergence
    degrades to a sublinear rate in that regime).
    """
    if config is None:
        config = FwConfig()
    if not isinstance(config, FwConfig):
        raise InvalidConfig(f"config must be an FwConfig, got {type(config).__name__}")
    if not (instance.rho_x > 0.0 and instance.rho_w > 0.0):
        raise InvalidInput("fw_solve requires strictly positive radii")
    H = instance.H
    sigma_w_hat = instance.nominal_w.cov
    try:
        np.linalg.cholesky(sigma_w_hat)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"nominal noise covariance is singular: {exc}") from exc

    wx, Vx = sym_eig(instance.nominal_x.cov)
    sigma_x_hat = instance.nominal_x.cov
    if wx[-1] < 1e-12:
        warnings.warn(
            "nominal signal covariance is singular or near-singular; eigenvalues "
            "clamped at 1e-12 (expect a sublinear convergence rate)",
            RuntimeWarning,
            stacklevel=2,
        )
        wc = np.clip(wx, 1e-12, None)
        sigma_x_hat = (Vx * wc) @ Vx.T
        sigma_x_hat = 0.5 * (sigma_x_hat + sigma_x_hat.T)

    ball_x = AmbiguityBall(MomentPair(instance.nominal_x.mean, sigma_x_hat), instance.rho_x)
    ball_w = AmbiguityBall(instance.nominal_w, instance.rho_w)

    beta_global = None
    if config.variant == "adaptive":
        beta_global, _, _, _ = _regularity_from_parts(
            H, sigma_x_hat, sigma_w_hat, instance.rho_x, instance.rho_w
        )

    sx = sigma_x_hat.copy()
    sw = sigma_w_hat.copy()
    trace: list[FwIteration] = []
    iterates: list[CovariancePair] | None = [] if record_iterates else None
    beta_prev = config.beta_init
    converged = False
    iterations = config.max_iters
    t0 = time.perf_counter()

    for t in range(config.max_iters + 1):
        value, Dx, Dw, _, _ = _mmse_core(sx, sw, H)
        Lx, _ = oracle_linmax(ball_x, sx, Dx, config.delta, config.bisect_tol)
        Lw, _ = oracle_linmax(ball_w, sw, Dw, config.delta, config.bisect_tol)
        dx = Lx - sx
        dw = Lw - sw
        gap = float(np.sum(dx * Dx) + np.sum(dw * Dw))
        if iterates is not None:
            iterates.append(CovariancePair(sx, sw))

        if gap <= config.gap_tol:
            trace.append(
                FwIteration(t, value, gap, 0.0, beta_prev, time.perf_counter() - t0)
            )
            converged = True
            iterations = t
            break
        if t == config.max_iters:
            iterations = config.max_iters
            break

        dn2 = float(np.sum(dx * dx) + np.sum(dw * dw))
        if config.variant == "vanilla":
            eta = 2.0 / (2.0 + t)
            beta_t = beta_prev
        elif config.variant == "adaptive":
            beta_t = beta_global
            eta = min(1.0, gap / (beta_t * dn2))
        else:  # fully_adaptive
            beta_t = beta_prev / config.zeta
            eta = min(1.0, gap / (beta_t * dn2))
            for _ in range(100):
                trial = _mmse_value(sx + eta * dx, sw + eta * dw, H)
                if trial >= value + eta * gap - 0.5 * eta**2 * beta_t * dn2:
                    break
                beta_t *= config.tau
                eta = min(1.0, gap / (beta_t * dn2))
            beta_prev = beta_t

        trace.append(FwIteration(t, value, gap, eta, beta_t, time.perf_counter() - t0))
        sx = sx + eta * dx
        sw = sw + eta * dw
        sx = 0.5 * (sx + sx.T)
        sw = 0.5 * (sw + sw.T)

    return SolveReport(
        trace=tuple(trace),
        pair=CovariancePair(sx, sw),
        iterations=iterations,
        converged=converged,
        iterates=tuple(iterates) if iterates is not None else None,
    )
