"""Gelbrich distance between mean/covariance pairs and the ambiguity balls built from it.

The squared distance between ``(mu1, S1)`` and ``(mu2, S2)`` is

    ||mu1 - mu2||^2 + Tr[S1 + S2 - 2 (S2^{1/2} S1 S2^{1/2})^{1/2}],

a metric on the space of mean vectors paired with PSD covariance matrices.  An
ambiguity ball collects all moment pairs within a radius ``rho`` of a nominal
pair.  For product (block-diagonal) structures the squared distance splits into
the sum of the blockwise squared distances, which is how
:func:`product_gelbrich_sq` computes it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionMismatch, InvalidInput
from .linalg import as_psd, trace_sqrt_product

__all__ = [
    "MomentPair",
    "AmbiguityBall",
    "gelbrich_distance",
    "cov_constraint_value",
    "trace_bound",
    "product_gelbrich_sq",
    "feas_tol",
]


def _frozen_array(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MomentPair:
    """A mean vector together with a PSD covariance matrix of matching dimension."""

    mean: NDArray
    cov: NDArray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        if mean.ndim != 1:
            raise InvalidInput(f"mean must be 1-D, got shape {mean.shape}")
        if not np.all(np.isfinite(mean)):
            raise InvalidInput("mean contains non-finite entries")
        cov = as_psd(self.cov, "cov")
        if cov.shape[0] != mean.shape[0]:
            raise DimensionMismatch(
                f"mean has length {mean.shape[0]} but cov has shape {cov.shape}"
            )
        object.__setattr__(self, "mean", _frozen_array(mean))
        object.__setattr__(self, "cov", _frozen_array(cov))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class AmbiguityBall:
    """All moment pairs within Gelbrich distance ``radius`` of ``center``."""

    center: MomentPair
    radius: float

    def __post_init__(self):
        r = float(self.radius)
        if not np.isfinite(r) or r < 0.0:
            raise InvalidInput(f"radius must be a finite nonnegative number, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.dim


def gelbrich_distance(p1: MomentPair, p2: MomentPair) -> float:
    """Gelbrich distance between two moment pairs (a metric; zero iff equal pairs)."""
    if p1.dim != p2.dim:
        raise DimensionMismatch(f"dimension {p1.dim} vs {p2.dim}")
    mean_sq = float(np.sum((p1.mean - p2.mean) ** 2))
    cov_sq = (
        float(np.trace(p1.cov) + np.trace(p2.cov))
        - 2.0 * trace_sqrt_product(p1.cov, p2.cov)
    )
    # The covariance term is a squared distance; clamp the rounding noise.
    return float(np.sqrt(mean_sq + max(cov_sq, 0.0)))


def cov_constraint_value(sigma, ball: AmbiguityBall) -> float:
    """Slack of the covariance ball constraint at ``sigma``.

    Returns ``Tr[sigma + center - 2 (center^{1/2} sigma center^{1/2})^{1/2}] - radius^2``;
    nonpositive values mean ``sigma`` lies in the covariance projection of the ball.
    """
    sigma = as_psd(sigma, "sigma")
    c = ball.center.cov
    if sigma.shape != c.shape:
        raise DimensionMismatch(f"sigma has shape {sigma.shape}, ball center {c.shape}")
    val = float(np.trace(sigma) + np.trace(c)) - 2.0 * trace_sqrt_product(sigma, c)
    return val - ball.radius**2


def trace_bound(ball: AmbiguityBall) -> float:
    """Upper bound ``(radius + sqrt(Tr[center]))^2`` on the trace of any feasible covariance."""
    return (ball.radius + float(np.sqrt(np.trace(ball.center.cov)))) ** 2


def product_gelbrich_sq(
    px1: MomentPair, pw1: MomentPair, px2: MomentPair, pw2: MomentPair
) -> float:
    """Squared Gelbrich distance between two block-diagonal (product) moment pairs.

    Computed blockwise: the squared distance of the stacked pairs equals the sum
    of the squared distances of the blocks.
    """
    return gelbrich_distance(px1, px2) ** 2 + gelbrich_distance(pw1, pw2) ** 2


def feas_tol(ball: AmbiguityBall) -> float:
    """Feasibility tolerance ``1e-8 * (1 + radius^2)`` used for ball-membership checks."""
    return 1e-8 * (1.0 + ball.radius**2)
