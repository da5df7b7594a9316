"""Linear SDP reformulations of the robust estimation problem, as portable files.

Two encodings are produced for external cross-validation, both in the SDPA
sparse format (.dat-s) under the convention

    min c^T x   subject to   sum_k x_k F_k - F0 >= 0 (block diagonal),

negative block sizes marking diagonal blocks.  The estimator-side problem
minimizes the worst-case risk over (A, gamma_x, gamma_w, Ux, Vx, Uw, Vw); the
covariance-side problem maximizes the MMSE value over (Sx, Sw, Vx, Vw, U) and
is emitted in minimization form (negated objective).  Symmetric matrix
variables enter as their upper triangles in row-major order ("vech").

Variable order, estimator side: A row-major, gamma_x, gamma_w, vech(Ux),
vech(Vx), vech(Uw), vech(Vw).  Covariance side: vech(Sx), vech(Sw), vech(Vx),
vech(Vw), vech(U).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInput, NotPositiveDefinite
from .dual_solver import CovariancePair, ProblemInstance
from .linalg import psd_sqrt, solve_spd

__all__ = [
    "SdpProblem",
    "emit_primal_sdp",
    "emit_dual_sdp",
    "render_dat_s",
    "parse_dat_s",
    "default_header",
    "instance_digest",
    "dual_feasible_embedding",
    "assemble_blocks",
    "feasibility_margins",
    "objective_value",
]


@dataclass(frozen=True)
class SdpProblem:
    """A block SDP in sparse triplet form.

    ``triplets`` holds (variable k >= 1, block, i, j, value) with i <= j and
    1-based indices throughout; ``constant`` holds the F0 entries as
    (block, i, j, value).  ``var_names`` is debugging metadata and does not
    participate in equality.
    """

    block_dims: tuple[int, ...]
    objective: tuple[float, ...]
    triplets: tuple[tuple[int, int, int, int, float], ...]
    constant: tuple[tuple[int, int, int, float], ...]
    var_names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        nblocks = len(self.block_dims)
        nvars = len(self.objective)
        if nblocks == 0 or any(b == 0 for b in self.block_dims):
            raise InvalidInput("block dimensions must be nonzero")
        for blk, i, j, _v in self.constant:
            self._check_position(blk, i, j, nblocks)
        for k, blk, i, j, _v in self.triplets:
            if not (1 <= k <= nvars):
                raise InvalidInput(f"triplet references variable {k} of {nvars}")
            self._check_position(blk, i, j, nblocks)

    def _check_position(self, blk: int, i: int, j: int, nblocks: int):
        if not (1 <= blk <= nblocks):
            raise InvalidInput(f"entry references block {blk} of {nblocks}")
        size = abs(self.block_dims[blk - 1])
        if not (1 <= i <= j <= size):
            raise InvalidInput(f"entry position ({i},{j}) invalid for block of size {size}")
        if self.block_dims[blk - 1] < 0 and i != j:
            raise InvalidInput(f"diagonal block {blk} admits only diagonal entries, got ({i},{j})")

    @property
    def n_vars(self) -> int:
        return len(self.objective)


class _Builder:
    def __init__(self, block_dims, var_names):
        self.block_dims = tuple(int(b) for b in block_dims)
        self.var_names = tuple(var_names)
        self.objective = [0.0] * len(self.var_names)
        self._tri: dict[tuple[int, int, int, int], float] = {}
        self._const: dict[tuple[int, int, int], float] = {}

    def cost(self, k: int, v: float):
        self.objective[k - 1] += float(v)

    def add(self, k: int, blk: int, i: int, j: int, v: float):
        if i > j:
            i, j = j, i
        self._tri[(k, blk, i, j)] = self._tri.get((k, blk, i, j), 0.0) + float(v)

    def add_const(self, blk: int, i: int, j: int, v: float):
        if i > j:
            i, j = j, i
        self._const[(blk, i, j)] = self._const.get((blk, i, j), 0.0) + float(v)

    def build(self) -> SdpProblem:
        triplets = tuple(
            (k, blk, i, j, v)
            for (k, blk, i, j), v in sorted(self._tri.items())
            if v != 0.0
        )
        constant = tuple(
            (blk, i, j, v) for (blk, i, j), v in sorted(self._const.items()) if v != 0.0
        )
        return SdpProblem(
            block_dims=self.block_dims,
            objective=tuple(self.objective),
            triplets=triplets,
            constant=constant,
            var_names=self.var_names,
        )


def _vech_names(tag: str, d: int) -> list[str]:
    return [f"{tag}[{p},{q}]" for p in range(1, d + 1) for q in range(p, d + 1)]


def _vech_offset(p: int, q: int, d: int) -> int:
    """0-based position of the (p,q) upper-triangle entry, row-major, 1-based p <= q."""
    return (p - 1) * d - (p - 1) * (p - 2) // 2 + (q - p)


def _vech_pairs(d: int):
    return [(p, q) for p in range(1, d + 1) for q in range(p, d + 1)]


def emit_primal_sdp(instance: ProblemInstance, use_cholesky: bool = False) -> SdpProblem:
    """Encode the estimator-side worst-case-risk minimization as a linear SDP.

    Four PSD blocks of sizes 2n, 2n, 2m, m+n couple the variables
    (A, gamma_x, gamma_w, Ux, Vx, Uw, Vw); the objective is
    gamma_x (rho_x^2 - Tr Sx_hat) + Tr Ux + gamma_w (rho_w^2 - Tr Sw_hat) + Tr Uw.
    With ``use_cholesky`` the nominal square roots are replaced by lower
    Cholesky factors (numerically sturdier for ill-conditioned nominals).
    """
    n, m = instance.n, instance.m
    H = instance.H
    Sx = instance.nominal_x.cov
    Sw = instance.nominal_w.cov
    if use_cholesky:
        try:
            Fx = np.linalg.cholesky(Sx)
            Fw = np.linalg.cholesky(Sw)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(
                f"use_cholesky requires factorizable nominal covariances: {exc}"
            ) from exc
    else:
        Fx = psd_sqrt(Sx)
        Fw = psd_sqrt(Sw)

    names = (
        [f"A[{i},{j}]" for i in range(1, n + 1) for j in range(1, m + 1)]
        + ["gamma_x", "gamma_w"]
        + _vech_names("Ux", n)
        + _vech_names("Vx", n)
        + _vech_names("Uw", m)
        + _vech_names("Vw", m)
    )
    nx = n * (n + 1) // 2
    mv = m * (m + 1) // 2
    k_A = lambda i, j: (i - 1) * m + j
    k_gx = n * m + 1
    k_gw = n * m + 2
    k_ux = lambda p, q: n * m + 2 + 1 + _vech_offset(p, q, n)
    k_vx = lambda p, q: n * m + 2 + nx + 1 + _vech_offset(p, q, n)
    k_uw = lambda p, q: n * m + 2 + 2 * nx + 1 + _vech_offset(p, q, m)
    k_vw = lambda p, q: n * m + 2 + 2 * nx + mv + 1 + _vech_offset(p, q, m)

    b = _Builder([2 * n, 2 * n, 2 * m, m + n], names)
    b.cost(k_gx, instance.rho_x**2 - float(np.trace(Sx)))
    b.cost(k_gw, instance.rho_w**2 - float(np.trace(Sw)))
    for p in range(1, n + 1):
        b.cost(k_ux(p, p), 1.0)
    for p in range(1, m + 1):
        b.cost(k_uw(p, p), 1.0)

    # Block 1: [Ux, gamma_x * Fx^T; *, Vx] >= 0 (Fx symmetric in the sqrt variant).
    for p, q in _vech_pairs(n):
        b.add(k_ux(p, q), 1, p, q, 1.0)
        b.add(k_vx(p, q), 1, n + p, n + q, 1.0)
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            v = Fx[q - 1, p - 1]  # (Fx^T)_{pq}
            if v != 0.0:
                b.add(k_gx, 1, p, n + q, v)

    # Block 2: [gamma_x I - Vx, I - H^T A^T; *, I] >= 0.
    for p in range(1, n + 1):
        b.add(k_gx, 2, p, p, 1.0)
        b.add_const(2, p, n + p, -1.0)
        b.add_const(2, n + p, n + p, -1.0)
    for p, q in _vech_pairs(n):
        b.add(k_vx(p, q), 2, p, q, -1.0)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            for r in range(1, n + 1):
                v = -H[j - 1, r - 1]
                if v != 0.0:
                    b.add(k_A(i, j), 2, r, n + i, v)

    # Block 3: [Uw, gamma_w * Fw^T; *, Vw] >= 0.
    for p, q in _vech_pairs(m):
        b.add(k_uw(p, q), 3, p, q, 1.0)
        b.add(k_vw(p, q), 3, m + p, m + q, 1.0)
    for p in range(1, m + 1):
        for q in range(1, m + 1):
            v = Fw[q - 1, p - 1]
            if v != 0.0:
                b.add(k_gw, 3, p, m + q, v)

    # Block 4: [gamma_w I - Vw, A^T; *, I] >= 0.
    for p in range(1, m + 1):
        b.add(k_gw, 4, p, p, 1.0)
    for p, q in _vech_pairs(m):
        b.add(k_vw(p, q), 4, p, q, -1.0)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            b.add(k_A(i, j), 4, j, m + i, 1.0)
    for p in range(1, n + 1):
        b.add_const(4, m + p, m + p, -1.0)

    return b.build()


def emit_dual_sdp(instance: ProblemInstance) -> SdpProblem:
    """Encode the covariance-side MMSE maximization as a linear SDP (min form).

    Blocks: two square-root LMIs (2n, 2m), one diagonal block carrying both
    ball trace inequalities, the (n+m) Schur block tying U to the covariance
    pair, the two spectral lower bounds, and explicit PSD blocks for Vx, Vw.
    The objective is Tr U - Tr Sx, i.e. the negated MMSE value.
    """
    n, m = instance.n, instance.m
    H = instance.H
    Sx = instance.nominal_x.cov
    Sw = instance.nominal_w.cov
    lam_w = float(np.linalg.eigvalsh(Sw)[0])
    if lam_w <= 0.0:
        raise NotPositiveDefinite("the nominal noise covariance must be positive definite")
    lam_x = max(float(np.linalg.eigvalsh(Sx)[0]), 0.0)
    Rx = psd_sqrt(Sx)
    Rw = psd_sqrt(Sw)

    names = (
        _vech_names("Sx", n)
        + _vech_names("Sw", m)
        + _vech_names("Vx", n)
        + _vech_names("Vw", m)
        + _vech_names("U", n)
    )
    nx = n * (n + 1) // 2
    mv = m * (m + 1) // 2
    k_sx = lambda p, q: 1 + _vech_offset(p, q, n)
    k_sw = lambda p, q: nx + 1 + _vech_offset(p, q, m)
    k_vx = lambda p, q: nx + mv + 1 + _vech_offset(p, q, n)
    k_vw = lambda p, q: 2 * nx + mv + 1 + _vech_offset(p, q, m)
    k_u = lambda p, q: 2 * nx + 2 * mv + 1 + _vech_offset(p, q, n)

    b = _Builder([2 * n, 2 * m, -2, n + m, n, m, n, m], names)
    for p in range(1, n + 1):
        b.cost(k_sx(p, p), -1.0)
        b.cost(k_u(p, p), 1.0)

    def sqrt_block(blk: int, d: int, R, k_s, k_v):
        for p, q in _vech_pairs(d):
            for i in range(1, d + 1):
                for j in range(i, d + 1):
                    if p == q:
                        v = R[i - 1, p - 1] * R[p - 1, j - 1]
                    else:
                        v = R[i - 1, p - 1] * R[q - 1, j - 1] + R[i - 1, q - 1] * R[p - 1, j - 1]
                    if v != 0.0:
                        b.add(k_s(p, q), blk, i, j, v)
            b.add(k_v(p, q), blk, p, d + q, 1.0)
            if p != q:
                b.add(k_v(p, q), blk, q, d + p, 1.0)
        for p in range(1, d + 1):
            b.add_const(blk, d + p, d + p, -1.0)

    # Blocks 1-2: [R S R, V; V, I] >= 0 for each marginal.
    sqrt_block(1, n, Rx, k_sx, k_vx)
    sqrt_block(2, m, Rw, k_sw, k_vw)

    # Block 3 (diagonal): the two ball trace inequalities.
    b.add_const(3, 1, 1, float(np.trace(Sx)) - instance.rho_x**2)
    b.add_const(3, 2, 2, float(np.trace(Sw)) - instance.rho_w**2)
    for p in range(1, n + 1):
        b.add(k_sx(p, p), 3, 1, 1, -1.0)
        b.add(k_vx(p, p), 3, 1, 1, 2.0)
    for p in range(1, m + 1):
        b.add(k_sw(p, p), 3, 2, 2, -1.0)
        b.add(k_vw(p, p), 3, 2, 2, 2.0)

    # Block 4: [U, Sx H^T; H Sx, H Sx H^T + Sw] >= 0.
    for p, q in _vech_pairs(n):
        b.add(k_u(p, q), 4, p, q, 1.0)
        for j in range(1, m + 1):
            if p == q:
                v = H[j - 1, p - 1]
                if v != 0.0:
                    b.add(k_sx(p, q), 4, p, n + j, v)
            else:
                v = H[j - 1, q - 1]
                if v != 0.0:
                    b.add(k_sx(p, q), 4, p, n + j, v)
                v = H[j - 1, p - 1]
                if v != 0.0:
                    b.add(k_sx(p, q), 4, q, n + j, v)
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                if p == q:
                    v = H[i - 1, p - 1] * H[j - 1, p - 1]
                else:
                    v = H[i - 1, p - 1] * H[j - 1, q - 1] + H[i - 1, q - 1] * H[j - 1, p - 1]
                if v != 0.0:
                    b.add(k_sx(p, q), 4, n + i, n + j, v)
    for p, q in _vech_pairs(m):
        b.add(k_sw(p, q), 4, n + p, n + q, 1.0)

    # Blocks 5-6: spectral lower bounds Sx >= lam_min(Sx_hat) I, Sw >= lam_min(Sw_hat) I.
    for p, q in _vech_pairs(n):
        b.add(k_sx(p, q), 5, p, q, 1.0)
    for p in range(1, n + 1):
        b.add_const(5, p, p, lam_x)
    for p, q in _vech_pairs(m):
        b.add(k_sw(p, q), 6, p, q, 1.0)
    for p in range(1, m + 1):
        b.add_const(6, p, p, lam_w)

    # Blocks 7-8: Vx >= 0, Vw >= 0.
    for p, q in _vech_pairs(n):
        b.add(k_vx(p, q), 7, p, q, 1.0)
    for p, q in _vech_pairs(m):
        b.add(k_vw(p, q), 8, p, q, 1.0)

    return b.build()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def render_dat_s(problem: SdpProblem, comments=()) -> str:
    """Serialize to SDPA sparse format; comment lines are prefixed with '* '."""
    lines = [f"* {c}" for c in comments]
    lines.append(str(problem.n_vars))
    lines.append(str(len(problem.block_dims)))
    lines.append(" ".join(str(d) for d in problem.block_dims))
    lines.append(" ".join(_fmt(c) for c in problem.objective))
    for blk, i, j, v in problem.constant:
        lines.append(f"0 {blk} {i} {j} {_fmt(v)}")
    for k, blk, i, j, v in problem.triplets:
        lines.append(f"{k} {blk} {i} {j} {_fmt(v)}")
    return "\n".join(lines) + "\n"


def parse_dat_s(text: str) -> SdpProblem:
    """Parse the SDPA sparse format produced by :func:`render_dat_s`.

    Tolerates the usual format variations: comment lines starting with '*' or
    '"', and brace/comma-decorated block-size lines.
    """
    rows = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.lstrip().startswith(("*", '"'))
    ]
    if len(rows) < 4:
        raise InvalidInput("truncated SDPA data: need at least 4 header lines")

    def clean(row: str) -> list[str]:
        for ch in "{}(),":
            row = row.replace(ch, " ")
        return row.split()

    try:
        n_vars = int(clean(rows[0])[0])
        n_blocks = int(clean(rows[1])[0])
        block_dims = tuple(int(t) for t in clean(rows[2]))
        objective = tuple(float(t) for t in clean(rows[3]))
    except (ValueError, IndexError) as exc:
        raise InvalidInput(f"malformed SDPA header: {exc}") from exc
    if len(block_dims) != n_blocks:
        raise InvalidInput(
            f"block count {n_blocks} does not match {len(block_dims)} block sizes"
        )
    if len(objective) != n_vars:
        raise InvalidInput(
            f"variable count {n_vars} does not match {len(objective)} objective entries"
        )
    triplets = []
    constant = []
    for row in rows[4:]:
        parts = clean(row)
        if len(parts) != 5:
            raise InvalidInput(f"malformed entry line: {row!r}")
        try:
            k, blk, i, j = (int(t) for t in parts[:4])
            v = float(parts[4])
        except ValueError as exc:
            raise InvalidInput(f"malformed entry line {row!r}: {exc}") from exc
        if k == 0:
            constant.append((blk, i, j, v))
        else:
            triplets.append((k, blk, i, j, v))
    return SdpProblem(
        block_dims=block_dims,
        objective=objective,
        triplets=tuple(sorted(triplets)),
        constant=tuple(sorted(constant)),
    )


def instance_digest(instance: ProblemInstance) -> str:
    """Short content hash of the instance data, for file headers."""
    h = hashlib.sha256()
    for arr in (
        instance.H,
        instance.nominal_x.mean,
        instance.nominal_x.cov,
        instance.nominal_w.mean,
        instance.nominal_w.cov,
    ):
        a = np.ascontiguousarray(arr, dtype=float)
        h.update(np.asarray(a.shape, dtype=np.int64).tobytes())
        h.update(a.tobytes())
    h.update(np.asarray([instance.rho_x, instance.rho_w], dtype=float).tobytes())
    return h.hexdigest()[:12]


def default_header(instance: ProblemInstance, kind: str) -> list[str]:
    return [
        f"drmmse {kind} export",
        f"instance sha256:{instance_digest(instance)} rho_x={instance.rho_x!r} rho_w={instance.rho_w!r}",
    ]


# ---------------------------------------------------------------------------
# Feasible-point embedding and checking
# ---------------------------------------------------------------------------


def _vech(S) -> list[float]:
    d = S.shape[0]
    return [float(S[p - 1, q - 1]) for p in range(1, d + 1) for q in range(p, d + 1)]


def dual_feasible_embedding(pair: CovariancePair, instance: ProblemInstance) -> NDArray:
    """Variable vector of :func:`emit_dual_sdp` for a feasible covariance pair.

    Completes (Sx, Sw) with V-blocks from matrix square roots and
    U = Sx H^T G^{-1} H Sx, so a pair returned by a converged solve satisfies
    every emitted constraint up to solver tolerance.
    """
    Sx, Sw = pair.sigma_x, pair.sigma_w
    H = instance.H
    Rx = psd_sqrt(instance.nominal_x.cov)
    Rw = psd_sqrt(instance.nominal_w.cov)
    Vx = psd_sqrt(Rx @ Sx @ Rx)
    Vw = psd_sqrt(Rw @ Sw @ Rw)
    HS = H @ Sx
    G = HS @ H.T + Sw
    U = HS.T @ solve_spd(0.5 * (G + G.T), HS)
    U = 0.5 * (U + U.T)
    return np.array(_vech(Sx) + _vech(Sw) + _vech(Vx) + _vech(Vw) + _vech(U))


def assemble_blocks(problem: SdpProblem, x) -> list[NDArray]:
    """Dense value of each block at the variable vector x (vectors for diagonal blocks)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n_vars,):
        raise InvalidInput(f"x must have shape ({problem.n_vars},), got {x.shape}")
    blocks: list[NDArray] = []
    for d in problem.block_dims:
        blocks.append(np.zeros(abs(d)) if d < 0 else np.zeros((d, d)))

    def bump(blk, i, j, v):
        B = blocks[blk - 1]
        if B.ndim == 1:
            B[i - 1] += v
        else:
            B[i - 1, j - 1] += v
            if i != j:
                B[j - 1, i - 1] += v

    for blk, i, j, v in problem.constant:
        bump(blk, i, j, -v)
    for k, blk, i, j, v in problem.triplets:
        bump(blk, i, j, x[k - 1] * v)
    return blocks


def feasibility_margins(problem: SdpProblem, x) -> list[float]:
    """Smallest eigenvalue (PSD blocks) or entry (diagonal blocks) of each block at x."""
    margins = []
    for B in assemble_blocks(problem, x):
        if B.ndim == 1:
            margins.append(float(B.min()))
        else:
            margins.append(float(np.linalg.eigvalsh(0.5 * (B + B.T))[0]))
    return margins


def objective_value(problem: SdpProblem, x) -> float:
    """The (minimization-form) objective c^T x."""
    x = np.asarray(x, dtype=float)
    return float(np.dot(np.asarray(problem.objective), x))
