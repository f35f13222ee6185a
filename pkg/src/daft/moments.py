"""Positive lattice grids from spectral measures and their moment calculus.

An atomic positive matrix measure (convention: total mass ``2 pi sum_j W_j``,
so the k-th trigonometric moment is ``M_k = sum_j W_j exp(-i k theta_j)``)
produces the positive discrete analytic grid

    f(m, n) = 2 sum_j W_j (sqrt2 e^{-i theta_j} - i)^m (sqrt2 e^{i theta_j} + i)^n,

normalized so that ``f(0, 0) = 2 M_0``.  Finite sections of such grids are
congruent to block Toeplitz moment matrices through a fixed triangular
basis-change matrix: ``2 T_N = L_N F_N L_N*``.  The module also provides the
one-step positive extension probe, Herglotz evaluation and the growth
envelope of the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DimMismatch, IndexRange, Inertia, NotHermitian, NotDaf, NotPSD, PoleAt,
    Tolerances, _require_finite, _tol, as_matrix, herm, lu_solve, max_abs,
    psd_check,
)
from .lattice import DafGrid, cr_residual, extend_from_boundary
from .moebius import SQRT2, TruncatedSeries

__all__ = [
    "AtomicMeasure", "MomentSequence", "trig_moment", "daf_from_measure",
    "grid_from_measure", "f_row_from_moments", "moments_from_f_row",
    "l_matrix", "toeplitz_from_daf", "daf_from_toeplitz", "one_step_fill",
    "herglotz_eval", "phi_coeffs_from_measure", "kernel_eval_measure",
    "growth_bounds_check", "GrowthReport",
]


def _k1(theta):
    return SQRT2 * np.exp(-1j * np.asarray(theta)) - 1j


def _k2(theta):
    return SQRT2 * np.exp(1j * np.asarray(theta)) + 1j


# ---------------------------------------------------------------------------
# measures

@dataclass
class AtomicMeasure:
    """Finite positive matrix measure given as atoms ``(theta_j, W_j)``.

    ``p`` is the block size; weights must be PSD Hermitian and the angles
    distinct in [0, 2 pi).
    """

    p: int
    atoms: list = field(default_factory=list)

    def __post_init__(self) -> None:
        tol = Tolerances()
        cleaned = []
        for theta, W in self.atoms:
            theta = float(theta) % (2.0 * math.pi)
            W = as_matrix(W)
            if W.shape != (self.p, self.p):
                raise DimMismatch(f"weight shape {W.shape}, expected ({self.p}, {self.p})")
            if not psd_check(W, tol).is_psd:
                raise NotPSD("atom weights must be positive semidefinite")
            cleaned.append((theta, W))
        thetas = [t for t, _ in cleaned]
        if len(set(thetas)) != len(thetas):
            raise ValueError("atom angles must be distinct")
        self.atoms = cleaned

    @property
    def thetas(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, self.p, self.p), dtype=complex)
        return np.stack([w for _, w in self.atoms])


def trig_moment(mu: AtomicMeasure, k: int) -> np.ndarray:
    """Trigonometric moment ``M_k = sum_j W_j exp(-i k theta_j)``."""
    phase = np.exp(-1j * k * mu.thetas)
    out = np.zeros((mu.p, mu.p), dtype=complex)
    for ph, W in zip(phase, mu.weights):
        out = out + ph * W
    return out


def daf_from_measure(mu: AtomicMeasure, m: int, n: int) -> np.ndarray:
    """Grid value ``2 sum_j W_j K1(theta_j)^m K2(theta_j)^n``.

    ``K1 = sqrt2 e^{-i theta} - i`` and ``K2 = conj(K1)``; both are bounded
    away from zero, so negative indices are allowed and the closed formula
    extends the grid to the whole lattice.
    """
    w = _k1(mu.thetas) ** m * _k2(mu.thetas) ** n
    out = np.zeros((mu.p, mu.p), dtype=complex)
    for ph, W in zip(w, mu.weights):
        out = out + ph * W
    return _require_finite(2.0 * out, "measure grid value")


def grid_from_measure(mu: AtomicMeasure, M: int, N: int) -> DafGrid:
    """Grid of :func:`daf_from_measure` values over ``[0..M] x [0..N]``."""
    k1p = _k1(mu.thetas)[None, :] ** np.arange(M + 1)[:, None]
    k2p = _k2(mu.thetas)[None, :] ** np.arange(N + 1)[:, None]
    v = 2.0 * np.einsum("mj,nj,jpq->mnpq", k1p, k2p, mu.weights)
    if not mu.atoms:
        v = np.zeros((M + 1, N + 1, mu.p, mu.p), dtype=complex)
    return DafGrid(v)


# ---------------------------------------------------------------------------
# moments <-> boundary row

def f_row_from_moments(moments, m: int) -> np.ndarray:
    """Boundary value from moments:
    ``f(m,0) = 2 sum_k sqrt(2^k) C(m,k) (-i)^(m-k) M_k``."""
    blocks = [as_matrix(Mk) for Mk in moments]
    if m < 0 or m >= len(blocks):
        raise IndexRange(f"need moments up to order {m}")
    out = np.zeros_like(blocks[0])
    for k in range(m + 1):
        out = out + math.sqrt(2.0 ** k) * math.comb(m, k) * (-1j) ** (m - k) * blocks[k]
    return 2.0 * out


def moments_from_f_row(row, m: int) -> np.ndarray:
    """Inverse map: ``M_m = 2^(-m/2)/2 sum_k C(m,k) i^(m-k) f(k,0)``."""
    blocks = [as_matrix(r) for r in row]
    if m < 0 or m >= len(blocks):
        raise IndexRange(f"need boundary values up to index {m}")
    out = np.zeros_like(blocks[0])
    for k in range(m + 1):
        out = out + math.comb(m, k) * 1j ** (m - k) * blocks[k]
    return out / (2.0 * math.sqrt(2.0 ** m))


@dataclass
class MomentSequence:
    """Moments ``M_0 .. M_K`` of a spectral measure (p x p blocks)."""

    moments: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.moments, dtype=complex)
        if m.ndim == 1:
            m = m[:, None, None]
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise DimMismatch(f"moment array must be (K+1, p, p), got {m.shape}")
        self.moments = _require_finite(m, "moments")

    @property
    def order(self) -> int:
        return self.moments.shape[0] - 1

    @property
    def p(self) -> int:
        return self.moments.shape[1]

    def toeplitz(self, N: int) -> np.ndarray:
        """Block Toeplitz matrix with (j, k) block ``M_(j-k)`` (``M_-k = M_k*``)."""
        if N > self.order:
            raise IndexRange(f"need moments up to order {N}")
        p = self.p
        T = np.zeros(((N + 1) * p, (N + 1) * p), dtype=complex)
        for j in range(N + 1):
            for k in range(N + 1):
                blk = self.moments[j - k] if j >= k else herm(self.moments[k - j])
                T[j * p:(j + 1) * p, k * p:(k + 1) * p] = blk
        return T

    def is_positive(self, tol: Tolerances | None = None) -> bool:
        return psd_check(self.toeplitz(self.order), tol).is_psd


# ---------------------------------------------------------------------------
# Toeplitz congruence

def l_matrix(N: int, p: int = 1) -> np.ndarray:
    """Triangular basis-change matrix with blocks
    ``(L_N)_{m,k} = i^(m-k) C(m,k) 2^(-m/2) I_p`` for ``k <= m``.

    Row m expresses ``e^{-i m t}`` in the powers ``(sqrt2 e^{-it} - i)^k``, so
    ``L_N [ (sqrt2 e^{-it}-i)^k ]_k = [ e^{-i k t} ]_k``.
    """
    if N < 0:
        raise IndexRange("N must be non-negative")
    Ls = np.zeros((N + 1, N + 1), dtype=complex)
    for m in range(N + 1):
        for k in range(m + 1):
            Ls[m, k] = 1j ** (m - k) * math.comb(m, k) / math.sqrt(2.0 ** m)
    return np.kron(Ls, np.eye(p, dtype=complex)) if p != 1 else Ls


def toeplitz_from_daf(F, p: int = 1, tol: Tolerances | None = None) -> np.ndarray:
    """Toeplitz side of the congruence ``2 T_N = L_N F_N L_N*``."""
    F = as_matrix(F)
    if F.shape[0] != F.shape[1] or F.shape[0] % p:
        raise DimMismatch(f"section must be (N+1)p square, got {F.shape}")
    L = l_matrix(F.shape[0] // p - 1, p)
    return (L @ F @ herm(L)) / 2.0


def daf_from_toeplitz(T, p: int = 1, tol: Tolerances | None = None) -> np.ndarray:
    """Inverse congruence ``F_N = L_N^(-1) (2 T_N) L_N^(-*)``."""
    T = as_matrix(T)
    if T.shape[0] != T.shape[1] or T.shape[0] % p:
        raise DimMismatch(f"matrix must be (N+1)p square, got {T.shape}")
    L = l_matrix(T.shape[0] // p - 1, p)
    Y = lu_solve(L, 2.0 * T, tol)
    return herm(lu_solve(L, herm(Y), tol))


# ---------------------------------------------------------------------------
# one-step extension probe

def one_step_fill(F, lam, p: int = 1,
                  tol: Tolerances | None = None) -> tuple[np.ndarray, Inertia]:
    """Extend a structured section by one step and classify the result.

    Places the block ``lam`` at ``f(N+1, 0)`` (and ``lam*`` at
    ``f(0, N+1)``); every other new entry is forced by the lattice relation.
    Returns the extended section together with its inertia, so the caller
    can decide admissibility.  Raises :class:`NotDaf` when the input lacks
    the discrete analytic structure.
    """
    tol = _tol(tol)
    F = as_matrix(F)
    grid = DafGrid.from_section(F, p)
    scale = max(max_abs(F), 1e-300)
    if max_abs(F - herm(F)) > tol.eq_tol * scale:
        raise NotHermitian("section must be Hermitian")
    if grid.M >= 1 and cr_residual(grid) > tol.eq_tol * scale:
        raise NotDaf(f"structure residual {cr_residual(grid):.3e}")
    lam = as_matrix(lam)
    if lam.shape != (p, p):
        raise DimMismatch(f"extension block must be {p} x {p}")
    row = list(grid.row0()) + [lam]
    col = list(grid.col0()) + [herm(lam)]
    ext = extend_from_boundary(row, col, tol)
    F1 = ext.section()
    F1 = (F1 + herm(F1)) / 2.0
    return F1, psd_check(F1, tol)


# ---------------------------------------------------------------------------
# Herglotz transform and generating coefficients

def herglotz_eval(mu: AtomicMeasure, X, lam: complex,
                  tol: Tolerances | None = None) -> np.ndarray:
    """Herglotz transform ``iX + sum_j ((e^{i theta_j}+lam)/(e^{i theta_j}-lam)) W_j``."""
    tol = _tol(tol)
    X = np.zeros((mu.p, mu.p), dtype=complex) if X is None else as_matrix(X)
    out = 1j * X.astype(complex)
    for theta, W in mu.atoms:
        e = np.exp(1j * theta)
        if abs(e - lam) < tol.rank_tol:
            raise PoleAt(f"evaluation at the atom angle {theta}")
        out = out + ((e + lam) / (e - lam)) * W
    return out


def phi_coeffs_from_measure(mu: AtomicMeasure, order: int,
                            X=None) -> TruncatedSeries:
    """Generating series coefficients of the measure's grid.

    ``Phi_0 = M_0 + iX`` and, for m >= 1,
    ``Phi_m = 2 sqrt2 sum_j e^{-i theta_j} (sqrt2 e^{-i theta_j} - i)^(m-1) W_j``.
    """
    X = np.zeros((mu.p, mu.p), dtype=complex) if X is None else as_matrix(X)
    coeffs = [trig_moment(mu, 0) + 1j * X]
    e = np.exp(-1j * mu.thetas)
    k1 = _k1(mu.thetas)
    for m in range(1, order + 1):
        acc = np.zeros((mu.p, mu.p), dtype=complex)
        for j, (_, W) in enumerate(mu.atoms):
            acc = acc + e[j] * k1[j] ** (m - 1) * W
        coeffs.append(2.0 * SQRT2 * acc)
    return TruncatedSeries(np.stack(coeffs))


def kernel_eval_measure(mu: AtomicMeasure, lam: complex, nu: complex,
                        tol: Tolerances | None = None) -> np.ndarray:
    """Closed-form kernel value
    ``2 sum_j W_j / ((1 - lam K1_j)(1 - nu~ K2_j))``."""
    tol = _tol(tol)
    nub = complex(nu).conjugate()
    out = np.zeros((mu.p, mu.p), dtype=complex)
    for theta, W in mu.atoms:
        d1 = 1.0 - lam * complex(_k1(theta))
        d2 = 1.0 - nub * complex(_k2(theta))
        if min(abs(d1), abs(d2)) < tol.rank_tol:
            raise PoleAt("kernel evaluated at a pole of an atom term")
        out = out + W / (d1 * d2)
    return 2.0 * out


# ---------------------------------------------------------------------------
# growth envelope

@dataclass(frozen=True)
class GrowthReport:
    """Outcome of the diagonal/off-diagonal growth envelope checks."""

    up_to: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def growth_bounds_check(mu: AtomicMeasure, up_to: int,
                        tol: Tolerances | None = None) -> GrowthReport:
    """Check the growth envelope of a positive measure grid (trace sense).

    Verifies ``2 m0 (sqrt2 - 1)^(2n) <= tr f(n,n) <= 2 m0 (sqrt2 + 1)^(2n)``
    and ``|tr f(m,n)| <= 2 m0 (sqrt2 + 1)^(m+n)``, where ``m0 = tr M_0``.
    Violations are listed in the report; nothing raises.
    """
    tol = _tol(tol)
    m0 = float(np.real(np.trace(trig_moment(mu, 0))))
    lo, hi = SQRT2 - 1.0, SQRT2 + 1.0
    bad = []
    slack = tol.eq_tol * max(1.0, 2.0 * m0) if m0 else tol.eq_tol
    for n in range(up_to + 1):
        t = float(np.real(np.trace(daf_from_measure(mu, n, n))))
        lo_b, hi_b = 2.0 * m0 * lo ** (2 * n), 2.0 * m0 * hi ** (2 * n)
        if t < lo_b - slack * max(1.0, lo_b):
            bad.append(("diag-low", n, n, t, lo_b))
        if t > hi_b + slack * max(1.0, hi_b):
            bad.append(("diag-high", n, n, t, hi_b))
    for m in range(up_to + 1):
        for n in range(up_to + 1):
            t = abs(complex(np.trace(daf_from_measure(mu, m, n))))
            bnd = 2.0 * m0 * hi ** (m + n)
            if t > bnd + slack * max(1.0, bnd):
                bad.append(("offdiag", m, n, t, bnd))
    return GrowthReport(up_to, tuple(bad))
