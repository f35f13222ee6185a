"""Discrete analytic function grids on the lattice quadrant.

A matrix-valued function ``f(m, n)`` on the quadrant is discrete analytic
when every unit square satisfies

    f(m,n) + i f(m+1,n) - i f(m,n+1) - f(m+1,n+1) = 0.

This module holds the residual of that relation, the boundary-driven
extension, the lattice power basis ``z^(u)`` with its resolvent calculus,
rational evaluations along that basis, and the two-operator representation
``f(m,n) = C A1^m A2^n B``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    CornerMismatch, DimMismatch, DivergenceWarning, IndexRange,
    PairConditionWarning, Singular, SpectrumClash, Tolerances, TooSmall,
    _require_finite, _require_square, _tol, as_matrix, lu_solve, max_abs,
)

__all__ = [
    "ALPHA_PLUS", "ALPHA_MINUS", "DafGrid", "cr_residual",
    "extend_from_boundary", "daf_power", "daf_power_series",
    "odot_resolvent", "rational_daf_eval", "OperatorPair",
    "pair_condition_residual", "a2_from_a1", "pair_daf_eval",
    "grid_from_pair",
]

ALPHA_PLUS = (1.0 + 1.0j) / 2.0
ALPHA_MINUS = (1.0 - 1.0j) / 2.0


# ---------------------------------------------------------------------------
# grids

@dataclass
class DafGrid:
    """Rectangular array of p x q blocks ``f(m, n)``, m = 0..M, n = 0..N.

    ``values[m, n]`` is the block at lattice point ``(m, n)``; the first
    index runs along the horizontal axis, the second along the vertical one.
    A 2-D array is accepted for scalar grids and lifted to 1 x 1 blocks.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 2:
            v = v[:, :, None, None]
        if v.ndim != 4:
            raise DimMismatch(f"grid values must be 4-D, got shape {v.shape}")
        self.values = _require_finite(v, "grid")

    @property
    def M(self) -> int:
        return self.values.shape[0] - 1

    @property
    def N(self) -> int:
        return self.values.shape[1] - 1

    @property
    def p(self) -> int:
        return self.values.shape[2]

    @property
    def q(self) -> int:
        return self.values.shape[3]

    def block(self, m: int, n: int) -> np.ndarray:
        return self.values[m, n]

    def row0(self) -> np.ndarray:
        """Boundary values ``f(m, 0)`` as an (M+1, p, q) array."""
        return self.values[:, 0]

    def col0(self) -> np.ndarray:
        """Boundary values ``f(0, n)`` as an (N+1, p, q) array."""
        return self.values[0, :]

    def symmetry_residual(self) -> float:
        """Largest deviation from ``f(m, n) = f(n, m)*`` (square grids)."""
        if self.M != self.N or self.p != self.q:
            raise DimMismatch("symmetry needs a square grid of square blocks")
        return max_abs(self.values - self.values.transpose(1, 0, 3, 2).conj())

    def section(self) -> np.ndarray:
        """Assemble the finite section matrix ``(f(m, n))_{m,n}``.

        The result is the (M+1)p x (N+1)q block matrix with row-block index
        m and column-block index n.
        """
        M1, N1, p, q = self.values.shape
        return self.values.transpose(0, 2, 1, 3).reshape(M1 * p, N1 * q)

    @classmethod
    def from_section(cls, F, p: int = 1, q: int | None = None) -> "DafGrid":
        """Split a finite section matrix back into a block grid."""
        F = as_matrix(F)
        q = p if q is None else q
        if p < 1 or q < 1 or F.shape[0] % p or F.shape[1] % q:
            raise DimMismatch(f"section {F.shape} not divisible into {p}x{q} blocks")
        M1, N1 = F.shape[0] // p, F.shape[1] // q
        vals = F.reshape(M1, p, N1, q).transpose(0, 2, 1, 3)
        return cls(vals.copy())

    @classmethod
    def constant(cls, c, M: int, N: int) -> "DafGrid":
        """Grid with every lattice value equal to the block ``c``."""
        c = as_matrix(c)
        return cls(np.broadcast_to(c, (M + 1, N + 1) + c.shape).copy())


def _grid_values(g) -> np.ndarray:
    return g.values if isinstance(g, DafGrid) else DafGrid(np.asarray(g)).values


def cr_residual(grid) -> float:
    """Max-norm residual of the discrete Cauchy-Riemann relation.

    Largest entrywise modulus, over all unit squares, of
    ``f(m,n) + i f(m+1,n) - i f(m,n+1) - f(m+1,n+1)``.
    """
    v = _grid_values(grid)
    if v.shape[0] < 2 or v.shape[1] < 2:
        raise TooSmall("need at least a 2 x 2 grid")
    res = v[:-1, :-1] + 1j * v[1:, :-1] - 1j * v[:-1, 1:] - v[1:, 1:]
    return max_abs(res)


def extend_from_boundary(row, col, tol: Tolerances | None = None) -> DafGrid:
    """Fill the quadrant from boundary values ``f(., 0)`` and ``f(0, .)``.

    Uses the recurrence ``f(m+1,n+1) = f(m,n) + i f(m+1,n) - i f(m,n+1)``,
    so the resulting grid satisfies the lattice relation exactly.  Raises
    :class:`CornerMismatch` when ``row[0] != col[0]``.
    """
    tol = _tol(tol)
    row = [as_matrix(r) for r in row]
    col = [as_matrix(c) for c in col]
    if not row or not col:
        raise TooSmall("boundary data must be non-empty")
    if any(r.shape != row[0].shape for r in row + col):
        raise DimMismatch("boundary blocks must share dimensions")
    scale = max(max(max_abs(r) for r in row + col), 1e-300)
    if max_abs(row[0] - col[0]) > tol.eq_tol * scale:
        raise CornerMismatch(
            f"row[0] and col[0] differ by {max_abs(row[0] - col[0]):.3e}")
    M, N = len(row) - 1, len(col) - 1
    p, q = row[0].shape
    v = np.zeros((M + 1, N + 1, p, q), dtype=complex)
    v[:, 0] = np.stack(row)
    v[0, :] = np.stack(col)
    for m in range(M):
        v[m + 1, 1:] = v[m, :-1] + 1j * v[m + 1, :-1] - 1j * v[m, 1:]
    return DafGrid(v)


# ---------------------------------------------------------------------------
# lattice powers z^(u) and the resolvent calculus

def _binom_series(c: complex, e: int, order: int) -> np.ndarray:
    """Coefficients of ``(1 + c t)^e`` up to ``t^order``, any integer ``e``."""
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, order + 1):
        out[k] = out[k - 1] * c * (e - k + 1) / k
    return out


def _conv(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    return np.convolve(a, b)[: order + 1]


def daf_power_series(m: int, n: int, order: int) -> np.ndarray:
    """Coefficients of ``(1+t)^m ((1 + a+ t)/(1 + a- t))^n`` up to ``t^order``.

    The u-th coefficient is the lattice power ``z^(u)`` at ``z = m + n i``,
    where ``a+- = (1 +- i)/2``.
    """
    s = _binom_series(1.0, m, order)
    s = _conv(s, _binom_series(ALPHA_PLUS, n, order), order)
    return _conv(s, _binom_series(ALPHA_MINUS, -n, order), order)


def daf_power(m: int, n: int, u: int) -> complex:
    """Lattice power ``z^(u)`` at the point ``z = m + n i``."""
    if u < 0:
        raise IndexRange("power index must be non-negative")
    return complex(daf_power_series(m, n, u)[u])


def _int_matrix_power(A: np.ndarray, k: int, tol: Tolerances,
                      err=Singular) -> np.ndarray:
    if k >= 0:
        return np.linalg.matrix_power(A, k)
    try:
        Ainv = lu_solve(A, np.eye(A.shape[0], dtype=complex), tol)
    except Singular as exc:
        raise err(str(exc)) from exc
    return np.linalg.matrix_power(Ainv, -k)


def odot_resolvent(A, m: int, n: int, tol: Tolerances | None = None) -> np.ndarray:
    """Lattice resolvent ``(I + A)^m (I + a+ A)^n (I + a- A)^{-n}``.

    Matrix analogue of the geometric series along the lattice power basis.
    Raises :class:`SpectrumClash` when a factor whose inverse is required
    (``I + a- A`` for n > 0) is singular.
    """
    tol = _tol(tol)
    A = _require_square(as_matrix(A))
    eye = np.eye(A.shape[0], dtype=complex)
    out = _int_matrix_power(eye + A, m, tol, SpectrumClash)
    out = out @ _int_matrix_power(eye + ALPHA_PLUS * A, n, tol, SpectrumClash)
    out = out @ _int_matrix_power(eye + ALPHA_MINUS * A, -n, tol, SpectrumClash)
    return _require_finite(out, "lattice resolvent")


def _gelfand_radius_proxy(A: np.ndarray, squarings: int = 5) -> float:
    """Spectral-radius estimate ``norm(A^k)^(1/k)`` with ``k = 2^squarings``.

    Powers are renormalized after each squaring so the estimate survives
    growth far outside the float range.
    """
    if A.shape[0] == 0:
        return 0.0
    B = np.asarray(A, dtype=complex)
    acc = 0.0
    for j in range(1, squarings + 1):
        B = B @ B
        nrm = float(np.linalg.norm(B))
        if nrm == 0.0:
            return 0.0
        acc += math.log(nrm) / (2.0 ** j)
        B = B / nrm
    return math.exp(acc)


def rational_daf_eval(D, C, A, B, m: int, n: int, order: int,
                      tol: Tolerances | None = None) -> np.ndarray:
    """Evaluate ``D + sum_{u=1..order} z^(u) C A^(u-1) B`` at ``z = m + ni``.

    The series converges when the spectral radius of ``A`` stays below
    sqrt(2); a Gelfand-style radius estimate above that bound (5% slack)
    emits :class:`DivergenceWarning` rather than failing, since the partial
    sum is still well defined.
    """
    tol = _tol(tol)
    D, C, A, B = as_matrix(D), as_matrix(C), as_matrix(A), as_matrix(B)
    _require_square(A)
    if C.shape[1] != A.shape[0] or A.shape[1] != B.shape[0]:
        raise DimMismatch("C, A, B dimensions are inconsistent")
    if D.shape != (C.shape[0], B.shape[1]):
        raise DimMismatch("D must match the product C A B")
    if _gelfand_radius_proxy(A) > math.sqrt(2.0) * 1.05:
        warnings.warn("spectral radius estimate exceeds sqrt(2); the lattice "
                      "power series may diverge", DivergenceWarning,
                      stacklevel=2)
    zpow = daf_power_series(m, n, order)
    out = D.copy()
    lead = C
    for u in range(1, order + 1):
        out = out + zpow[u] * (lead @ B)
        if u < order:
            lead = lead @ A
    return _require_finite(out, "rational lattice evaluation")


# ---------------------------------------------------------------------------
# two-operator representation f(m, n) = C A1^m A2^n B

def pair_condition_residual(A1, A2) -> float:
    """Max-norm of ``I + i A1 - i A2 - A1 A2``.

    The representation ``C A1^m A2^n B`` built on an observable /
    controllable pair is discrete analytic exactly when this vanishes.
    """
    A1, A2 = as_matrix(A1), as_matrix(A2)
    _require_square(A1), _require_square(A2)
    if A1.shape != A2.shape:
        raise DimMismatch("A1 and A2 must have equal size")
    eye = np.eye(A1.shape[0], dtype=complex)
    return max_abs(eye + 1j * A1 - 1j * A2 - A1 @ A2)


def a2_from_a1(A1, tol: Tolerances | None = None) -> np.ndarray:
    """Unique companion ``A2 = (iI + A1)^(-1) (I + i A1)`` of ``A1``.

    Raises :class:`Singular` when ``iI + A1`` is not invertible (in which
    case no companion exists).
    """
    tol = _tol(tol)
    A1 = _require_square(as_matrix(A1))
    eye = np.eye(A1.shape[0], dtype=complex)
    return lu_solve(1j * eye + A1, eye + 1j * A1, tol)


@dataclass
class OperatorPair:
    """Data ``(A1, A2, C, B)`` for the representation ``C A1^m A2^n B``.

    The compatibility residual ``I + i A1 - i A2 - A1 A2`` is recorded at
    construction; a pair is *exact* when it vanishes within tolerance.
    """

    A1: np.ndarray
    A2: np.ndarray
    C: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        self.A1 = _require_square(as_matrix(self.A1))
        self.A2 = _require_square(as_matrix(self.A2))
        self.C = as_matrix(self.C)
        self.B = as_matrix(self.B)
        n = self.A1.shape[0]
        if self.A2.shape[0] != n or self.C.shape[1] != n or self.B.shape[0] != n:
            raise DimMismatch("operator pair dimensions are inconsistent")
        self.condition_residual = pair_condition_residual(self.A1, self.A2)

    def is_exact(self, tol: Tolerances | None = None) -> bool:
        tol = _tol(tol)
        scale = max(1.0, max_abs(self.A1) * max_abs(self.A2))
        return self.condition_residual <= tol.eq_tol * scale


def pair_daf_eval(pair: OperatorPair, m: int, n: int,
                  tol: Tolerances | None = None) -> np.ndarray:
    """Value ``C A1^m A2^n B`` at lattice point ``(m, n)``.

    Pairs violating the compatibility condition are still evaluated (the
    formula is defined regardless) but trigger
    :class:`PairConditionWarning`: the resulting grid is then not discrete
    analytic.
    """
    tol = _tol(tol)
    if not pair.is_exact(tol):
        warnings.warn(f"pair condition residual {pair.condition_residual:.3e}; "
                      "values will not form a discrete analytic grid",
                      PairConditionWarning, stacklevel=2)
    out = pair.C @ np.linalg.matrix_power(pair.A1, m) \
        @ np.linalg.matrix_power(pair.A2, n) @ pair.B
    return _require_finite(out, "pair evaluation")


def grid_from_pair(pair: OperatorPair, M: int, N: int,
                   tol: Tolerances | None = None) -> DafGrid:
    """Grid of ``C A1^m A2^n B`` over ``0 <= m <= M``, ``0 <= n <= N``."""
    tol = _tol(tol)
    if not pair.is_exact(tol):
        warnings.warn(f"pair condition residual {pair.condition_residual:.3e}; "
                      "values will not form a discrete analytic grid",
                      PairConditionWarning, stacklevel=2)
    left = [pair.C]
    for _ in range(M):
        left.append(left[-1] @ pair.A1)
    right = [pair.B]
    for _ in range(N):
        right.append(pair.A2 @ right[-1])
    v = np.stack([np.stack([lm @ rn for rn in right]) for lm in left])
    return DafGrid(v)
