"""Conformal disk map, boundary generating series, and the bivariate kernel.

The Moebius map ``sigma(lam) = sqrt(2) lam / (1 + i lam)`` sends the disk
B(-i, sqrt(2)) onto the unit disk.  A discrete analytic function on the
quadrant is encoded by its generating kernel

    k_f(lam, nu) = (Phi_L(lam) + Phi_R(nu)*) / (1 + i lam - i nu~ - lam nu~)

whose numerator series fix the boundary rows:

    Phi_L(lam) = (1 + i lam) sum_m f(m,0) lam^m - f(0,0)/2 + iX,
    Phi_R(lam) = (1 + i lam) sum_n f(0,n)* lam^n - f(0,0)*/2 + iX*.

Composing a boundary series with ``sigma^(-1)`` produces the characteristic
function living on the unit disk.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import lattice
from .core import (
    DimMismatch, PoleAt, Tolerances, _require_finite, _tol, as_matrix,
    max_abs,
)

__all__ = [
    "SQRT2", "Region", "sigma", "sigma_inv", "symmetric_point",
    "region_classify", "TruncatedSeries", "Kernel2", "sigma_series",
    "sigma_inv_series", "boundary_generating", "boundary_generating_right",
    "kernel_from_boundary", "characteristic_from_boundary",
    "boundary_from_characteristic",
]

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# the conformal map and its geometry

def sigma(lam: complex, tol: Tolerances | None = None) -> complex:
    """Moebius map ``sqrt(2) lam / (1 + i lam)``; pole at ``lam = i``."""
    tol = _tol(tol)
    den = 1.0 + 1j * lam
    if abs(den) < tol.rank_tol:
        raise PoleAt(f"sigma has a pole at i (lam = {lam})")
    return SQRT2 * lam / den


def sigma_inv(lam: complex, tol: Tolerances | None = None) -> complex:
    """Inverse map ``lam / (sqrt(2) - i lam)``; pole at ``lam = -i sqrt(2)``."""
    tol = _tol(tol)
    den = SQRT2 - 1j * lam
    if abs(den) < tol.rank_tol:
        raise PoleAt(f"sigma_inv has a pole at -i*sqrt(2) (lam = {lam})")
    return lam / den


def symmetric_point(lam: complex, tol: Tolerances | None = None) -> complex:
    """Point ``lam' = (1 - i conj(lam)) / (conj(lam) - i)`` paired with lam.

    Characterized by ``sigma(lam) * conj(sigma(lam')) = 1``; points of the
    circle C(-i, sqrt(2)) are exactly the fixed points.  Pole at ``-i``.
    """
    tol = _tol(tol)
    lb = complex(lam).conjugate()
    den = lb - 1j
    if abs(den) < tol.rank_tol:
        raise PoleAt("symmetric point of -i is the point at infinity")
    return (1.0 - 1j * lb) / den


class Region(enum.Enum):
    """Position of a point relative to the circle C(-i, sqrt(2))."""

    OMEGA_PLUS = "inside"
    OMEGA_ZERO = "boundary"
    OMEGA_MINUS = "exterior"


def region_classify(lam: complex, tol: Tolerances | None = None) -> Region:
    """Classify ``lam`` by ``|lam + i|`` against sqrt(2), with an eq_tol band."""
    tol = _tol(tol)
    r = abs(lam + 1j)
    if abs(r - SQRT2) <= tol.eq_tol:
        return Region.OMEGA_ZERO
    return Region.OMEGA_PLUS if r < SQRT2 else Region.OMEGA_MINUS


# ---------------------------------------------------------------------------
# truncated series with matrix coefficients

@dataclass
class TruncatedSeries:
    """Polynomial ``sum_k coeffs[k] lam^k`` with p x q matrix coefficients.

    ``coeffs`` has shape (order + 1, p, q); scalar input is lifted.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None, None]
        if c.ndim != 3:
            raise DimMismatch(f"series coefficients must be 3-D, got {c.shape}")
        self.coeffs = _require_finite(c, "series coefficients")

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.coeffs.shape[1:]

    def __call__(self, lam: complex) -> np.ndarray:
        out = np.zeros(self.block_shape, dtype=complex)
        for c in self.coeffs[::-1]:
            out = lam * out + c
        return out

    def cut(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise IndexError(f"cannot extend a series of order {self.order}")
        return TruncatedSeries(self.coeffs[: order + 1].copy())

    def compose(self, inner: np.ndarray) -> "TruncatedSeries":
        """Substitute the scalar series ``inner`` (constant term 0) for lam.

        Coefficient j of the result only involves coefficients up to j of
        both factors, so the output is truncated at the smaller order.
        """
        inner = np.asarray(inner, dtype=complex).ravel()
        if inner.size == 0 or abs(inner[0]) > 1e-14:
            raise ValueError("inner series must vanish at the origin")
        order = min(self.order, inner.size - 1)
        p, q = self.block_shape
        g = inner[: order + 1]
        cs = self.coeffs[: order + 1]
        out = np.zeros((order + 1, p, q), dtype=complex)
        out[0] = cs[order]
        for k in range(order - 1, -1, -1):      # Horner in the series ring
            nxt = np.zeros_like(out)
            for j in range(1, order + 1):       # (out * g)[j]; g[0] = 0
                acc = np.zeros((p, q), dtype=complex)
                for a in range(1, j + 1):
                    acc = acc + g[a] * out[j - a]
                nxt[j] = acc
            nxt[0] = nxt[0] + cs[k]
            out = nxt
        return TruncatedSeries(out)


def _scalar_geom(c: complex, order: int) -> np.ndarray:
    """Coefficients of ``lam * sum_k (c lam)^k`` up to ``lam^order``."""
    out = np.zeros(order + 1, dtype=complex)
    val = 1.0 + 0.0j
    for k in range(1, order + 1):
        out[k] = val
        val *= c
    return out


def sigma_series(order: int) -> np.ndarray:
    """Taylor coefficients of sigma: ``sqrt(2) sum_k (-i)^k lam^(k+1)``."""
    return SQRT2 * _scalar_geom(-1j, order)


def sigma_inv_series(order: int) -> np.ndarray:
    """Taylor coefficients of sigma^(-1): ``(1/sqrt(2)) sum (i lam/sqrt 2)^k lam``."""
    return _scalar_geom(1j / SQRT2, order) / SQRT2


# ---------------------------------------------------------------------------
# boundary generating series

def boundary_generating(row, X=None, order: int | None = None) -> TruncatedSeries:
    """Left generating series from the boundary row ``f(m, 0)``.

    Coefficients of ``(1 + i lam) sum_m f(m,0) lam^m - f(0,0)/2 + iX``:
    the constant term is ``f(0,0)/2 + iX`` and the m-th term is
    ``f(m,0) + i f(m-1,0)``.
    """
    row = [as_matrix(r) for r in row]
    if not row:
        raise DimMismatch("boundary row must be non-empty")
    if any(r.shape != row[0].shape for r in row):
        raise DimMismatch("boundary blocks must share dimensions")
    order = len(row) - 1 if order is None else order
    if order > len(row) - 1:
        raise DimMismatch(f"order {order} exceeds available data {len(row) - 1}")
    X = np.zeros_like(row[0]) if X is None else as_matrix(X)
    if X.shape != row[0].shape:
        raise DimMismatch("X must match the block dimensions")
    coeffs = [row[0] / 2.0 + 1j * X]
    coeffs += [row[m] + 1j * row[m - 1] for m in range(1, order + 1)]
    return TruncatedSeries(np.stack(coeffs))


def boundary_generating_right(col, X=None, order: int | None = None) -> TruncatedSeries:
    """Right generating series from the boundary column ``f(0, n)``.

    Same construction applied to the adjoint data: the constant term is
    ``f(0,0)*/2 + iX*`` and the n-th term is ``f(0,n)* + i f(0,n-1)*``.
    """
    col = [as_matrix(c) for c in col]
    if not col:
        raise DimMismatch("boundary column must be non-empty")
    X = np.zeros_like(col[0]) if X is None else as_matrix(X)
    adj = [c.conj().T for c in col]
    return boundary_generating(adj, X.conj().T, order)


def kernel_from_boundary(phi_l: TruncatedSeries, phi_r: TruncatedSeries,
                         tol: Tolerances | None = None) -> "Kernel2":
    """Expand ``(Phi_L(lam) + Phi_R(nu)*) / (1 + i lam - i nu~ - lam nu~)``.

    The division is carried out as the lattice recurrence seeded by the two
    boundary expansions (numerically identical to bivariate long division,
    and O(MN)): first the boundary values are recovered through

        f(0,0) = Phi_L[0] + Phi_R[0]*,
        f(m,0) = Phi_L[m] - i f(m-1,0),
        f(0,n) = Phi_R[n]* + i f(0,n-1),

    then the interior fills by the lattice relation.
    """
    if phi_l.block_shape != phi_r.block_shape:
        raise DimMismatch("left/right series must share block dimensions")
    row = [phi_l.coeffs[0] + phi_r.coeffs[0].conj().T]
    for m in range(1, phi_l.order + 1):
        row.append(phi_l.coeffs[m] - 1j * row[m - 1])
    col = [row[0]]
    for n in range(1, phi_r.order + 1):
        col.append(phi_r.coeffs[n].conj().T + 1j * col[n - 1])
    grid = lattice.extend_from_boundary(row, col, tol)
    return Kernel2(grid.values)


@dataclass
class Kernel2:
    """Two-variable expansion ``sum f(m,n) lam^m nu~^n`` as a block grid."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[:, :, None, None]
        if c.ndim != 4:
            raise DimMismatch(f"kernel coefficients must be 4-D, got {c.shape}")
        self.coeffs = _require_finite(c, "kernel coefficients")

    @property
    def order(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def grid(self) -> lattice.DafGrid:
        """The coefficient family as a lattice grid."""
        return lattice.DafGrid(self.coeffs.copy())

    def __call__(self, lam: complex, nu: complex) -> np.ndarray:
        """Evaluate the truncated double series at ``(lam, nu)``."""
        nub = complex(nu).conjugate()
        M1, N1, p, q = self.coeffs.shape
        lam_pow = lam ** np.arange(M1)
        nub_pow = nub ** np.arange(N1)
        w = lam_pow[:, None] * nub_pow[None, :]
        return np.tensordot(w, self.coeffs, axes=([0, 1], [0, 1]))


# ---------------------------------------------------------------------------
# passage to the unit disk

def characteristic_from_boundary(phi: TruncatedSeries, order: int) -> TruncatedSeries:
    """Compose a generating series with ``sigma^(-1)``.

    The result lives on the unit disk; with positive data it is a
    Caratheodory function.
    """
    return phi.compose(sigma_inv_series(order))


def boundary_from_characteristic(phi: TruncatedSeries, order: int) -> TruncatedSeries:
    """Compose a disk series with ``sigma`` (inverse of the map above)."""
    return phi.compose(sigma_series(order))
