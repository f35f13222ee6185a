"""Displacement structure of Hermitian sections with lattice structure.

With ``Z`` the block backward shift, a Hermitian section ``F`` whose blocks
satisfy the lattice relation has the rank-(2p) displacement

    F + i Z* F - i F Z - Z* F Z = V* J V,
    J = [[0, I_p], [I_p, 0]],
    V = [[f(0,0)/2, f(0,1) - i f(0,0), ..., f(0,N) - i f(0,N-1)],
         [I_p,      0,                 ..., 0               ]].

(The sign of the second block row of ``V`` is fixed by hand-checking the
constant grid; the opposite choice produces the negative of the left side.)
The associated kernel factors through the 2p x 2p function ``Theta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DimMismatch, NotDaf, NotHermitian, PoleAt, Singular, Tolerances,
    _require_finite, _require_square, _tol, as_matrix, herm, inverse,
    lu_solve, max_abs,
)
from .lattice import DafGrid, cr_residual
from .moebius import SQRT2

__all__ = [
    "shift_matrix", "DisplacementData", "displacement_decompose", "theta",
    "theta_kernel_check",
]


def shift_matrix(N: int, p: int = 1) -> np.ndarray:
    """Block backward shift: identity blocks on the first superdiagonal."""
    if N < 0:
        raise DimMismatch("N must be non-negative")
    return np.kron(np.eye(N + 1, k=1), np.eye(p)).astype(complex)


def displacement_table(F, p: int = 1) -> np.ndarray:
    """The displacement ``F + i Z* F - i F Z - Z* F Z``."""
    F = _require_square(as_matrix(F))
    Z = shift_matrix(F.shape[0] // p - 1, p)
    return F + 1j * herm(Z) @ F - 1j * F @ Z - herm(Z) @ F @ Z


@dataclass(frozen=True)
class DisplacementData:
    """Factor ``V`` with signature ``J`` and the decomposition residual."""

    V: np.ndarray
    J: np.ndarray
    residual: float
    rank: int


def displacement_decompose(F, p: int = 1,
                           tol: Tolerances | None = None) -> DisplacementData:
    """Rank-revealing factorization of the displacement of ``F``.

    Builds ``V`` from the first block row of ``F`` and returns the residual
    ``|F + i Z* F - i F Z - Z* F Z - V* J V|`` (zero in exact arithmetic for
    Hermitian structured sections) plus the numerical displacement rank.
    """
    tol = _tol(tol)
    F = _require_square(as_matrix(F))
    if F.shape[0] % p:
        raise DimMismatch(f"section {F.shape} is not blocked by p = {p}")
    scale = max(max_abs(F), 1e-300)
    if max_abs(F - herm(F)) > tol.eq_tol * scale:
        raise NotHermitian("section must be Hermitian")
    grid = DafGrid.from_section(F, p)
    if grid.M >= 1 and cr_residual(grid) > tol.eq_tol * scale:
        raise NotDaf(f"structure residual {cr_residual(grid):.3e}")
    N = grid.M
    top = np.zeros((p, (N + 1) * p), dtype=complex)
    top[:, :p] = grid.block(0, 0) / 2.0
    for n in range(1, N + 1):
        top[:, n * p:(n + 1) * p] = grid.block(0, n) - 1j * grid.block(0, n - 1)
    bottom = np.zeros((p, (N + 1) * p), dtype=complex)
    bottom[:, :p] = np.eye(p)
    V = np.vstack([top, bottom])
    J = np.zeros((2 * p, 2 * p), dtype=complex)
    J[:p, p:] = np.eye(p)
    J[p:, :p] = np.eye(p)
    table = displacement_table(F, p)
    residual = max_abs(table - herm(V) @ J @ V)
    svals = np.linalg.svd(table, compute_uv=False)
    rank = int(np.sum(svals > tol.rank_tol * svals[0])) if svals.size and svals[0] > 0 else 0
    return DisplacementData(V, J, residual, rank)


def _pencil(lam: complex, N: int, p: int) -> np.ndarray:
    """The resolvent pencil ``I + i lam I - i Z - lam Z``."""
    Z = shift_matrix(N, p)
    eye = np.eye((N + 1) * p, dtype=complex)
    return (1.0 + 1j * lam) * eye - (1j + lam) * Z


def theta(F, p: int = 1, mu0: complex = 1.0,
          tol: Tolerances | None = None):
    """The 2p x 2p kernel-factorizing function of an invertible section.

    Returns a callable

        Theta(lam) = I - s(lam) V (I + i lam I - i Z - lam Z)^(-1)
                             F^(-1) (I + i mu0 I - i Z - mu0 Z)^(-*) V*

    with ``s(lam) = 1 + i lam - i conj(mu0) - lam conj(mu0)``; ``mu0`` must
    lie on the circle C(-i, sqrt(2)) with an invertible pencil (the default
    ``mu0 = 1`` always qualifies).
    """
    tol = _tol(tol)
    data = displacement_decompose(F, p, tol)
    F = as_matrix(F)
    N = F.shape[0] // p - 1
    if abs(abs(mu0 + 1j) - SQRT2) > 1e-8:
        raise PoleAt("mu0 must lie on the circle C(-i, sqrt 2)")
    mu0b = complex(mu0).conjugate()
    Finv = inverse(F, tol)
    # F^(-1) R(mu0)^(-*) V*, fixed across evaluations
    tail = Finv @ lu_solve(herm(_pencil(mu0, N, p)), herm(data.V), tol)
    eye2 = np.eye(2 * p, dtype=complex)

    def theta_fn(lam: complex) -> np.ndarray:
        s = 1.0 + 1j * lam - 1j * mu0b - lam * mu0b
        try:
            left = data.V @ lu_solve(_pencil(lam, N, p), tail, tol)
        except Singular as exc:
            raise PoleAt(f"pencil singular at lam = {lam}") from exc
        return eye2 - s * left

    return theta_fn


def theta_kernel_check(F, theta_fn, lam: complex, nu: complex, p: int = 1,
                       tol: Tolerances | None = None) -> float:
    """Residual of the kernel identity at one point pair:

        V R(lam)^(-1) F^(-1) R(nu)^(-*) V*
            = (J - Theta(lam) J Theta(nu)*) / (1 + i lam - i nu~ - lam nu~).
    """
    tol = _tol(tol)
    data = displacement_decompose(F, p, tol)
    F = as_matrix(F)
    N = F.shape[0] // p - 1
    nub = complex(nu).conjugate()
    denom = 1.0 + 1j * lam - 1j * nub - lam * nub
    if abs(denom) < 1e-8:
        raise PoleAt("point pair sits on the vanishing locus of the denominator")
    Finv = inverse(F, tol)
    mid = lu_solve(_pencil(lam, N, p),
                   Finv @ lu_solve(herm(_pencil(nu, N, p)), herm(data.V), tol),
                   tol)
    lhs = data.V @ mid
    rhs = (data.J - theta_fn(lam) @ data.J @ herm(theta_fn(nu))) / denom
    return max_abs(lhs - rhs)
