"""Rational spectral densities given through a stable left factor.

A factor ``w(lam) = d + c (lam I - a)^(-1) b`` with the spectrum of ``a``
inside the unit disk determines the circle density
``R(e^{it}) = w(e^{it}) w(e^{it})*``.  Its Gramian is the solution of the
Stein equation ``X - a X a* = b b*``; Fourier coefficients, the Herglotz
transform, the boundary row of the attached lattice grid and its symmetric
extension to the full quadrant (through the compression calculus of a
unitary dilation) all come out in closed form.

Grid values are normalized to the ``f(0,0) = 2 R_0`` convention used by the
measure module, i.e. ``f(m,n) = (1/pi) integral K1^m K2^n R(e^{it}) dt`` with
``K1 = sqrt2 e^{-it} - i`` and ``K2 = conj(K1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DimMismatch, NotContraction, NotPSD, PoleAt, PreconditionFail, Singular,
    Tolerances, Unstable, _require_finite, _require_square, _tol, as_matrix,
    circle_quadrature, herm, hermitian_eig, inverse, lu_solve, max_abs,
    psd_check, sqrt_psd,
)
from .lattice import DafGrid
from .moebius import SQRT2
from .realization import KypCertificate, StateSpace, _outer_inverse

__all__ = [
    "SpectralFactor", "DilationCalculus", "stein_solve",
    "density_realization", "fourier_coeffs_factor", "cara_from_factor",
    "f_row_from_density", "f_row_from_factor", "dilation_extend",
    "symmetric_extension_from_factor", "grid_from_factor",
    "kyp_certificate_for_factor", "phi_realization_from_factor",
    "factor_density", "f_from_density_quadrature",
]


# ---------------------------------------------------------------------------
# data

@dataclass
class SpectralFactor:
    """Minimal realization ``(a, b, c, d)`` of a stable left factor."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        self.a = _require_square(as_matrix(self.a))
        self.b = as_matrix(self.b)
        self.c = as_matrix(self.c)
        self.d = as_matrix(self.d)
        ell = self.a.shape[0]
        if self.b.shape[0] != ell or self.c.shape[1] != ell:
            raise DimMismatch("b/c sizes do not match the state dimension")
        if self.d.shape != (self.c.shape[0], self.b.shape[1]):
            raise DimMismatch("d must match c rows x b columns")

    @property
    def ell(self) -> int:
        return self.a.shape[0]

    @property
    def p(self) -> int:
        return self.c.shape[0]

    def eval(self, lam: complex, tol: Tolerances | None = None) -> np.ndarray:
        eye = np.eye(self.ell, dtype=complex)
        try:
            return self.d + self.c @ lu_solve(lam * eye - self.a, self.b, tol)
        except Singular as exc:
            raise PoleAt(f"factor evaluation at lam = {lam}") from exc

    def d_is_zero(self, tol: Tolerances | None = None) -> bool:
        scale = max(max_abs(self.b) * max_abs(self.c), 1.0)
        return max_abs(self.d) <= _tol(tol).eq_tol * scale


def factor_density(w: SpectralFactor, tol: Tolerances | None = None):
    """Density on the circle, ``t -> w(e^{it}) w(e^{it})*``."""

    def density(t: float) -> np.ndarray:
        v = w.eval(np.exp(1j * t), tol)
        return v @ herm(v)

    return density


def f_from_density_quadrature(density, m: int, n: int, nodes: int = 512) -> np.ndarray:
    """Quadrature oracle ``(1/pi) integral K1^m K2^n density(t) dt``.

    Ground-truth route used to arbitrate every closed-form grid value.
    """

    def g(t: float) -> np.ndarray:
        k1 = SQRT2 * np.exp(-1j * t) - 1j
        return (k1 ** m) * (np.conj(k1) ** n) * np.asarray(density(t), dtype=complex)

    return 2.0 * circle_quadrature(g, nodes)


# ---------------------------------------------------------------------------
# Stein equation and the density realization

def stein_solve(a, b, tol: Tolerances | None = None) -> np.ndarray:
    """Hermitian PSD solution of ``X - a X a* = b b*``.

    Solved by Kronecker vectorization; equals ``sum_t a^t b b* a*^t`` when
    the spectrum of ``a`` is inside the unit disk.  Raises
    :class:`Unstable` when the fixed-point residual exceeds
    ``1e-12 * |b b*|``.
    """
    tol = _tol(tol)
    a, b = _require_square(as_matrix(a)), as_matrix(b)
    if b.shape[0] != a.shape[0]:
        raise DimMismatch("b rows must match a")
    ell = a.shape[0]
    rhs = b @ herm(b)
    if ell == 0:
        return rhs
    K = np.eye(ell * ell, dtype=complex) - np.kron(a.conj(), a)
    x = lu_solve(K, rhs.ravel(order="F"), tol)
    X = x.reshape((ell, ell), order="F")
    X = (X + herm(X)) / 2.0
    res = max_abs(X - a @ X @ herm(a) - rhs)
    if res > 1e-12 * max(max_abs(rhs), 1e-300):
        raise Unstable(f"Stein residual {res:.3e} vs rhs scale {max_abs(rhs):.3e}")
    return _require_finite(X, "Stein solution")


def density_realization(w: SpectralFactor, tol: Tolerances | None = None) -> StateSpace:
    """Size-2l realization of ``R(lam) = w(lam) w(1/conj(lam))*``:

        A = [[a, -b b* a^(-*)], [0, a^(-*)]],
        B = [b (d* - b* a^(-*) c*); a^(-*) c*],
        C = [c, -d b* a^(-*)],   D = d (d* - b* a^(-*) c*).

    Its Riesz projector is ``[[I, X], [0, 0]]`` with ``X`` the Stein
    solution.  Requires ``a`` invertible.
    """
    tol = _tol(tol)
    ais = inverse(herm(w.a), tol)
    ell, p = w.ell, w.p
    tail = herm(w.d) - herm(w.b) @ ais @ herm(w.c)
    A = np.zeros((2 * ell, 2 * ell), dtype=complex)
    A[:ell, :ell] = w.a
    A[:ell, ell:] = -w.b @ herm(w.b) @ ais
    A[ell:, ell:] = ais
    B = np.vstack([w.b @ tail, ais @ herm(w.c)])
    C = np.hstack([w.c, -w.d @ herm(w.b) @ ais])
    return StateSpace(A, B, C, w.d @ tail, "inf")


def fourier_coeffs_factor(w: SpectralFactor, k: int,
                          tol: Tolerances | None = None) -> np.ndarray:
    """Fourier coefficient of the density:
    ``R_0 = d d* + c X c*``, ``R_k = (d b* + c X a*) a*^(k-1) c*`` (k >= 1),
    ``R_(-k) = R_k*``."""
    tol = _tol(tol)
    X = stein_solve(w.a, w.b, tol)
    if k == 0:
        return w.d @ herm(w.d) + w.c @ X @ herm(w.c)
    kk = abs(k)
    lead = (w.d @ herm(w.b) + w.c @ X @ herm(w.a)) \
        @ np.linalg.matrix_power(herm(w.a), kk - 1) @ herm(w.c)
    return lead if k > 0 else herm(lead)


def cara_from_factor(w: SpectralFactor, lam: complex,
                     tol: Tolerances | None = None) -> np.ndarray:
    """Herglotz transform of the density at ``lam``:

        phi(lam) = d (d* - b* a^(-*) c*)
                   + (d b* a^(-*) + c X)(I + lam a*)(I - lam a*)^(-1) c*,

    reducing to ``c X (I + lam a*)(I - lam a*)^(-1) c*`` when ``d = 0``.
    ``Re phi(e^{it}) = R(e^{it})`` on the circle and ``phi(0) = R_0``.
    """
    tol = _tol(tol)
    X = stein_solve(w.a, w.b, tol)
    ell = w.ell
    eye = np.eye(ell, dtype=complex)
    try:
        core = lu_solve(eye - lam * herm(w.a), herm(w.c), tol)
    except Singular as exc:
        raise PoleAt(f"Herglotz evaluation at lam = {lam}") from exc
    moebius_part = (eye + lam * herm(w.a)) @ core
    if w.d_is_zero(tol):
        return w.c @ X @ moebius_part
    ais = inverse(herm(w.a), tol)
    const = w.d @ (herm(w.d) - herm(w.b) @ ais @ herm(w.c))
    return const + (w.d @ herm(w.b) @ ais + w.c @ X) @ moebius_part


# ---------------------------------------------------------------------------
# boundary rows

def f_row_from_density(S: StateSpace, P, m: int,
                       tol: Tolerances | None = None) -> np.ndarray:
    """Boundary value from a realization of the density itself.

    With ``P`` the Riesz projector of the state matrix and ``G`` the inverse
    of ``(I-P) A`` on ran(I-P) (zero on ran P),

        f(m, 0) = 2 [ (-i)^m D - C (sqrt2 G - i I)^m G B ].

    This is the binomial resummation of the non-negative Fourier
    coefficients; it matches the quadrature oracle and the factor route.
    """
    tol = _tol(tol)
    P = as_matrix(P)
    G = _outer_inverse(S.A, P, tol)
    eye = np.eye(S.n_states, dtype=complex)
    lead = np.linalg.matrix_power(SQRT2 * G - 1j * eye, m)
    return 2.0 * ((-1j) ** m * S.D - S.C @ lead @ G @ S.B)


def f_row_from_factor(w: SpectralFactor, m: int,
                      tol: Tolerances | None = None) -> np.ndarray:
    """Boundary value from the factor:

        f(m, 0) = 2 [ (-i)^m d (d* - b* a^(-*) c*)
                      + (d b* a^(-*) + c X)(sqrt2 a* - i I)^m c* ],

    reducing to ``2 c X (sqrt2 a* - i I)^m c*`` for ``d = 0`` and to
    ``2 c a^(-1) X a^(-*) (sqrt2 a* - i I)^m c*`` for ``d = c a^(-1) b``.
    """
    tol = _tol(tol)
    X = stein_solve(w.a, w.b, tol)
    eye = np.eye(w.ell, dtype=complex)
    lead = np.linalg.matrix_power(SQRT2 * herm(w.a) - 1j * eye, m)
    if w.d_is_zero(tol):
        return 2.0 * (w.c @ X @ lead @ herm(w.c))
    ais = inverse(herm(w.a), tol)
    const = w.d @ (herm(w.d) - herm(w.b) @ ais @ herm(w.c))
    return 2.0 * ((-1j) ** m * const
                  + (w.d @ herm(w.b) @ ais + w.c @ X) @ lead @ herm(w.c))


# ---------------------------------------------------------------------------
# dilation compression calculus

@dataclass
class DilationCalculus:
    """Contraction ``T`` with output map ``Cout`` for the compression
    calculus of the unitary dilation of ``T``.

    All mixed powers of the dilation collapse to single powers, compressing
    to ``T^(r)`` for r >= 0 and ``T*^(-r)`` for r < 0, so grid values reduce
    to a finite binomial double sum; the dilation itself is never built.
    """

    T: np.ndarray
    Cout: np.ndarray

    def __post_init__(self) -> None:
        self.T = _require_square(as_matrix(self.T))
        self.Cout = as_matrix(self.Cout)
        if self.Cout.shape[1] != self.T.shape[0]:
            raise DimMismatch("Cout columns must match the contraction size")
        tol = Tolerances()
        gram = herm(self.T) @ self.T
        top = float(hermitian_eig(gram, tol)[0][-1]) if gram.size else 0.0
        if top > 1.0 + 100.0 * tol.eq_tol:
            raise NotContraction(f"largest singular value {math.sqrt(top):.6f} > 1")


def dilation_extend(dc: DilationCalculus, m: int, n: int,
                    tol: Tolerances | None = None) -> np.ndarray:
    """Grid value from the compression calculus:

        f(m, n) = Cout [ sum_{j<=m, k<=n} C(m,j) C(n,k) sqrt2^(j+k)
                         (-i)^(m-j) i^(n-k) T^<k-j> ] Cout*,

    with ``T^<r> = T^r`` for r >= 0 and ``T*^(-r)`` for r < 0.  A unitary
    ``T = e^{i theta}`` reproduces the single-atom grid; ``T = 0`` gives the
    grid of the flat density.
    """
    if m < 0 or n < 0:
        raise IndexError("dilation extension lives on the quadrant")
    ell = dc.T.shape[0]
    pos = [np.eye(ell, dtype=complex)]
    for _ in range(max(m, n)):
        pos.append(pos[-1] @ dc.T)
    neg = [np.eye(ell, dtype=complex)]
    Tst = herm(dc.T)
    for _ in range(max(m, n)):
        neg.append(neg[-1] @ Tst)

    def bracket(r: int) -> np.ndarray:
        return pos[r] if r >= 0 else neg[-r]

    acc = np.zeros((ell, ell), dtype=complex)
    for j in range(m + 1):
        wj = math.comb(m, j) * SQRT2 ** j * (-1j) ** (m - j)
        for k in range(n + 1):
            wk = math.comb(n, k) * SQRT2 ** k * 1j ** (n - k)
            acc = acc + (wj * wk) * bracket(k - j)
    return _require_finite(dc.Cout @ acc @ herm(dc.Cout), "dilation value")


def symmetric_extension_from_factor(w: SpectralFactor, m: int, n: int,
                                    tol: Tolerances | None = None) -> np.ndarray:
    """Symmetric quadrant value for a strictly proper factor (``d = 0``).

    The Gramian similarity ``X^(1/2) a* X^(-1/2)`` is a contraction (the
    Stein equation gives ``a* X^(-1) a <= X^(-1)``); feeding its adjoint to
    the compression calculus with output map ``sqrt2 c X^(1/2)`` makes the
    ``n = 0`` row reproduce :func:`f_row_from_factor` and the full grid
    Hermitian-symmetric with zero lattice residual.
    """
    tol = _tol(tol)
    if not w.d_is_zero(tol):
        raise PreconditionFail("symmetric extension requires d = 0")
    dc = _dilation_from_factor(w, tol)
    return dilation_extend(dc, m, n, tol)


def _dilation_from_factor(w: SpectralFactor, tol: Tolerances) -> DilationCalculus:
    X = stein_solve(w.a, w.b, tol)
    if not psd_check(X, tol).is_psd or _numeric_rank_psd(X, tol) < w.ell:
        raise NotPSD("Stein Gramian must be positive definite")
    Xh = sqrt_psd(X, tol)
    Xhi = inverse(Xh, tol)
    # adjoint of X^(1/2) a* X^(-1/2); the row direction then carries that
    # similarity, matching the factor route on n = 0
    T = Xhi @ w.a @ Xh
    return DilationCalculus(T, SQRT2 * (w.c @ Xh))


def _numeric_rank_psd(X: np.ndarray, tol: Tolerances) -> int:
    vals, _ = hermitian_eig(X, tol)
    if vals.size == 0:
        return 0
    top = max(float(vals[-1]), 1e-300)
    return int(np.sum(vals > tol.rank_tol * top))


def grid_from_factor(w: SpectralFactor, M: int, N: int,
                     tol: Tolerances | None = None) -> DafGrid:
    """Grid of :func:`symmetric_extension_from_factor` over [0..M] x [0..N]."""
    tol = _tol(tol)
    if not w.d_is_zero(tol):
        raise PreconditionFail("symmetric extension requires d = 0")
    dc = _dilation_from_factor(w, tol)
    v = np.stack([
        np.stack([dilation_extend(dc, m, n, tol) for n in range(N + 1)])
        for m in range(M + 1)
    ])
    return DafGrid(v)


# ---------------------------------------------------------------------------
# positivity certificate of the Herglotz transform

def phi_realization_from_factor(w: SpectralFactor,
                                tol: Tolerances | None = None) -> StateSpace:
    """Realization ``(a^(-*), -sqrt2 c*, sqrt2 c X a^(-*), -c X c*)`` of the
    Herglotz transform of a strictly proper factor.  Requires ``d = 0`` and
    ``a`` invertible."""
    tol = _tol(tol)
    if not w.d_is_zero(tol):
        raise PreconditionFail("realization is for the d = 0 case")
    X = stein_solve(w.a, w.b, tol)
    ais = inverse(herm(w.a), tol)
    return StateSpace(ais, -SQRT2 * herm(w.c), SQRT2 * (w.c @ X @ ais),
                      -w.c @ X @ herm(w.c), "inf")


def kyp_certificate_for_factor(w: SpectralFactor,
                               tol: Tolerances | None = None) -> KypCertificate:
    """Positivity certificate ``P = a* X^(-1) a``, ``W = 0`` and ``L`` a
    square root of ``X^(-1) - a* X^(-1) a >= 0`` for the Herglotz-transform
    realization of a ``d = 0`` factor."""
    tol = _tol(tol)
    if not w.d_is_zero(tol):
        raise PreconditionFail("certificate is for the d = 0 case")
    X = stein_solve(w.a, w.b, tol)
    Xinv = inverse(X, tol)
    P = herm(w.a) @ Xinv @ w.a
    gap = Xinv - P
    L = sqrt_psd((gap + herm(gap)) / 2.0, tol)
    W = np.zeros((w.p, L.shape[1]), dtype=complex)
    return KypCertificate(P, L, W)
