"""Dense complex linear algebra and circle quadrature shared by every module.

All matrices are plain ``numpy`` complex arrays.  Comparison thresholds travel
explicitly in a :class:`Tolerances` value; there are no module-level knobs.
Every exported operation returns finite entries or raises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "DaftError", "Singular", "NotHermitian", "NotPSD", "PoleAt",
    "DimMismatch", "CornerMismatch", "SpectrumClash", "TooSmall",
    "IndexRange", "NotDaf", "Unstable", "NotContraction", "NotLossless",
    "PreconditionFail", "NotSimilar", "SpectrumOnCircle", "ParseError",
    "AmbiguousSource", "DivergenceWarning", "PairConditionWarning",
    "Tolerances", "Inertia", "as_matrix", "max_abs", "herm",
    "lu_solve", "inverse", "hermitian_eig", "psd_check", "sqrt_psd",
    "circle_quadrature",
]


# ---------------------------------------------------------------------------
# errors and warnings

class DaftError(Exception):
    """Base class for every error raised by this package."""


class Singular(DaftError):
    """A pivot (or a restricted operator) fell below the rank threshold."""


class NotHermitian(DaftError):
    """Input required to be Hermitian is not, beyond tolerance."""


class NotPSD(DaftError):
    """Input required to be positive semidefinite has a negative eigenvalue."""


class PoleAt(DaftError):
    """Evaluation requested at (or too close to) a pole."""


class DimMismatch(DaftError):
    """Incompatible matrix or block dimensions."""


class CornerMismatch(DaftError):
    """Boundary row and column disagree at the corner value."""


class SpectrumClash(DaftError):
    """An excluded point lies in the spectrum of the input matrix."""


class TooSmall(DaftError):
    """Grid is too small for the requested operation."""


class IndexRange(DaftError):
    """Requested index exceeds the available data."""


class NotDaf(DaftError):
    """Matrix does not carry the discrete analytic structure."""


class Unstable(DaftError):
    """Fixed-point residual of a matrix equation failed to meet its bound."""


class NotContraction(DaftError):
    """Operator required to be a contraction has norm above one."""


class NotLossless(DaftError):
    """State matrix is not unitary in the supplied indefinite metric."""


class PreconditionFail(DaftError):
    """A documented precondition of the operation does not hold."""


class NotSimilar(DaftError):
    """No similarity matrix links the two realizations."""


class SpectrumOnCircle(DaftError):
    """Spectral projector is not idempotent: eigenvalues sit on the circle."""


class ParseError(DaftError):
    """Malformed or unrecognized input file."""


class AmbiguousSource(DaftError):
    """Input file matches zero or several of the accepted schemas."""


class DivergenceWarning(UserWarning):
    """Series evaluation outside its guaranteed convergence region."""


class PairConditionWarning(UserWarning):
    """Operator pair violates the lattice compatibility condition."""


# ---------------------------------------------------------------------------
# tolerances

@dataclass(frozen=True)
class Tolerances:
    """Comparison thresholds used throughout the package.

    eq_tol
        Absolute comparison tolerance for residuals and equality checks.
    rank_tol
        Relative threshold under which a pivot or singular value counts as
        zero (scaled by the largest pivot).
    psd_tol
        Relative threshold under which an eigenvalue counts as negative
        (scaled by the spectral radius).
    """

    eq_tol: float = 1e-10
    rank_tol: float = 1e-9
    psd_tol: float = 1e-9

    def __post_init__(self) -> None:
        if min(self.eq_tol, self.rank_tol, self.psd_tol) <= 0.0:
            raise ValueError("tolerances must be strictly positive")


def _tol(tol: Tolerances | None) -> Tolerances:
    return Tolerances() if tol is None else tol


# ---------------------------------------------------------------------------
# small helpers

def as_matrix(a) -> np.ndarray:
    """Coerce scalars / nested sequences to a 2-D complex array."""
    m = np.atleast_2d(np.asarray(a, dtype=complex))
    if m.ndim != 2:
        raise DimMismatch(f"expected a matrix, got array of shape {m.shape}")
    return m


def max_abs(a) -> float:
    """Entrywise max-modulus norm; zero for empty arrays."""
    a = np.asarray(a)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


def herm(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def _require_finite(a: np.ndarray, what: str) -> np.ndarray:
    if a.size and not np.all(np.isfinite(a)):
        raise DaftError(f"{what} contains non-finite entries")
    return a


def _require_square(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise DimMismatch(f"{what} must be square, got shape {a.shape}")
    return a


# ---------------------------------------------------------------------------
# linear solves

def lu_solve(A, B, tol: Tolerances | None = None) -> np.ndarray:
    """Solve ``A X = B`` by LU factorization with partial pivoting.

    Raises :class:`Singular` when the smallest pivot falls below
    ``rank_tol`` times the largest pivot.
    """
    tol = _tol(tol)
    A = _require_square(as_matrix(A))
    B = np.asarray(B, dtype=complex)
    b2 = B if B.ndim == 2 else B.reshape(-1, 1)
    if A.shape[1] != b2.shape[0]:
        raise DimMismatch(f"solve dims {A.shape} vs {b2.shape}")
    if A.shape[0] == 0:
        return np.zeros_like(B)
    lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    diag = np.abs(np.diag(lu))
    if diag.min() <= tol.rank_tol * diag.max():
        raise Singular(f"pivot ratio {diag.min():.3e}/{diag.max():.3e}")
    X = scipy.linalg.lu_solve((lu, piv), b2, check_finite=False)
    X = X if B.ndim == 2 else X.reshape(B.shape)
    return _require_finite(X, "solve result")


def inverse(A, tol: Tolerances | None = None) -> np.ndarray:
    """Matrix inverse through :func:`lu_solve`."""
    A = as_matrix(A)
    return lu_solve(A, np.eye(A.shape[0], dtype=complex), tol)


# ---------------------------------------------------------------------------
# Hermitian spectral tools

def hermitian_eig(A, tol: Tolerances | None = None):
    """Eigendecomposition ``A = Q diag(w) Q*`` of a Hermitian matrix.

    Returns ``(w, Q)`` with real eigenvalues in ascending order and unitary
    ``Q``.  Raises :class:`NotHermitian` when the anti-Hermitian part of `A`
    exceeds ``eq_tol * max_abs(A)``.
    """
    tol = _tol(tol)
    A = _require_square(as_matrix(A))
    if max_abs(A - herm(A)) > tol.eq_tol * max(max_abs(A), 1e-300):
        raise NotHermitian(f"anti-Hermitian part {max_abs(A - herm(A)):.3e}")
    w, Q = np.linalg.eigh((A + herm(A)) / 2.0)
    return w, Q


@dataclass(frozen=True)
class Inertia:
    """Eigenvalue sign counts of a Hermitian matrix."""

    negative: int
    zero: int
    positive: int

    @property
    def is_psd(self) -> bool:
        return self.negative == 0

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        kind = "PSD" if self.is_psd else f"Indefinite({self.negative})"
        return f"{kind}[-{self.negative}/0:{self.zero}/+{self.positive}]"


def psd_check(A, tol: Tolerances | None = None) -> Inertia:
    """Classify a Hermitian matrix as PSD or indefinite.

    An eigenvalue counts as negative below ``-psd_tol * spectral_radius``;
    the ``negative`` field is the number of strictly negative eigenvalues.
    """
    tol = _tol(tol)
    w, _ = hermitian_eig(A, tol)
    if w.size == 0:
        return Inertia(0, 0, 0)
    thr = tol.psd_tol * max(float(np.max(np.abs(w))), 1e-300)
    neg = int(np.sum(w < -thr))
    pos = int(np.sum(w > thr))
    return Inertia(neg, int(w.size) - neg - pos, pos)


def sqrt_psd(A, tol: Tolerances | None = None) -> np.ndarray:
    """Hermitian PSD square root ``S`` with ``S @ S = A``.

    Eigenvalues in the roundoff band below zero are clamped to zero; a
    strongly negative eigenvalue raises :class:`NotPSD`.
    """
    tol = _tol(tol)
    w, Q = hermitian_eig(A, tol)
    if w.size == 0:
        return np.zeros_like(as_matrix(A))
    thr = tol.psd_tol * max(float(np.max(np.abs(w))), 1e-300)
    if float(w.min()) < -thr:
        raise NotPSD(f"eigenvalue {w.min():.3e} below -{thr:.3e}")
    S = (Q * np.sqrt(np.clip(w, 0.0, None))) @ herm(Q)
    return _require_finite((S + herm(S)) / 2.0, "matrix square root")


# ---------------------------------------------------------------------------
# quadrature

def circle_quadrature(g, nodes: int) -> np.ndarray:
    """Trapezoidal mean ``(1/2pi) * integral_0^{2pi} g(t) dt``.

    Equispaced nodes on the periodic interval make the rule exact for
    trigonometric polynomials of degree below ``nodes`` and spectrally
    accurate for analytic integrands.
    """
    if nodes < 4:
        raise ValueError("need at least 4 quadrature nodes")
    ts = 2.0 * np.pi * np.arange(nodes) / nodes
    acc = np.asarray(g(ts[0]), dtype=complex) / nodes
    for t in ts[1:]:
        acc = acc + np.asarray(g(t), dtype=complex) / nodes
    return _require_finite(np.asarray(acc), "quadrature value")
