"""State-space realization algebra for rational matrix functions.

A realization centered at infinity is ``R(lam) = D + C (lam I - A)^(-1) B``;
centered at zero it is ``R(lam) = D + lam C (I - lam A)^(-1) B``.  The module
provides minimality ranks, products, recentering, the structure of functions
that are skew self-adjoint on the unit circle (an invertible Hermitian
metric ``H`` making the state matrix ``H``-unitary), verification of
positivity certificates ``(P, L, W)``:

    P - A P A* = -L L*,   A P C* = -B - L W*,   W W* = D + D* + C P C*,

spectral projectors by contour quadrature, Fourier coefficients of circle
values, and the boundary rows of the lattice grids attached to generating or
characteristic realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    DimMismatch, NotHermitian, NotLossless, PoleAt, PreconditionFail,
    NotSimilar, Singular, SpectrumOnCircle, Tolerances, _require_finite,
    _require_square, _tol, as_matrix, circle_quadrature, herm, inverse,
    lu_solve, max_abs,
)
from .moebius import SQRT2, TruncatedSeries

__all__ = [
    "StateSpace", "observability_rank", "controllability_rank", "is_minimal",
    "product", "recenter_zero", "inverse_triple", "LosslessCertificate",
    "lossless_check", "cara_from_unitary", "lossless_kernel_check",
    "cayley_schur", "KypCertificate", "kyp_verify",
    "kyp_kernel_decomposition", "riesz_projection",
    "fourier_coeffs_realization", "f_row_from_generating_realization",
    "f_row_from_characteristic_realization",
    "generating_realization_from_characteristic", "f_row_lossless",
    "phi_coeffs_lossless", "moment_expansion_coeffs",
    "symmetric_similarity_check",
]


# ---------------------------------------------------------------------------
# the realization quadruple

@dataclass
class StateSpace:
    """Realization quadruple ``(A, B, C, D)`` with a center tag.

    ``center="inf"`` evaluates ``D + C (lam I - A)^(-1) B``;
    ``center="zero"`` evaluates ``D + lam C (I - lam A)^(-1) B``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    center: str = "inf"

    def __post_init__(self) -> None:
        self.A = _require_square(as_matrix(self.A), "state matrix")
        self.B = as_matrix(self.B)
        self.C = as_matrix(self.C)
        self.D = as_matrix(self.D)
        n = self.A.shape[0]
        if self.B.shape[0] != n or self.C.shape[1] != n:
            raise DimMismatch("B/C sizes do not match the state dimension")
        if self.D.shape != (self.C.shape[0], self.B.shape[1]):
            raise DimMismatch("D must match C rows x B columns")
        if self.center not in ("inf", "zero"):
            raise ValueError(f"unknown center tag {self.center!r}")

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.D.shape[0]

    @property
    def q(self) -> int:
        return self.D.shape[1]

    def eval(self, lam: complex, tol: Tolerances | None = None) -> np.ndarray:
        """Transfer value at ``lam``; :class:`PoleAt` near a pole."""
        tol = _tol(tol)
        eye = np.eye(self.n_states, dtype=complex)
        try:
            if self.center == "inf":
                return self.D + self.C @ lu_solve(lam * eye - self.A, self.B, tol)
            return self.D + lam * (self.C @ lu_solve(eye - lam * self.A, self.B, tol))
        except Singular as exc:
            raise PoleAt(f"transfer evaluation at lam = {lam}") from exc


def observability_rank(C, A, tol: Tolerances | None = None) -> int:
    """Rank of the stacked observability matrix ``[C; CA; ...; C A^(N-1)]``."""
    tol = _tol(tol)
    C, A = as_matrix(C), _require_square(as_matrix(A))
    blocks, lead = [], C
    for _ in range(A.shape[0]):
        blocks.append(lead)
        lead = lead @ A
    return _numeric_rank(np.vstack(blocks) if blocks else C, tol)


def controllability_rank(A, B, tol: Tolerances | None = None) -> int:
    """Rank of ``[B, AB, ..., A^(N-1) B]``."""
    tol = _tol(tol)
    A, B = _require_square(as_matrix(A)), as_matrix(B)
    blocks, lead = [], B
    for _ in range(A.shape[0]):
        blocks.append(lead)
        lead = A @ lead
    return _numeric_rank(np.hstack(blocks) if blocks else B, tol)


def is_minimal(S: StateSpace, tol: Tolerances | None = None) -> bool:
    """Observable and controllable, i.e. both ranks equal the state size."""
    return (observability_rank(S.C, S.A, tol) == S.n_states
            and controllability_rank(S.A, S.B, tol) == S.n_states)


def _numeric_rank(M: np.ndarray, tol: Tolerances) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def product(S1: StateSpace, S2: StateSpace) -> StateSpace:
    """Realization of the pointwise product ``S1(lam) S2(lam)``.

    Block construction ``A = [[A1, B1 C2], [0, A2]]``, ``B = [B1 D2; B2]``,
    ``C = [C1, D1 C2]``, ``D = D1 D2``; both factors must be centered at
    infinity.
    """
    if S1.center != "inf" or S2.center != "inf":
        raise PreconditionFail("product requires both centers at infinity")
    if S1.q != S2.p:
        raise DimMismatch(f"inner dimensions {S1.q} != {S2.p}")
    n1, n2 = S1.n_states, S2.n_states
    A = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    A[:n1, :n1] = S1.A
    A[:n1, n1:] = S1.B @ S2.C
    A[n1:, n1:] = S2.A
    B = np.zeros((n1 + n2, S2.q), dtype=complex)
    B[:n1] = S1.B @ S2.D
    B[n1:] = S2.B
    C = np.zeros((S1.p, n1 + n2), dtype=complex)
    C[:, :n1] = S1.C
    C[:, n1:] = S1.D @ S2.C
    return StateSpace(A, B, C, S1.D @ S2.D, "inf")


def recenter_zero(S: StateSpace, tol: Tolerances | None = None) -> StateSpace:
    """Rewrite a center-infinity realization around the origin.

    With ``A`` invertible the same function is realized by
    ``(A^(-1), A^(-1) B, -C A^(-1), D - C A^(-1) B)`` centered at zero.
    """
    tol = _tol(tol)
    if S.center != "inf":
        raise PreconditionFail("input must be centered at infinity")
    Ainv = inverse(S.A, tol)
    return StateSpace(Ainv, Ainv @ S.B, -S.C @ Ainv,
                      S.D - S.C @ Ainv @ S.B, "zero")


def inverse_triple(S: StateSpace, tol: Tolerances | None = None):
    """The triple ``(A^(-1), C (I + iA)^(-1), A^(-1) B)``.

    Minimal whenever the input triple is; requires ``A`` and ``I + iA``
    invertible.
    """
    tol = _tol(tol)
    eye = np.eye(S.n_states, dtype=complex)
    Ainv = inverse(S.A, tol)
    Cnew = herm(lu_solve(herm(eye + 1j * S.A), herm(S.C), tol))
    return Ainv, Cnew, Ainv @ S.B


# ---------------------------------------------------------------------------
# skew self-adjoint circle structure

@dataclass(frozen=True)
class LosslessCertificate:
    """Hermitian invertible metric ``H`` with the three structure residuals.

    ``residuals = (|A - H^(-1) A^(-*) H|, |D + D* + C H^(-1) C*|,
    |B + A H^(-1) C*|)`` in the max norm.
    """

    H: np.ndarray
    residuals: tuple

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    def ok(self, scale: float = 1.0, tol: Tolerances | None = None) -> bool:
        return self.max_residual <= _tol(tol).eq_tol * max(scale, 1.0)


def lossless_check(S: StateSpace, H, tol: Tolerances | None = None) -> LosslessCertificate:
    """Residuals of the circle skew-self-adjointness structure.

    A minimal realization has ``R(lam) + R(lam)* = 0`` on the unit circle
    exactly when some Hermitian invertible ``H`` satisfies
    ``A = H^(-1) A^(-*) H``, ``D + D* = -C H^(-1) C*``,
    ``B = -A H^(-1) C*``.
    """
    tol = _tol(tol)
    H = _require_square(as_matrix(H))
    if max_abs(H - herm(H)) > tol.eq_tol * max(max_abs(H), 1e-300):
        raise NotHermitian("metric H must be Hermitian")
    Hinv = inverse(H, tol)
    Ainv_star = inverse(herm(S.A), tol)
    r1 = max_abs(S.A - Hinv @ Ainv_star @ H)
    r2 = max_abs(S.D + herm(S.D) + S.C @ Hinv @ herm(S.C))
    r3 = max_abs(S.B + S.A @ Hinv @ herm(S.C))
    return LosslessCertificate(H, (r1, r2, r3))


def cara_from_unitary(C, A, H, D, tol: Tolerances | None = None):
    """Function ``lam -> (D - D*)/2 + (1/2) C (A + lam I)(A - lam I)^(-1) H^(-1) C*``.

    For a metric-unitary state matrix this reproduces the transfer of the
    lossless realization from ``(C, A, H)`` alone.
    """
    tol = _tol(tol)
    C, A, H, D = as_matrix(C), as_matrix(A), as_matrix(H), as_matrix(D)
    Hinv = inverse(H, tol)
    skew = (D - herm(D)) / 2.0
    eye = np.eye(A.shape[0], dtype=complex)

    def phi(lam: complex) -> np.ndarray:
        try:
            core = lu_solve(A - lam * eye, Hinv @ herm(C), tol)
        except Singular as exc:
            raise PoleAt(f"evaluation at lam = {lam}") from exc
        return skew + 0.5 * (C @ (A + lam * eye) @ core)

    return phi


def lossless_kernel_check(S: StateSpace, H, lam: complex, nu: complex,
                          tol: Tolerances | None = None) -> float:
    """Residual of
    ``(phi(lam) + phi(nu)*)/(1 - lam nu~) = C (lam I - A)^(-1) H^(-1) (nu I - A)^(-*) C*``.
    """
    tol = _tol(tol)
    H = as_matrix(H)
    eye = np.eye(S.n_states, dtype=complex)
    lhs = (S.eval(lam, tol) + herm(S.eval(nu, tol))) \
        / (1.0 - lam * complex(nu).conjugate())
    left = S.C @ lu_solve(lam * eye - S.A, inverse(H, tol), tol)
    right = lu_solve(complex(nu).conjugate() * eye - herm(S.A), herm(S.C), tol)
    return max_abs(lhs - left @ right)


def cayley_schur(S: StateSpace, H, tol: Tolerances | None = None) -> StateSpace:
    """Center-zero realization of the Cayley transform
    ``(phi - I)(phi + I)^(-1)``.

    Requires ``D = D*`` and ``(1/2) C H^(-1) C* = I`` (i.e. ``phi(0) = I``);
    then the transform is realized by state matrix
    ``(I - (1/2) H^(-1) C* C) A^(-1)``, input ``H^(-1) C*`` and output
    ``(1/2) C A^(-1)``, with zero feedthrough.
    """
    tol = _tol(tol)
    H = as_matrix(H)
    p = S.p
    Hinv = inverse(H, tol)
    if max_abs(S.D - herm(S.D)) > tol.eq_tol * max(max_abs(S.D), 1.0):
        raise PreconditionFail("D must be Hermitian")
    gram = 0.5 * (S.C @ Hinv @ herm(S.C))
    if max_abs(gram - np.eye(p)) > math.sqrt(tol.eq_tol):
        raise PreconditionFail("phi(0) must be the identity")
    Ainv = inverse(S.A, tol)
    eye = np.eye(S.n_states, dtype=complex)
    state = (eye - 0.5 * (Hinv @ herm(S.C) @ S.C)) @ Ainv
    return StateSpace(state, Hinv @ herm(S.C), 0.5 * (S.C @ Ainv),
                      np.zeros((p, p), dtype=complex), "zero")


# ---------------------------------------------------------------------------
# positivity certificates

@dataclass
class KypCertificate:
    """Hermitian ``P`` with auxiliary factors ``L`` (N x r) and ``W`` (p x r)."""

    P: np.ndarray
    L: np.ndarray
    W: np.ndarray

    def __post_init__(self) -> None:
        self.P = _require_square(as_matrix(self.P))
        self.L = np.asarray(self.L, dtype=complex)
        self.W = np.asarray(self.W, dtype=complex)
        if self.L.ndim != 2 or self.W.ndim != 2:
            raise DimMismatch("L and W must be matrices")
        if self.L.shape[0] != self.P.shape[0] or self.L.shape[1] != self.W.shape[1]:
            raise DimMismatch("L must be N x r and W must be p x r")
        tol = Tolerances()
        if max_abs(self.P - herm(self.P)) > tol.eq_tol * max(max_abs(self.P), 1e-300):
            raise NotHermitian("P must be Hermitian")


def kyp_verify(S: StateSpace, cert: KypCertificate,
               tol: Tolerances | None = None) -> tuple[float, float, float]:
    """Frobenius residuals of the three certificate equations.

    ``(|P - A P A* + L L*|_F, |A P C* + B + L W*|_F,
    |W W* - D - D* - C P C*|_F)``.  The Frobenius norm keeps the residuals
    invariant under unitary state-space changes of basis.
    """
    P, L, W = cert.P, cert.L, cert.W
    if P.shape[0] != S.n_states or W.shape[0] != S.p:
        raise DimMismatch("certificate dimensions do not match the realization")
    r1 = float(np.linalg.norm(P - S.A @ P @ herm(S.A) + L @ herm(L)))
    r2 = float(np.linalg.norm(S.A @ P @ herm(S.C) + S.B + L @ herm(W)))
    r3 = float(np.linalg.norm(W @ herm(W) - S.D - herm(S.D) - S.C @ P @ herm(S.C)))
    return r1, r2, r3


def kyp_kernel_decomposition(S: StateSpace, cert: KypCertificate,
                             lam: complex, nu: complex,
                             tol: Tolerances | None = None) -> float:
    """Residual of the certificate's kernel decomposition at one point pair:

    ``(phi(lam) + phi(nu)*)/(1 - lam nu~) - C (lam I - A)^(-1) P (nu~ I - A*)^(-1) C*
    - (W - C (lam I - A)^(-1) L)(W - C (nu I - A)^(-1) L)* / (1 - lam nu~)``.
    """
    tol = _tol(tol)
    nub = complex(nu).conjugate()
    eye = np.eye(S.n_states, dtype=complex)
    denom = 1.0 - lam * nub
    lhs = (S.eval(lam, tol) + herm(S.eval(nu, tol))) / denom
    res_l = lu_solve(lam * eye - S.A, np.hstack([cert.P, cert.L]), tol)
    res_r = lu_solve(nub * eye - herm(S.A), herm(S.C), tol)
    n = S.n_states
    term1 = S.C @ res_l[:, :n] @ res_r
    wl = cert.W - S.C @ res_l[:, n:]
    wr = cert.W - S.C @ lu_solve(complex(nu) * eye - S.A, cert.L, tol)
    term2 = (wl @ herm(wr)) / denom
    return max_abs(lhs - term1 - term2)


# ---------------------------------------------------------------------------
# spectral projector and Fourier coefficients

def riesz_projection(A, nodes: int = 256, tol: Tolerances | None = None) -> np.ndarray:
    """Spectral projector onto the eigenvalues of ``A`` inside the unit disk.

    Contour integral ``(1/2 pi i) closed-integral (lam I - A)^(-1) dlam`` on
    the unit circle as trapezoidal quadrature of
    ``e^{it} (e^{it} I - A)^(-1)``.  Raises :class:`SpectrumOnCircle` when
    idempotency ``|P^2 - P| < 1e-8`` fails, which also flags too-coarse
    quadrature near the circle.
    """
    tol = _tol(tol)
    A = _require_square(as_matrix(A))
    eye = np.eye(A.shape[0], dtype=complex)

    def g(t: float) -> np.ndarray:
        z = np.exp(1j * t)
        return z * lu_solve(z * eye - A, eye, tol)

    P = circle_quadrature(g, nodes)
    if max_abs(P @ P - P) >= 1e-8:
        raise SpectrumOnCircle(
            f"projector idempotency residual {max_abs(P @ P - P):.3e}")
    return P


def _complement_basis(P: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Orthonormal basis of the range of ``I - P`` by pivoted QR."""
    n = P.shape[0]
    comp = np.eye(n, dtype=complex) - P
    Q, R, _ = scipy.linalg.qr(comp, pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > tol.rank_tol * diag.max())) if diag.size else 0
    return Q[:, :rank]


def _outer_inverse(A: np.ndarray, P: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Map ``G`` acting as ``((I-P) A)^(-1)`` on ran(I-P) and 0 on ran(P)."""
    comp = np.eye(A.shape[0], dtype=complex) - P
    Q = _complement_basis(P, tol)
    M = herm(Q) @ comp @ A @ Q
    return Q @ lu_solve(M, herm(Q) @ comp, tol)


def fourier_coeffs_realization(S: StateSpace, P, u: int,
                               tol: Tolerances | None = None) -> np.ndarray:
    """Fourier coefficient ``R_u`` of the circle values of the realization.

    With ``P`` the Riesz projector of the state matrix,

        R_u = delta_{u0} D - C ((I-P)A)^(-u-1) (I-P) B     (u >= 0),
        R_u = C (P A)^(-u-1) P B                           (u < 0),

    where negative powers of ``(I-P)A`` are taken on the range of ``I - P``.
    """
    tol = _tol(tol)
    P = as_matrix(P)
    if S.center != "inf":
        raise PreconditionFail("Fourier coefficients need a center-infinity realization")
    if u < 0:
        lead = np.linalg.matrix_power(P @ S.A, -u - 1)
        return S.C @ lead @ P @ S.B
    G = _outer_inverse(S.A, P, tol)
    term = S.C @ np.linalg.matrix_power(G, u + 1) @ S.B
    out = -term
    if u == 0:
        out = out + S.D
    return _require_finite(out, "Fourier coefficient")


# ---------------------------------------------------------------------------
# boundary rows of attached lattice grids

def f_row_from_generating_realization(S0: StateSpace, m: int,
                                      tol: Tolerances | None = None) -> np.ndarray:
    """Boundary value ``f(m, 0) = -C0 (I + i A0)^(-1) A0^(-m-1) B0``.

    ``S0`` realizes the left generating series; the formula needs ``A0``
    invertible and the generating series to vanish at ``i`` (its value at
    ``i`` equals the characteristic function's value at infinity), otherwise
    :class:`PreconditionFail`.
    """
    tol = _tol(tol)
    if S0.center != "inf":
        raise PreconditionFail("expected a center-infinity realization")
    eye = np.eye(S0.n_states, dtype=complex)
    A0inv = inverse(S0.A, tol)
    val_i = S0.D - 1j * (S0.C @ lu_solve(eye + 1j * S0.A, S0.B, tol))
    scale = max(max_abs(S0.D), max_abs(S0.B) * max_abs(S0.C), 1.0)
    if max_abs(val_i) > math.sqrt(_tol(tol).eq_tol) * scale:
        raise PreconditionFail(
            f"generating series value at i is {max_abs(val_i):.3e}, not 0")
    lead = S0.C @ lu_solve(eye + 1j * S0.A, np.linalg.matrix_power(A0inv, m + 1), tol)
    return -(lead @ S0.B)


def f_row_from_characteristic_realization(S: StateSpace, m: int,
                                          tol: Tolerances | None = None) -> np.ndarray:
    """Boundary value ``f(m, 0) = -C (sqrt2 A^(-1) - i I)^m A^(-1) B``.

    ``S`` realizes the characteristic (disk) function with zero value at
    infinity; requires ``A`` invertible.
    """
    tol = _tol(tol)
    Ainv = inverse(S.A, tol)
    eye = np.eye(S.n_states, dtype=complex)
    lead = np.linalg.matrix_power(SQRT2 * Ainv - 1j * eye, m)
    return -(S.C @ lead @ Ainv @ S.B)


def generating_realization_from_characteristic(S: StateSpace,
                                               tol: Tolerances | None = None) -> StateSpace:
    """Realization of the generating series from one of the characteristic
    function (composition with the disk map):

        A0 = A (sqrt2 I - iA)^(-1),    B0 = sqrt2 (sqrt2 I - iA)^(-1) B,
        C0 = C (sqrt2 I - iA)^(-1),    D0 = D + i C (sqrt2 I - iA)^(-1) B.

    Requires ``sqrt2 I - iA`` invertible; minimality is preserved.
    """
    tol = _tol(tol)
    eye = np.eye(S.n_states, dtype=complex)
    W = inverse(SQRT2 * eye - 1j * S.A, tol)
    return StateSpace(S.A @ W, SQRT2 * (W @ S.B), S.C @ W,
                      S.D + 1j * (S.C @ W @ S.B), "inf")


def f_row_lossless(C, A, H, m: int, tol: Tolerances | None = None) -> np.ndarray:
    """Boundary value ``f(m, 0) = C (sqrt2 A^(-1) - i I)^m H^(-1) C*``.

    ``A`` must be unitary for the metric ``H`` (``A H^(-1) A* = H^(-1)``),
    else :class:`NotLossless`.
    """
    tol = _tol(tol)
    C, A, H = as_matrix(C), _require_square(as_matrix(A)), as_matrix(H)
    Hinv = inverse(H, tol)
    if max_abs(A @ Hinv @ herm(A) - Hinv) > tol.eq_tol * max(max_abs(Hinv), 1.0) * 10.0:
        raise NotLossless("state matrix is not H-unitary")
    eye = np.eye(A.shape[0], dtype=complex)
    lead = np.linalg.matrix_power(SQRT2 * inverse(A, tol) - 1j * eye, m)
    return C @ lead @ Hinv @ herm(C)


def phi_coeffs_lossless(C, A, H, order: int,
                        tol: Tolerances | None = None) -> TruncatedSeries:
    """Generating series of the lossless grid:
    ``Phi_0 = (1/2) C H^(-1) C*`` and, for m >= 1,
    ``Phi_m = sqrt2 C A^(-1) (sqrt2 A^(-1) - i I)^(m-1) H^(-1) C*``."""
    tol = _tol(tol)
    C, A, H = as_matrix(C), _require_square(as_matrix(A)), as_matrix(H)
    Hinv = inverse(H, tol)
    if max_abs(A @ Hinv @ herm(A) - Hinv) > tol.eq_tol * max(max_abs(Hinv), 1.0) * 10.0:
        raise NotLossless("state matrix is not H-unitary")
    Ainv = inverse(A, tol)
    eye = np.eye(A.shape[0], dtype=complex)
    step = SQRT2 * Ainv - 1j * eye
    coeffs = [0.5 * (C @ Hinv @ herm(C))]
    lead = SQRT2 * (C @ Ainv)
    for _ in range(1, order + 1):
        coeffs.append(lead @ Hinv @ herm(C))
        lead = lead @ step
    return TruncatedSeries(np.stack(coeffs))


# ---------------------------------------------------------------------------
# moment expansion and symmetric similarity

def moment_expansion_coeffs(A, n: int, tol: Tolerances | None = None) -> np.ndarray:
    """Coefficients ``a_(n,k)`` with
    ``sqrt2 (sqrt2 I - iA)^(-(n+1)) = sum_k a_(n,k) A^k``.

    ``k`` runs below the degree of the minimal polynomial of ``A``, detected
    as the first power linearly dependent on the lower ones (rank
    tolerance, orthogonalized least squares).
    """
    tol = _tol(tol)
    A = _require_square(as_matrix(A))
    N = A.shape[0]
    eye = np.eye(N, dtype=complex)
    powers, lead = [], eye
    for _ in range(N + 1):
        powers.append(lead.ravel())
        lead = lead @ A
    basis = np.column_stack(powers[:1])
    deg = 1
    for k in range(1, N + 1):
        cand = np.column_stack(powers[: k + 1])
        if _numeric_rank(cand, tol) == _numeric_rank(basis, tol):
            break
        basis, deg = cand, k + 1
    W = inverse(SQRT2 * eye - 1j * A, tol)
    target = SQRT2 * np.linalg.matrix_power(W, n + 1)
    coeffs, *_ = np.linalg.lstsq(np.column_stack(powers[:deg]),
                                 target.ravel(), rcond=None)
    return _require_finite(coeffs, "expansion coefficients")


def symmetric_similarity_check(S1: StateSpace, S2: StateSpace,
                               tol: Tolerances | None = None) -> np.ndarray:
    """Similarity ``S`` with ``S A1 = A2* S``, ``S B = C*`` and ``B* S = C``.

    For minimal realizations sharing ``B`` and ``C`` whose boundary data are
    adjoints of each other, the unique such ``S`` is Hermitian; it is found
    by least squares over the two observability (Krylov) bases and verified
    against all three relations.  Raises :class:`NotSimilar` when the
    relations cannot be met.
    """
    tol = _tol(tol)
    if S1.n_states != S2.n_states:
        raise NotSimilar("state dimensions differ")
    if max_abs(S1.B - S2.B) > tol.eq_tol * max(max_abs(S1.B), 1.0) \
            or max_abs(S1.C - S2.C) > tol.eq_tol * max(max_abs(S1.C), 1.0):
        raise PreconditionFail("expected shared B and C data")
    n = S1.n_states
    obs1, lead = [], S1.C
    for _ in range(n):
        obs1.append(lead)
        lead = lead @ S1.A
    obs2, lead = [], herm(S1.B)
    for _ in range(n):
        obs2.append(lead)
        lead = lead @ herm(S2.A)
    O1, O2 = np.vstack(obs1), np.vstack(obs2)
    S, *_ = np.linalg.lstsq(O2, O1, rcond=None)
    scale = max(max_abs(S), 1e-300)
    checks = (
        max_abs(O2 @ S - O1),
        max_abs(S @ S1.A - herm(S2.A) @ S),
        max_abs(S @ S1.B - herm(S1.C)),
        max_abs(herm(S1.B) @ S - S1.C),
    )
    if max(checks) > math.sqrt(tol.eq_tol) * scale:
        raise NotSimilar(f"intertwining residuals {tuple(f'{c:.2e}' for c in checks)}")
    return _require_finite(S, "similarity")
