"""Matrix-valued discrete analytic functions on the lattice quadrant.

Construction from boundary data, spectral measures, operator pairs and
rational spectral factors; verification of the lattice relation, positivity,
Toeplitz congruence and displacement structure; state-space realization
calculus; a ``daft`` command-line front end.
"""

from .core import (
    AmbiguousSource, CornerMismatch, DaftError, DimMismatch,
    DivergenceWarning, IndexRange, Inertia, NotContraction, NotDaf,
    NotHermitian, NotLossless, NotPSD, NotSimilar, PairConditionWarning,
    ParseError, PoleAt, PreconditionFail, Singular, SpectrumClash,
    SpectrumOnCircle, Tolerances, TooSmall, Unstable, circle_quadrature,
    hermitian_eig, lu_solve, psd_check, sqrt_psd,
)
from .lattice import (
    DafGrid, OperatorPair, a2_from_a1, cr_residual, daf_power,
    extend_from_boundary, grid_from_pair, odot_resolvent,
    pair_condition_residual, pair_daf_eval, rational_daf_eval,
)
from .moebius import (
    Kernel2, Region, TruncatedSeries, boundary_from_characteristic,
    boundary_generating, boundary_generating_right,
    characteristic_from_boundary, kernel_from_boundary, region_classify,
    sigma, sigma_inv, symmetric_point,
)
from .moments import (
    AtomicMeasure, MomentSequence, daf_from_measure, daf_from_toeplitz,
    f_row_from_moments, grid_from_measure, growth_bounds_check,
    herglotz_eval, kernel_eval_measure, l_matrix, moments_from_f_row,
    one_step_fill, phi_coeffs_from_measure, toeplitz_from_daf, trig_moment,
)
from .realization import (
    KypCertificate, LosslessCertificate, StateSpace, cara_from_unitary,
    cayley_schur, controllability_rank, f_row_from_characteristic_realization,
    f_row_from_generating_realization, f_row_lossless,
    fourier_coeffs_realization, generating_realization_from_characteristic,
    inverse_triple, is_minimal, kyp_kernel_decomposition, kyp_verify,
    lossless_check, lossless_kernel_check, moment_expansion_coeffs,
    observability_rank, phi_coeffs_lossless, product, recenter_zero,
    riesz_projection, symmetric_similarity_check,
)
from .spectral import (
    DilationCalculus, SpectralFactor, cara_from_factor, density_realization,
    dilation_extend, f_from_density_quadrature, f_row_from_density,
    f_row_from_factor, factor_density, fourier_coeffs_factor,
    grid_from_factor, kyp_certificate_for_factor, phi_realization_from_factor,
    stein_solve, symmetric_extension_from_factor,
)
from .displacement import (
    DisplacementData, displacement_decompose, shift_matrix, theta,
    theta_kernel_check,
)

__version__ = "0.1.0"
