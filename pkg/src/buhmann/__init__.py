"""Compactly supported radial kernels of Buhmann type.

Evaluation of the kernel family and its named specializations (Askey,
Wendland, the h-kernels), Montee and weighted-difference operators, Hankel
spectral densities with quadrature and 1F2 closed-form backends,
positive-definiteness certification, origin-smoothness diagnostics, and a
kernel interpolation harness.
"""

__version__ = "0.1.0"

from .specfn import (
    EvaluationError,
    PrecisionLossError,
    Tolerance,
    default_tolerance,
)
from .kernels import (
    BuhmannParams,
    DiffParams,
    RadialKernel,
    askey_eval,
    buhmann_eval,
    h_eval,
    kernel_eval,
    wendland_eval,
)
from .operators import difference_eval, montee, montee_k
from .spectral import (
    SpectralDensity,
    hankel_h_closed,
    hankel_quadrature,
    I_integral,
    laplace_identity_rhs,
)
from .certify import (
    Certificate,
    CMQuery,
    certify_fixed_scale,
    certify_sufficient,
    check_cm_numeric,
    check_spectral_monotone,
    cm_rule,
    psd_matrix_check,
)
from .smoothness import (
    INFINITE,
    SmoothnessReport,
    estimate_order,
    h_deriv_at_zero,
    predict_order,
)
from .interp import GramSystem, PointSet, build_gram, condition_report, solve_interpolate
