"""Boundary reproducing kernels of de Branges-Rovnyak spaces on the upper half plane."""

from __future__ import annotations

from .errors import (
    CancellationError,
    DbrkError,
    DomainError,
    IntegralityError,
    LargeImaginary,
    MaxSubdivisions,
    NegativeNorm,
    NoConvergence,
    NotConverging,
    ParameterPole,
    QuadratureFailure,
    SingularityUnresolved,
    SingularPoint,
    Undefined,
    Unmatched,
)
from .exact import (
    GammaRatioSpec,
    HyperSpec,
    anr,
    anr_closed,
    anrs,
    anrs_gamma,
    binomial,
    binomial_half_sum,
    check_bailey,
    check_euler,
    check_pfaff,
    check_zeng_lemma,
    difference_power,
    gamma_ratio_exact,
    hyp2f1_exact,
    hyp2f1_numeric,
    pochhammer,
)
from .experiments import (
    ConditionReport,
    ConvergenceTrace,
    ahern_clark_report,
    coefficient_identities,
    lambda_suite,
    norm_convergence_trace,
    odd_s_probe,
    taylor_remainder_check,
)
from .fields import EXACT, FLOAT, mp_field, resolve_field
from .functions import (
    BlaschkeFactor,
    DerivativeJet,
    Dip,
    OuterDipFactor,
    PhaseFactor,
    PointMassSingularFactor,
    SingularAtInfinityFactor,
    UnitBallFunction,
    derivative_jet,
    eval_b,
    from_description,
    radial_jet_extrapolate,
    rho,
    taylor_coeffs,
)
from .gaussian import GaussianRational
from .kernels import (
    BoundaryKernelEvaluator,
    KernelSpec,
    h_expansion,
    h_function,
    kernel_b,
    kernel_b_z_derivative,
    kernel_rho,
    lambda_coeff,
    norm_sq_boundary,
    norm_sq_interior,
    phi_jet,
)
from .quadrature import (
    IntegralResult,
    QuadratureConfig,
    integrate_real_line,
    l2_pairing,
    representation_boundary,
    representation_interior,
    rho_pairing,
)

__version__ = "0.1.0"
