"""Smoothing of Lipschitz functions sampled on grids.

Given samples of an L-Lipschitz ``f`` and ``eps > 0``, :func:`smooth`
returns a smooth ``g`` with ``|f - g| <= eps`` and ``Lip(g) <= L + eps``,
built from Lasry-Lions envelopes, Gaussian mollification and certified
transition maps; :func:`verify_theorem1` measures both bounds.
"""
from .envelopes import (
    EnvelopeParams,
    inf_conv_quadratic_1d,
    lasry_lions,
    moreau_inf,
    moreau_sup,
    select_lambda,
)
from .errors import (
    CertificationError,
    DomainError,
    EvaluationError,
    GridMismatchError,
    LipSmoothError,
    ParameterError,
    ResolutionError,
)
from .grid import (
    Box,
    FunctionOracle,
    GridFunction,
    estimate_lipschitz,
    sample,
    second_difference_bound,
    sup_distance,
)
from .mollifiers import (
    Mollifier1D,
    ThetaBar,
    build_alpha,
    build_theta_bar,
    gaussian_mollify,
    select_kappa,
    select_sigma,
)
from .pipeline import (
    SliceSet,
    SmoothingParams,
    SmoothResult,
    compose_slices,
    sign_split_smooth,
    slice,
    smooth,
    smooth_bounded,
    smooth_nonneg,
)
from .verify import CertReport, verify_envelope_stage, verify_theorem1

__all__ = [
    "Box", "CertReport", "CertificationError", "DomainError", "EnvelopeParams", "EvaluationError",
    "FunctionOracle", "GridFunction", "GridMismatchError", "LipSmoothError", "Mollifier1D",
    "ParameterError", "ResolutionError", "SliceSet", "SmoothResult", "SmoothingParams", "ThetaBar",
    "build_alpha", "build_theta_bar", "compose_slices", "estimate_lipschitz", "gaussian_mollify",
    "inf_conv_quadratic_1d", "lasry_lions", "moreau_inf", "moreau_sup", "sample",
    "second_difference_bound", "select_kappa", "select_lambda", "select_sigma",
    "sign_split_smooth", "slice", "smooth", "smooth_bounded", "smooth_nonneg", "sup_distance",
    "verify_envelope_stage", "verify_theorem1",
]
