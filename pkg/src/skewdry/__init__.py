"""Exact laws and Monte Carlo simulation of skew Brownian motion with dry friction.

``dX = -2 mu sign(X) dt + eta dL + sqrt(2) dW``, ``X(0) = 0``.
"""
from .analytic import (
    DensityCurve,
    Law,
    cdf_occupation,
    cdf_x,
    cdf_x_steady,
    chi,
    chi_plus,
    pdf_occupation,
    pdf_occupation_scaled,
    pdf_x,
    pdf_x_steady,
    sample_curve,
)
from .errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    NumericalInstability,
    ResourceError,
    SkewDryError,
)
from .model import ModelParams, mirror, params_new
from .simulate import (
    EmpiricalSummary,
    PathFunctionals,
    SimConfig,
    Which,
    ks_distance,
    local_time_reference_check,
    run_monte_carlo,
    simulate_path,
)
from .special import (
    DEFAULT_INVERTER,
    EULER_INVERTER,
    InversionMethod,
    LaplaceInverter,
    QuadratureRule,
    adaptive_quad,
    erfc,
    gauss_laguerre,
    laplace_invert,
    sqrt_principal,
)
from .transforms import (
    GPair,
    RootQuad,
    SpectralPoint,
    cf_i_time,
    cf_x_time,
    e_tilde,
    e_tilde_i,
    e_tilde_x,
    g_coefficients,
    phi_tilde,
    roots,
)

__version__ = "0.1.0"
