"""Laplace-domain characteristic functions.

``E(z1, z2; t) = E[exp(i z1 X(t) + i z2 I(t))]`` and its Laplace transform in
``t`` (argument ``p``, always with ``Re(p) > 0``).  The transform follows from
two sectionally analytic functions whose numerators must vanish at the
denominator roots lying in their half-planes; those two conditions form a
2x2 linear system for the constants ``G0``, ``G1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalInstability
from .model import ModelParams
from .special import EULER_INVERTER, laplace_invert, sqrt_principal

__all__ = [
    "SpectralPoint",
    "RootQuad",
    "GPair",
    "roots",
    "g_coefficients",
    "phi_numerator",
    "phi_denominator",
    "phi_tilde",
    "e_tilde",
    "e_tilde_x",
    "e_tilde_i",
    "cf_x_time",
    "cf_i_time",
]


@dataclass(frozen=True)
class SpectralPoint:
    z1: float
    z2: float
    p: complex

    def __post_init__(self):
        _check_p(self.p)


@dataclass(frozen=True)
class RootQuad:
    nu_plus: complex
    nu_minus: complex
    kappa_plus: complex
    kappa_minus: complex


@dataclass(frozen=True)
class GPair:
    g0: complex
    g1: complex

    @property
    def psi0(self):
        return -1j * self.g1


def _check_p(p):
    if not np.all(np.real(p) > 0.0):
        raise DomainError(f"Laplace argument needs Re(p) > 0, got {p!r}")


def roots(params: ModelParams, z2, p):
    """Roots ``nu+-`` (with ``z2``) and ``kappa+-`` (without) of the denominators.

    ``nu+- = -mu +- sqrt(mu^2 + p - i z2)``, ``kappa+- = mu +- sqrt(mu^2 + p)``.
    The members that would suffer cancellation (``nu+``, ``kappa-``) are
    formed from the product identities instead of by subtraction.
    """
    _check_p(p)
    mu = params.mu
    r = sqrt_principal(mu * mu + p - 1j * np.asarray(z2, dtype=float))
    k = sqrt_principal(mu * mu + np.asarray(p, dtype=complex))
    nu_plus = (p - 1j * z2) / (mu + r)
    nu_minus = -(mu + r)
    kappa_plus = mu + k
    kappa_minus = -p / (mu + k)
    return RootQuad(nu_plus, nu_minus, kappa_plus, kappa_minus)


def g_coefficients(params: ModelParams, z2, p, rq: RootQuad | None = None):
    """Solve the removable-singularity conditions for ``G0`` and ``G1``.

    ``G0 + i nu+ (1+eta) G1 + 1/2 = 0`` and ``G0 + i kappa- (1-eta) G1 - 1/2 = 0``.
    """
    rq = rq or roots(params, z2, p)
    eta = params.eta
    d = rq.nu_plus * (1.0 + eta) - rq.kappa_minus * (1.0 - eta)
    if np.any(np.abs(d) < 1e-14):
        raise NumericalInstability("G0/G1 system is (numerically) singular")
    g1 = 1j / d
    g0 = -0.5 - 1j * rq.nu_plus * (1.0 + eta) * g1
    return GPair(g0, g1)


def phi_numerator(z1, sign, params: ModelParams, gp: GPair):
    """``G0 + z1 G1 +- i eta z1 Psi0 +- 1/2`` for the upper (+1) / lower (-1) branch."""
    return gp.g0 + z1 * gp.g1 + sign * (1j * params.eta * z1 * gp.psi0 + 0.5)


def phi_denominator(z1, sign, params: ModelParams, z2, p):
    """``z1^2 +- 2 i mu z1 + p - (1 +- 1) i z2 / 2``."""
    mu = params.mu
    if sign > 0:
        return z1 * z1 + 2j * mu * z1 + p - 1j * z2
    return z1 * z1 - 2j * mu * z1 + p


def phi_tilde(z1c, params: ModelParams, z2, p):
    """Sectionally analytic function off the real axis (branch chosen by ``Im z1c``)."""
    z1c = complex(z1c)
    if z1c.imag == 0.0:
        raise DomainError("phi_tilde is defined off the real axis; use e_tilde on it")
    sign = 1 if z1c.imag > 0 else -1
    gp = g_coefficients(params, z2, p)
    return phi_numerator(z1c, sign, params, gp) / phi_denominator(z1c, sign, params, z2, p)


def e_tilde(z1, z2, p, params: ModelParams):
    """Laplace transform of the joint characteristic function of (X, I).

    Jump of the sectional function across the real axis, evaluated with the
    half-plane formulas (their denominators do not vanish on the axis).
    """
    gp = g_coefficients(params, z2, p)
    upper = phi_numerator(z1, 1, params, gp) / phi_denominator(z1, 1, params, z2, p)
    lower = phi_numerator(z1, -1, params, gp) / phi_denominator(z1, -1, params, z2, p)
    return upper - lower


def e_tilde_x(z, p, params: ModelParams):
    """Laplace transform of the characteristic function of X(t)."""
    rq = roots(params, 0.0, p)
    eta = params.eta
    kp, km = rq.kappa_plus, rq.kappa_minus
    return ((1.0 + eta) / (z + 1j * kp) - (1.0 - eta) / (z - 1j * kp)) / (2j * km)


def e_tilde_i(z, p, params: ModelParams):
    """Laplace transform of the characteristic function of I(t)."""
    rq = roots(params, z, p)
    eta = params.eta
    num = (1.0 + eta) * rq.kappa_plus - (1.0 - eta) * rq.nu_minus
    den = rq.nu_minus * rq.kappa_plus * ((1.0 - eta) * rq.kappa_minus - (1.0 + eta) * rq.nu_plus)
    return num / den


def cf_x_time(z, t, params: ModelParams, inverter=EULER_INVERTER):
    """``E[exp(i z X(t))]`` by numerical Laplace inversion."""
    z = float(z)
    return complex(laplace_invert(lambda p: e_tilde_x(z, p, params), t, inverter))


def cf_i_time(z, t, params: ModelParams, inverter=EULER_INVERTER):
    """``E[exp(i z I(t))]`` by numerical Laplace inversion.

    This function oscillates in ``t``; the real-axis Gaver-Stehfest rule
    loses several digits here, hence the Euler default.
    """
    z = float(z)
    return complex(laplace_invert(lambda p: e_tilde_i(z, p, params), t, inverter))
