"""Closed-form laws of skew Brownian motion with dry friction.

Transient density of X(t), its steady state, the density of the time
I(t) spent on the positive half-line, and the scaled occupation density of
I(t)/t.  CDFs are obtained by quadrature of the densities.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError
from .model import ModelParams
from .special import adaptive_quad, erfc, erfcx, gauss_laguerre

__all__ = [
    "Law",
    "DensityCurve",
    "pdf_x",
    "cdf_x",
    "pdf_x_steady",
    "cdf_x_steady",
    "chi_plus",
    "chi",
    "pdf_occupation",
    "pdf_occupation_scaled",
    "cdf_occupation",
    "sample_curve",
]

_SQRT_PI = math.sqrt(math.pi)
# 10-point Gauss-Legendre on [-1, 1] for cumulative integrals
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _check_t(t):
    t = float(t)
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t}")
    return t


# --------------------------------------------------------------------------
# X(t)


def _base_kernel(u, t, mu):
    """Density kernel shared by both half-lines, ``u = |x| >= 0``.

    Integrates to one over [0, inf).  The erfc term is rewritten with erfcx
    when its argument is positive so that no underflow-times-overflow occurs.
    """
    u = np.asarray(u, dtype=float)
    st = math.sqrt(t)
    z = (u - 2.0 * mu * t) / (2.0 * st)
    gauss = np.exp(-((u + 2.0 * mu * t) ** 2) / (4.0 * t))
    zp = np.maximum(z, 0.0)
    right = gauss * (1.0 / (_SQRT_PI * st) + mu * erfcx(zp))
    left = gauss / (_SQRT_PI * st) + mu * np.exp(-2.0 * mu * u) * erfc(np.minimum(z, 0.0))
    return np.where(z >= 0.0, right, left)


def pdf_x(x, t, params: ModelParams):
    """Density of X(t) started from 0.

    The density jumps at the origin; ``x == 0`` returns the right limit
    (weight ``alpha``).
    """
    t = _check_t(t)
    x = np.asarray(x, dtype=float)
    weight = np.where(x >= 0.0, params.alpha, 1.0 - params.alpha)
    out = weight * _base_kernel(np.abs(x), t, params.mu)
    return out if out.ndim else float(out)


def _tail_cutoff(t, mu):
    # beyond u = 2 mu t + 18 sqrt(t) the erfc factor is below erfc(9) and the
    # Gaussian below exp(-81), so the remaining mass is under 1e-36 for any mu
    return 2.0 * mu * t + 18.0 * math.sqrt(t)


def _cumulative(f, points, h):
    """``int_0^{points[i]} f`` for sorted nonnegative ``points``.

    Each gap is cut into pieces no wider than ``h`` and integrated with
    10-point Gauss-Legendre.
    """
    edges = np.concatenate([[0.0], points])
    widths = np.diff(edges)
    pieces = np.maximum(np.ceil(widths / h), 1).astype(int)
    owner = np.repeat(np.arange(widths.size), pieces)
    step = np.repeat(widths / pieces, pieces)
    start = np.repeat(edges[:-1], pieces)
    offset = np.arange(owner.size) - np.repeat(np.cumsum(pieces) - pieces, pieces)
    lo = start + offset * step
    vals = _gl_pieces(f, lo, step)
    per_gap = np.bincount(owner, weights=vals, minlength=widths.size)
    return np.cumsum(per_gap)


def _gl_pieces(f, lo, width):
    nodes = lo[:, None] + 0.5 * width[:, None] * (_GL_X[None, :] + 1.0)
    return f(nodes.ravel()).reshape(nodes.shape) @ _GL_W * 0.5 * width


def _knots(h, cut):
    """Uniform knots of spacing ``h`` over ``[0, 64 h]``, then ratio 1.08 up to ``cut``."""
    uniform = h * np.arange(65)
    if uniform[-1] >= cut:
        return np.append(uniform[uniform < cut], cut)
    n = int(math.ceil(math.log(cut / uniform[-1]) / math.log(1.08)))
    geometric = uniform[-1] * 1.08 ** np.arange(1, n + 1)
    return np.append(np.concatenate([uniform, geometric[geometric < cut]]), cut)


def _cumulative_at(f, knots, u):
    """``int_0^{u_i} f`` for ``0 <= u_i <= knots[-1]``: knot table plus one last piece."""
    table = np.concatenate([[0.0], np.cumsum(_gl_pieces(f, knots[:-1], np.diff(knots)))])
    j = np.clip(np.searchsorted(knots, u, side="right") - 1, 0, knots.size - 1)
    return table[j] + _gl_pieces(f, knots[j], u - knots[j])


def cdf_x(x, t, params: ModelParams):
    """CDF of X(t) by quadrature of :func:`pdf_x`.

    The left half-line mass is integrated from minus infinity (cut where
    the tail bound drops below 1e-36), so ``cdf_x(0)`` is a genuine
    quadrature result rather than ``1 - alpha`` by fiat.
    """
    t = _check_t(t)
    mu = params.mu
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(~np.isfinite(x)):
        raise DomainError("cdf_x needs finite abscissae")

    scale = math.sqrt(t) if mu == 0.0 else min(math.sqrt(t), 1.0 / (2.0 * mu))
    cut = _tail_cutoff(t, mu)
    kernel = lambda u: _base_kernel(u, t, mu)  # noqa: E731
    # geometric break points so the first panels resolve the O(sqrt(t)) core
    # even when the cutoff is many orders of magnitude further out
    pts = list(math.sqrt(t) * 2.0 ** np.arange(-2, 64))
    pts = [p for p in pts + [2.0 * mu * t] if 0.0 < p < cut]
    total, _ = adaptive_quad(kernel, 0.0, cut, tol=1e-15, rtol=1e-14, points=pts)

    u = np.minimum(np.abs(x), cut)
    partial = _cumulative_at(kernel, _knots(0.25 * scale, cut), u)

    a = params.alpha
    out = np.where(x > 0.0, (1.0 - a) * total + a * partial, (1.0 - a) * (total - partial))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------
# steady state


def pdf_x_steady(x, params: ModelParams):
    """Stationary density ``2 mu exp(-2 mu |x|)`` weighted by alpha / 1 - alpha.

    ``x == 0`` belongs to the left branch (weight ``1 - alpha``).
    """
    params.require_steady_state()
    mu = params.mu
    x = np.asarray(x, dtype=float)
    weight = np.where(x > 0.0, params.alpha, 1.0 - params.alpha)
    out = weight * 2.0 * mu * np.exp(-2.0 * mu * np.abs(x))
    return out if out.ndim else float(out)


def cdf_x_steady(x, params: ModelParams):
    params.require_steady_state()
    a, mu = params.alpha, params.mu
    x = np.asarray(x, dtype=float)
    e = np.exp(-2.0 * mu * np.abs(x))
    out = np.where(x > 0.0, 1.0 - a * e, (1.0 - a) * e)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# occupation time


def chi_plus(s1, s2, params: ModelParams):
    """Indicator of the open half-plane ``(1+eta) s1 > (1-eta) s2``."""
    eta = params.eta
    val = (1.0 + eta) * np.asarray(s1, dtype=float) - (1.0 - eta) * np.asarray(s2, dtype=float)
    out = (val > 0.0).astype(int)
    return out if out.ndim else int(out)


def _log_chi(s1, s2, params):
    mu, eta = params.mu, params.eta
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    plus = math.log((1.0 - eta) / (1.0 + eta)) - mu * (s1 + (eta - 3.0) / (eta + 1.0) * s2)
    minus = math.log((1.0 + eta) / (1.0 - eta)) - mu * ((eta + 3.0) / (eta - 1.0) * s1 + s2)
    return np.where(chi_plus(s1, s2, params) == 1, plus, minus)


def chi(s1, s2, params: ModelParams):
    """Two-branch exponential kernel of the occupation density."""
    out = np.exp(_log_chi(s1, s2, params))
    return out if out.ndim else float(out)


_LAG = gauss_laguerre(64)


def _log_radial_moment(g):
    """``log int_0^inf r^3 exp(-r^2 + g r) dr`` for real ``g`` (vectorized).

    g >= 0: recurrence on the moments scaled by exp(-g^2/4), all terms
    positive.  -3 < g < 0: closed form in erfcx (mild cancellation).
    g <= -3: 64-point Gauss-Laguerre after r = s / |g|, which avoids the
    catastrophic cancellation of the closed form.
    """
    g = np.asarray(g, dtype=float)
    out = np.empty_like(g)

    pos = g >= 0.0
    gp = g[pos]
    e = np.exp(-gp * gp / 4.0)
    r0 = 0.5 * _SQRT_PI * erfc(-gp / 2.0)
    r1 = 0.5 * (e + gp * r0)
    r2 = 0.5 * (gp * r1 + r0)
    r3 = 0.5 * (gp * r2 + 2.0 * r1)
    out[pos] = gp * gp / 4.0 + np.log(r3)

    x = -g[~pos] / 2.0
    res = np.empty_like(x)
    near = x < 1.5
    xn = x[near]
    m0 = 0.5 * _SQRT_PI * erfcx(xn)
    res[near] = np.log(0.5 * (1.0 + xn * xn) - xn * (xn * xn + 1.5) * m0)
    xf = x[~near]
    if xf.size:
        s = _LAG.nodes[None, :]
        vals = (_LAG.weights * s ** 3 * np.exp(-s * s / (4.0 * xf[:, None] ** 2))).sum(axis=1)
        res[~near] = np.log(vals) - 4.0 * np.log(2.0 * xf)
    out[~pos] = res
    return out


def _occupation_mass(y, t, params, rtol):
    """``exp(-mu^2 t) * int int chi(a s1, b s2) s1 s2 exp(-s1^2 - s2^2)``.

    Here ``a = 2 sqrt(t - y)`` (time on the negative side) and
    ``b = 2 sqrt(y)``.  In polar coordinates the kink of the kernel is the
    ray ``tan(phi) = (1+eta) a / ((1-eta) b)`` and the radial integral is
    closed form, leaving two smooth one-dimensional angular integrals whose
    integrands peak at the shared kink.
    """
    mu, eta = params.mu, params.eta
    a = 2.0 * math.sqrt(t - y)
    b = 2.0 * math.sqrt(y)
    phi_k = math.atan2((1.0 + eta) * a, (1.0 - eta) * b)
    c_plus = (1.0 - eta) / (1.0 + eta)
    c_minus = (1.0 + eta) / (1.0 - eta)
    if mu == 0.0:
        # radial moment is 1/2 and the angular integrals are elementary
        return 0.25 * (c_plus * math.sin(phi_k) ** 2 + c_minus * math.cos(phi_k) ** 2)

    k_plus = (eta - 3.0) / (eta + 1.0)
    k_minus = (eta + 3.0) / (eta - 1.0)
    shift = mu * mu * t

    def h_plus(phi):
        c, s = np.cos(phi), np.sin(phi)
        g = -mu * (a * c + k_plus * b * s)
        return c_plus * c * s * np.exp(_log_radial_moment(g) - shift)

    def h_minus(phi):
        c, s = np.cos(phi), np.sin(phi)
        g = -mu * (k_minus * a * c + b * s)
        return c_minus * c * s * np.exp(_log_radial_moment(g) - shift)

    # geometric grading toward the kink, where both integrands peak
    grade = 0.5 ** np.arange(1, 14)
    lower = phi_k * (1.0 - grade)
    upper = phi_k + (0.5 * math.pi - phi_k) * grade
    total = 0.0
    if phi_k > 0.0:
        total += adaptive_quad(h_plus, 0.0, phi_k, tol=1e-300, rtol=rtol, points=list(lower))[0]
    if phi_k < 0.5 * math.pi:
        total += adaptive_quad(h_minus, phi_k, 0.5 * math.pi, tol=1e-300, rtol=rtol,
                               points=list(upper))[0]
    return total


def pdf_occupation(y, t, params: ModelParams, *, rtol=1e-12):
    """Density of the positive half-line occupation time I(t) on (0, t).

    ``4 exp(-mu^2 t) / (pi sqrt(y (t-y)))`` times the double integral of
    ``chi(2 sqrt(t-y) s1, 2 sqrt(y) s2) s1 s2 exp(-s1^2 - s2^2)`` over the
    positive quadrant.  Endpoints 0 and t are excluded (hard error).
    """
    t = _check_t(t)
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0.0)) or np.any(~(y < t)):
        raise DomainError("occupation density is defined only for 0 < y < t")
    flat = y.ravel()
    vals = np.array([_occupation_mass(yi, t, params, rtol) for yi in flat])
    out = 4.0 * vals / (math.pi * np.sqrt(flat * (t - flat)))
    out = out.reshape(y.shape)
    return out if out.ndim else float(out)


def pdf_occupation_scaled(u, t, params: ModelParams, **kw):
    """Density of I(t)/t on (0, 1): ``t * pdf_occupation(t u, t)``."""
    t = _check_t(t)
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0.0)) or np.any(~(u < 1.0)):
        raise DomainError("scaled occupation density is defined only for 0 < u < 1")
    return t * pdf_occupation(t * u, t, params, **kw)


def _occupation_angle_density(theta, t, params, rtol=1e-12):
    """Density of the angle theta with I(t) = t sin^2(theta); bounded on [0, pi/2]."""
    theta = np.asarray(theta, dtype=float)
    y = t * np.sin(theta) ** 2
    vals = np.array([_occupation_mass(yi, t, params, rtol) for yi in y.ravel()]).reshape(y.shape)
    return 8.0 * vals / math.pi


@lru_cache(maxsize=32)
def _occupation_cdf_table(t, mu, eta, panels):
    params = ModelParams(mu, eta)
    edges = np.linspace(0.0, 0.5 * math.pi, panels + 1)
    dens = _occupation_angle_density(edges, t, params)
    cum = np.concatenate([[0.0], _cumulative(lambda th: _occupation_angle_density(th, t, params),
                                             edges[1:], edges[1] - edges[0] + 1e-15)])
    return CubicHermiteSpline(edges, cum, dens), cum[-1]


def cdf_occupation(y, t, params: ModelParams, *, panels=1024):
    """CDF of I(t) by quadrature of :func:`pdf_occupation`.

    Works in the angle ``y = t sin^2(theta)``, which removes the inverse
    square-root endpoint singularities.  The cumulative integral is tabulated
    on ``panels`` Gauss-Legendre panels and interpolated with cubic Hermite
    splines (the density supplies the derivative).  The table is not
    renormalized.
    """
    t = _check_t(t)
    y = np.asarray(y, dtype=float)
    spline, _ = _occupation_cdf_table(t, params.mu, params.eta, int(panels))
    theta = np.arcsin(np.sqrt(np.clip(y / t, 0.0, 1.0)))
    out = np.clip(spline(theta), 0.0, 1.0)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# curves


class Law(enum.Enum):
    TRANSIENT_X = "TransientX"
    STEADY_X = "SteadyX"
    OCCUPATION_I = "OccupationI"
    OCCUPATION_SCALED_T = "OccupationScaledT"


@dataclass(frozen=True)
class DensityCurve:
    abscissae: np.ndarray
    values: np.ndarray
    params: ModelParams
    law: Law
    t: Optional[float] = None


def sample_curve(law, grid, t, params: ModelParams):
    """Evaluate the density of ``law`` on ``grid`` (array or ``(lo, hi, n)``)."""
    law = Law(law)
    if isinstance(grid, tuple) and len(grid) == 3:
        lo, hi, n = grid
        grid = np.linspace(lo, hi, int(n))
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0.0):
        raise DomainError("grid must be a strictly increasing 1-D sequence")
    if law is Law.TRANSIENT_X:
        values = pdf_x(grid, t, params)
    elif law is Law.STEADY_X:
        values = pdf_x_steady(grid, params)
        t = None
    elif law is Law.OCCUPATION_I:
        values = pdf_occupation(grid, t, params)
    else:
        values = pdf_occupation_scaled(grid, t, params)
    values = np.atleast_1d(np.asarray(values, dtype=float))
    return DensityCurve(grid, values, params, law, None if t is None else float(t))
