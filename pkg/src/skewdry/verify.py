"""Cross-layer verification checks behind ``skewdry verify``.

Each check returns a :class:`Check` holding the measured error, the pass
threshold and the verdict.  ``quick=True`` shrinks sample sizes and the
Monte Carlo workload so the whole suite runs in well under a minute.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytic import (
    _occupation_angle_density,
    _tail_cutoff,
    cdf_occupation,
    cdf_x,
    pdf_occupation,
    pdf_x,
    pdf_x_steady,
)
from .model import ModelParams
from .report import FIG1, FIG2, figure_density, figure_table, samples_csv
from .simulate import SimConfig, ks_critical_value, ks_distance, run_monte_carlo
from .special import adaptive_quad
from .transforms import (
    cf_i_time,
    cf_x_time,
    e_tilde_i,
    e_tilde_x,
    g_coefficients,
    phi_numerator,
    roots,
)

__all__ = ["Check", "CHECKS", "run_checks", "fourier_x", "fourier_i", "normal_params",
           "faulty_params"]

MU_GRID = (0.0, 0.5, 1.0, 2.0)
ETA_GRID = (-0.9, -0.5, 0.0, 0.5, 0.9)
T_GRID = (0.1, 1.0, 10.0)
CF_Z = (-5.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 5.0)
CF_T = (0.5, 1.0, 2.0)
CF_PARAMS = ((1.0, 0.0), (1.0, 0.5), (0.5, -0.7))


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    threshold: float
    passed: bool
    detail: str = ""


def _check(name, measured, threshold, detail=""):
    measured = float(measured)
    return Check(name, measured, float(threshold), bool(measured < threshold), detail)


def normal_params(mu, eta):
    return ModelParams(mu, eta)


def faulty_params(mu, eta, shift=1e-2):
    """Parameters whose alpha is off by ``shift`` (fault-injection mode)."""
    p = ModelParams(mu, eta)
    object.__setattr__(p, "alpha", p.alpha + shift)
    return p


def _random_spectral(rng, n):
    mu = rng.uniform(0.0, 3.0, n)
    eta = rng.uniform(-0.95, 0.95, n)
    z2 = rng.uniform(-10.0, 10.0, n)
    p = (10.0 * (1.0 - rng.random(n))) + 1j * rng.uniform(-10.0, 10.0, n)
    return mu, eta, z2, p


def check_transform_normalization(make, quick):
    rng = np.random.default_rng(101)
    worst = 0.0
    for mu, eta, _, p in zip(*_random_spectral(rng, 1000 if quick else 10_000)):
        prm = make(mu, eta)
        for val in (e_tilde_x(0.0, p, prm), e_tilde_i(0.0, p, prm)):
            worst = max(worst, abs(val * p - 1.0))
    return _check("transform_normalization", worst, 1e-13, "max |p E(0,p) - 1|")


def check_removable_singularities(make, quick):
    rng = np.random.default_rng(102)
    worst = 0.0
    for mu, eta, z2, p in zip(*_random_spectral(rng, 1000 if quick else 10_000)):
        prm = make(mu, eta)
        rq = roots(prm, z2, p)
        gp = g_coefficients(prm, z2, p, rq)
        for z1, sign in ((1j * rq.nu_plus, 1), (1j * rq.kappa_minus, -1)):
            scale = abs(gp.g0) + abs(z1 * gp.g1) + abs(prm.eta * z1 * gp.psi0) + 0.5
            worst = max(worst, abs(phi_numerator(z1, sign, prm, gp)) / scale)
    return _check("removable_singularities", worst, 1e-12, "numerator / term scale")


def check_root_identities(make, quick):
    rng = np.random.default_rng(103)
    mu, eta, z2, p = _random_spectral(rng, 1000 if quick else 10_000)
    worst = 0.0
    for m, e, z, pp in zip(mu, eta, z2, p):
        rq = roots(make(m, e), z, pp)
        kp, km, np_, nm = rq.kappa_plus, rq.kappa_minus, rq.nu_plus, rq.nu_minus
        rel = (
            abs(kp * km + pp) / abs(pp),
            abs(np_ * nm - (1j * z - pp)) / abs(1j * z - pp),
            abs(kp + km - 2.0 * m) / max(abs(kp), abs(km)),
            abs(np_ + nm + 2.0 * m) / max(abs(np_), abs(nm)),
        )
        worst = max(worst, *rel)
    return _check("root_identities", worst, 1e-12, "relative to the term magnitudes")


def _mass_x(t, prm):
    cut = _tail_cutoff(t, prm.mu)
    f = lambda x: pdf_x(x, t, prm)  # noqa: E731
    drift = 2.0 * prm.mu * t
    pts = [drift] if 0.0 < drift < cut else None
    right = adaptive_quad(f, 0.0, cut, tol=1e-15, rtol=1e-14, points=pts)[0]
    left = adaptive_quad(f, -cut, 0.0, tol=1e-15, rtol=1e-14,
                         points=[-drift] if pts else None)[0]
    return left + right


def _mass_i(t, prm):
    g = lambda th: _occupation_angle_density(th, t, prm)  # noqa: E731
    return adaptive_quad(g, 0.0, 0.5 * math.pi, tol=1e-13, rtol=1e-12)[0]


def check_density_normalization(make, quick):
    mus = MU_GRID[1::2] if quick else MU_GRID
    worst_x = worst_i = 0.0
    for mu in mus:
        for eta in ETA_GRID:
            for t in T_GRID:
                prm = make(mu, eta)
                worst_x = max(worst_x, abs(_mass_x(t, prm) - 1.0))
                worst_i = max(worst_i, abs(_mass_i(t, prm) - 1.0))
    return [
        _check("normalization_x", worst_x, 1e-9, "max |int f_X - 1|"),
        _check("normalization_occupation", worst_i, 1e-6, "max |int f_I - 1|"),
    ]


def check_jump_ratio(make, quick):
    worst = 0.0
    below = np.nextafter(0.0, -1.0)
    for mu in MU_GRID:
        for eta in ETA_GRID:
            a = (1.0 + eta) / 2.0
            for t in T_GRID:
                prm = make(mu, eta)
                ratio = pdf_x(0.0, t, prm) / pdf_x(below, t, prm)
                worst = max(worst, abs(ratio / (a / (1.0 - a)) - 1.0))
    steady = 0.0
    xs = np.linspace(-6.0, 6.0, 241)
    for mu in MU_GRID[1:]:
        for eta in ETA_GRID:
            a = (1.0 + eta) / 2.0
            ref = 2.0 * mu * np.exp(-2.0 * mu * np.abs(xs)) * np.where(xs > 0.0, a, 1.0 - a)
            steady = max(steady, float(np.max(np.abs(pdf_x_steady(xs, make(mu, eta)) / ref - 1.0))))
    return [
        _check("jump_ratio", worst, 1e-12, "relative error of f(0+)/f(0-) vs alpha/(1-alpha)"),
        _check("steady_state_pointwise", steady, 1e-13, "relative error vs two-sided exponential"),
    ]


def check_arcsine(make, quick):
    worst = 0.0
    for t in (1.0, 2.0):
        y = t * np.arange(1, 100) / 100.0
        ref = 1.0 / (np.pi * np.sqrt(y * (t - y)))
        worst = max(worst, float(np.max(np.abs(pdf_occupation(y, t, make(0.0, 0.0)) - ref))))
    return _check("arcsine_reduction", worst, 1e-10, "max abs error at 99 interior points")


def check_mirror(make, quick):
    rng = np.random.default_rng(107)
    n = 50 if quick else 200
    worst_x = worst_i = 0.0
    for _ in range(n):
        mu, eta = rng.uniform(0.0, 3.0), rng.uniform(-0.95, 0.95)
        t = rng.uniform(0.1, 5.0)
        x = rng.uniform(-5.0, 5.0)
        y = t * rng.uniform(0.001, 0.999)
        p, q = make(mu, eta), make(mu, -eta)
        worst_x = max(worst_x, abs(pdf_x(x, t, p) - pdf_x(-x, t, q)))
        worst_i = max(worst_i, abs(pdf_occupation(y, t, p) - pdf_occupation(t - y, t, q)))
    return [
        _check("mirror_x", worst_x, 1e-10, "max |f_X(x;eta) - f_X(-x;-eta)|"),
        _check("mirror_occupation", worst_i, 1e-10, "max |f_I(y;eta) - f_I(t-y;-eta)|"),
    ]


def check_long_time(make, quick):
    xs = np.linspace(-5.0, 5.0, 1001)
    # the two densities use opposite conventions at x = 0 exactly; compare
    # one-sided limits there instead
    xs = np.concatenate([xs[xs != 0.0], [np.nextafter(0.0, 1.0), np.nextafter(0.0, -1.0)]])
    worst = 0.0
    for eta in (-0.5, 0.0, 0.5):
        prm = make(1.0, eta)
        worst = max(worst, float(np.max(np.abs(pdf_x(xs, 50.0, prm) - pdf_x_steady(xs, prm)))))
    return _check("long_time_limit", worst, 1e-8, "sup |f_X(x,50) - f_X^inf(x)|, |x| <= 5")


def fourier_x(z, t, prm):
    """``int exp(i z x) f_X(x, t) dx`` by adaptive quadrature."""
    cut = _tail_cutoff(t, prm.mu)
    drift = 2.0 * prm.mu * t
    pts = sorted({0.0} | ({-drift, drift} if 0.0 < drift < cut else set()))
    f = lambda x: np.exp(1j * z * x) * pdf_x(x, t, prm)  # noqa: E731
    return adaptive_quad(f, -cut, cut, tol=1e-13, points=pts)[0]


def fourier_i(z, t, prm):
    """``int_0^t exp(i z y) f_I(y, t) dy`` in the angle ``y = t sin^2``."""
    f = lambda th: np.exp(1j * z * t * np.sin(th) ** 2) * _occupation_angle_density(th, t, prm)  # noqa: E731
    return adaptive_quad(f, 0.0, 0.5 * math.pi, tol=1e-12)[0]


def check_cf_agreement(make, quick):
    zs = (-5.0, -1.0, 0.5, 2.0) if quick else CF_Z
    ts = (1.0,) if quick else CF_T
    worst_x = worst_i = 0.0
    for mu, eta in CF_PARAMS:
        prm = make(mu, eta)
        for t in ts:
            for z in zs:
                worst_x = max(worst_x, abs(cf_x_time(z, t, prm) - fourier_x(z, t, prm)))
                worst_i = max(worst_i, abs(cf_i_time(z, t, prm) - fourier_i(z, t, prm)))
    return [
        _check("cf_x_vs_fourier", worst_x, 1e-5, "|inverted cf - Fourier integral of f_X|"),
        _check("cf_i_vs_fourier", worst_i, 1e-4, "|inverted cf - Fourier integral of f_I|"),
    ]


def _mc_setting(quick):
    # quick runs are 100x cheaper; their threshold is the 99.9% band plus
    # the same 5e-3 dt-bias allowance
    if quick:
        n, dt = 10_000, 1e-3
        return n, dt, ks_critical_value(n) + 5e-3, ks_critical_value(n) + 5e-3
    return 100_000, 1e-4, 0.006, 0.01


def check_monte_carlo(make, quick):
    n, dt, thr_x, thr_i = _mc_setting(quick)
    out = []
    for eta in (0.0, 0.5):
        prm = make(1.0, eta)
        s = run_monte_carlo(prm, SimConfig(dt, 1.0, n, seed=2024))
        kx = ks_distance(s, lambda x: cdf_x(x, 1.0, prm), "XFinal")
        ki = ks_distance(s, lambda y: cdf_occupation(y, 1.0, prm), "Occupation")
        out.append(_check(f"mc_ks_x_eta={eta:g}", kx, thr_x, f"n={n}, dt={dt:g}"))
        out.append(_check(f"mc_ks_occupation_eta={eta:g}", ki, thr_i, f"n={n}, dt={dt:g}"))
    return out


def check_local_time(make, quick):
    n, dt = (10_000, 1e-3) if quick else (100_000, 1e-4)
    s = run_monte_carlo(make(0.0, 0.0), SimConfig(dt, 1.0, n, seed=2025))
    ref = 2.0 / math.sqrt(math.pi)
    return _check("local_time_mean", abs(s.local_time.mean() / ref - 1.0), 0.05,
                  f"relative error vs 2/sqrt(pi), n={n}, dt={dt:g}")


def check_reproducibility(make, quick):
    prm = make(1.0, 0.5)
    cfg = SimConfig(1e-3, 1.0, 1000, seed=7, chunk_size=64)
    a = run_monte_carlo(prm, cfg, workers=1)
    b = run_monte_carlo(prm, cfg, workers=3)
    c = run_monte_carlo(prm, cfg, workers=1)
    same = a.same_as(b) and a.same_as(c) and samples_csv(a, prm, cfg) == samples_csv(b, prm, cfg)
    return _check("reproducibility", 0.0 if same else 1.0, 0.5, "bitwise, workers 1 vs 3")


def _fig_mass(spec, eta):
    f = figure_density(spec, eta)
    if spec[0] is FIG1[0]:
        cut = _tail_cutoff(spec[2], spec[1])
        return adaptive_quad(f, -cut, cut, tol=1e-14, rtol=1e-13, points=[0.0])[0]
    g = lambda th: f(np.sin(th) ** 2) * np.sin(2.0 * th)  # noqa: E731
    return adaptive_quad(g, 0.0, 0.5 * math.pi, tol=1e-13, rtol=1e-12)[0]


def check_figures(make, quick, etas=(-0.5, 0.0, 0.5)):
    sym = mass = 0.0
    for spec in (FIG1, FIG2):
        grid, cols = figure_table(spec, etas)
        centre = 0.5 * (spec[3] + spec[4])
        # x = 0 itself carries the alpha convention and is not mirror-paired
        keep = grid != centre if spec is FIG1 else np.ones(grid.size, bool)
        for e, col in zip(etas, cols):
            if -e in etas:
                other = cols[list(etas).index(-e)]
                sym = max(sym, float(np.max(np.abs(col - other[::-1])[keep])))
            mass = max(mass, abs(_fig_mass(spec, e) - 1.0))
    return [
        _check("figure_mirror", sym, 1e-10, "columns eta vs -eta reflected"),
        _check("figure_mass", mass, 1e-6, "each column's density integrates to 1"),
    ]


CHECKS: list[tuple[str, Callable]] = [
    ("transform normalization", check_transform_normalization),
    ("removable singularities", check_removable_singularities),
    ("root identities", check_root_identities),
    ("density normalization", check_density_normalization),
    ("jump ratio / steady state", check_jump_ratio),
    ("arcsine reduction", check_arcsine),
    ("mirror symmetries", check_mirror),
    ("long-time limit", check_long_time),
    ("transform vs analytic", check_cf_agreement),
    ("Monte Carlo KS", check_monte_carlo),
    ("local time", check_local_time),
    ("reproducibility", check_reproducibility),
    ("figure datasets", check_figures),
]


def run_checks(quick=False, make=normal_params, on_result=None):
    """Run every check; ``on_result`` is called with each :class:`Check`."""
    results = []
    for _, fn in CHECKS:
        out = fn(make, quick)
        for c in out if isinstance(out, list) else [out]:
            results.append(c)
            if on_result is not None:
                on_result(c)
    return results
