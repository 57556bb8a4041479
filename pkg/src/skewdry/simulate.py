"""Monte Carlo paths of skew Brownian motion with dry friction.

Each path runs from ``X(0) = 0`` with a skew Euler scheme:

1. proposal ``X' = X - 2 mu sign(X) dt + sqrt(2 dt) xi`` (``sign(0) = 0``);
2. if the step starts at 0 or changes sign, the sign of ``X'`` is redrawn:
   ``+`` with probability ``alpha``, ``-`` otherwise, keeping ``|X'|``.
   With ``bridge_crossings`` (default) a step whose endpoints share a sign
   is also treated as touching 0 with the Brownian-bridge probability
   ``exp(-X X' / dt)``; this removes the O(sqrt(dt)) bias of watching for
   zero only at grid times;
3. occupation time gains the part of the step spent above 0, the touching
   instant placed at ``|X| / (|X| + |X'|)`` of the step (linear interpolation);
4. local time gains ``dt / eps`` whenever ``|X| < eps`` (the band estimator
   normalized by the quadratic variation ``d[X] = 2 dt``).

Every path owns a random stream keyed by ``(seed, stream_id)`` through
``numpy.random.SeedSequence``, so a run is a pure function of
``(params, config)`` whatever the number of workers.
"""
from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np
from scipy import stats

from .errors import DomainError, ResourceError
from .model import ModelParams

__all__ = [
    "SimConfig",
    "PathFunctionals",
    "EmpiricalSummary",
    "Which",
    "simulate_path",
    "simulate_paths",
    "run_monte_carlo",
    "ks_distance",
    "ks_critical_value",
    "two_sample_ks",
    "local_time_reference_check",
]

_BYTES_PER_PATH = 3 * 8
_BYTES_PER_STEP = 2 * 8


@dataclass(frozen=True)
class SimConfig:
    dt: float
    horizon: float
    n_paths: int
    seed: int = 0
    band_epsilon: Optional[float] = None
    interpolate_crossings: bool = True
    bridge_crossings: bool = True
    chunk_size: int = 256
    memory_cap: int = 2 ** 31

    def __post_init__(self):
        dt, horizon = float(self.dt), float(self.horizon)
        if not (dt > 0.0 and math.isfinite(dt)):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if not (horizon > 0.0 and math.isfinite(horizon)):
            raise DomainError(f"horizon must be positive, got {self.horizon!r}")
        if dt > horizon:
            raise DomainError("dt must not exceed the horizon")
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise DomainError(f"n_paths must be a positive integer, got {self.n_paths!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be positive")
        eps = math.sqrt(dt) if self.band_epsilon is None else float(self.band_epsilon)
        if not eps > 0.0:
            raise DomainError("band_epsilon must be positive")
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "n_paths", int(self.n_paths))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "band_epsilon", eps)
        if dt > 1e-2 * horizon:
            warnings.warn(f"coarse time step: dt = {dt} exceeds 1e-2 * horizon", stacklevel=2)

    @property
    def n_steps(self):
        return max(1, int(round(self.horizon / self.dt)))

    def footprint(self, workers=1):
        """Bytes held at once: the result arrays plus per-worker random buffers."""
        chunk = min(self.chunk_size, self.n_paths)
        return self.n_paths * _BYTES_PER_PATH + workers * chunk * self.n_steps * _BYTES_PER_STEP


@dataclass(frozen=True)
class PathFunctionals:
    x_final: float
    occupation: float
    local_time_est: float


class Which(enum.Enum):
    X_FINAL = "XFinal"
    OCCUPATION = "Occupation"


@dataclass
class EmpiricalSummary:
    x_final: np.ndarray
    occupation: np.ndarray
    local_time: np.ndarray
    horizon: float
    ks: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.x_final.size

    def sample(self, which):
        which = Which(which)
        return self.x_final if which is Which.X_FINAL else self.occupation

    def ecdf(self, which):
        """Right-continuous empirical CDF of one sample column."""
        xs = np.sort(self.sample(which))
        n = xs.size

        def F(x):
            return np.searchsorted(xs, x, side="right") / n

        return F

    def histogram(self, which, bins=50, range=None):
        counts, edges = np.histogram(self.sample(which), bins=bins, range=range)
        return edges, counts

    def stats(self):
        """Means and standard errors of the three path functionals."""
        out = {"n_paths": self.n}
        for name, arr in (("x_final", self.x_final), ("occupation", self.occupation),
                          ("local_time", self.local_time)):
            out[f"mean_{name}"] = float(arr.mean())
            out[f"stderr_{name}"] = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        return out

    def same_as(self, other):
        return (np.array_equal(self.x_final, other.x_final)
                and np.array_equal(self.occupation, other.occupation)
                and np.array_equal(self.local_time, other.local_time))


@numba.njit(cache=True, nogil=True)
def _path_kernel(normals, uniforms, mu, alpha, dt, eps, interpolate, bridge):
    x = 0.0
    occ = 0.0
    lt = 0.0
    drift = 2.0 * mu * dt
    vol = math.sqrt(2.0 * dt)
    inv_eps = dt / eps
    for j in range(normals.size):
        if abs(x) < eps:
            lt += inv_eps
        if x > 0.0:
            xp = x - drift + vol * normals[j]
        elif x < 0.0:
            xp = x + drift + vol * normals[j]
        else:
            xp = vol * normals[j]
        u = uniforms[j]
        if x == 0.0 or (x > 0.0 and xp <= 0.0) or (x < 0.0 and xp >= 0.0):
            touched = True
        elif bridge:
            # P(bridge from x to xp, diffusion coefficient 2, hits 0) = exp(-x xp / dt);
            # on a hit, u / prob is again uniform and drives the sign draw
            prob = math.exp(-x * xp / dt)
            touched = u < prob
            if touched:
                u = u / prob
        else:
            touched = False
        if touched:
            mag = abs(xp)
            xn = mag if u < alpha else -mag
            if x == 0.0:
                before = 0.0
            elif interpolate:
                before = abs(x) / (abs(x) + mag)
            else:
                before = 1.0
            frac = 0.0
            if x > 0.0:
                frac += before
            if xn > 0.0:
                frac += 1.0 - before
            occ += frac * dt
            x = xn
        else:
            if x > 0.0:
                occ += dt
            x = xp
    return x, occ, lt


@numba.njit(cache=True, nogil=True)
def _chunk_kernel(normals, uniforms, mu, alpha, dt, eps, interpolate, bridge, out):
    for i in range(normals.shape[0]):
        x, occ, lt = _path_kernel(normals[i], uniforms[i], mu, alpha, dt, eps, interpolate, bridge)
        out[i, 0] = x
        out[i, 1] = min(max(occ, 0.0), dt * normals.shape[1])
        out[i, 2] = lt


def _stream(seed, stream_id):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream_id,))))


def _draw(config, stream_id, normals, uniforms):
    rng = _stream(config.seed, stream_id)
    rng.standard_normal(out=normals)
    rng.random(out=uniforms)


def simulate_paths(params: ModelParams, config: SimConfig, stream_ids):
    """Simulate the given streams; returns an ``(len(stream_ids), 3)`` array."""
    stream_ids = np.asarray(stream_ids, dtype=np.int64)
    if np.any(stream_ids < 0) or np.any(stream_ids >= config.n_paths):
        raise DomainError("stream_id must lie in [0, n_paths)")
    n = config.n_steps
    out = np.empty((stream_ids.size, 3))
    normals = np.empty((stream_ids.size, n))
    uniforms = np.empty((stream_ids.size, n))
    for row, sid in enumerate(stream_ids):
        _draw(config, int(sid), normals[row], uniforms[row])
    _chunk_kernel(normals, uniforms, params.mu, params.alpha, config.dt, config.band_epsilon,
                  config.interpolate_crossings, config.bridge_crossings, out)
    return out


def simulate_path(params: ModelParams, config: SimConfig, stream_id: int) -> PathFunctionals:
    """One trajectory; bit-for-bit reproducible for fixed ``(seed, stream_id)``."""
    x, occ, lt = simulate_paths(params, config, [stream_id])[0]
    return PathFunctionals(float(x), float(occ), float(lt))


def run_monte_carlo(params: ModelParams, config: SimConfig, workers: int = 1) -> EmpiricalSummary:
    """All ``n_paths`` trajectories, assembled in stream order.

    ``workers`` threads process fixed chunks of stream ids; the output does
    not depend on ``workers`` or on completion order.
    """
    workers = max(1, int(workers))
    need = config.footprint(workers)
    if need > config.memory_cap:
        raise ResourceError(f"simulation needs ~{need / 2**20:.0f} MiB, cap is "
                            f"{config.memory_cap / 2**20:.0f} MiB")
    ids = np.arange(config.n_paths)
    chunks = [ids[i:i + config.chunk_size] for i in range(0, ids.size, config.chunk_size)]
    run = lambda c: simulate_paths(params, config, c)  # noqa: E731
    if workers == 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    res = np.concatenate(parts, axis=0)
    return EmpiricalSummary(res[:, 0].copy(), res[:, 1].copy(), res[:, 2].copy(), config.horizon)


def ks_distance(summary: EmpiricalSummary, cdf, which) -> float:
    """Sup-norm distance between the sample ECDF and ``cdf``.

    Both one-sided limits of the ECDF are compared at every distinct sample
    value, against ``cdf`` and its left limit, so step CDFs are handled too.
    """
    which = Which(which)
    xs = np.sort(summary.sample(which))
    n = xs.size
    u = np.unique(xs)
    right = np.searchsorted(xs, u, side="right") / n
    left = np.searchsorted(xs, u, side="left") / n
    f_right = np.asarray(cdf(u), dtype=float)
    f_left = np.asarray(cdf(np.nextafter(u, -np.inf)), dtype=float)
    d = float(max(np.max(np.abs(right - f_right)), np.max(np.abs(left - f_left))))
    summary.ks[which.value] = d
    return d


def ks_critical_value(n, m=None, level=0.999):
    """Asymptotic Kolmogorov critical value for one or two samples."""
    c = stats.kstwobign.ppf(level)
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def two_sample_ks(a, b):
    return float(stats.ks_2samp(a, b).statistic)


def local_time_reference_check(params: ModelParams, config: SimConfig, workers: int = 1) -> float:
    """Mean local-time estimate at the horizon for the driftless, unskewed case.

    The exact value is ``E|X(t)| = 2 sqrt(t / pi)`` for ``X = sqrt(2) W``.
    """
    if params.mu != 0.0 or params.eta != 0.0:
        raise DomainError("the local-time reference check needs mu = 0 and eta = 0")
    return float(run_monte_carlo(params, config, workers).local_time.mean())
