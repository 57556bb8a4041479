"""Command-line front end.

Commands: ``pdf-x``, ``pdf-steady``, ``pdf-occupation``, ``cf``, ``simulate``,
``verify``, ``figures``.  Output is CSV on standard output (or ``--out``).

Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analytic import Law, sample_curve
from .errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    NumericalInstability,
    ResourceError,
)
from .model import params_new
from .report import FIG1, FIG2, curve_csv, figure_csv, samples_csv, table_csv
from .simulate import SimConfig, run_monte_carlo
from .transforms import cf_i_time, cf_x_time
from .verify import faulty_params, normal_params, run_checks

__all__ = ["RunConfig", "parse_grid", "build_parser", "main"]

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

_VALUE_FLAGS = {"--grid", "--z", "--etas", "--mu", "--eta", "--t"}
_NEGATIVE = re.compile(r"^-[\d.]")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    mu: float = 1.0
    eta: float = 0.0
    t: float = 1.0
    grid: Optional[tuple] = None
    paths: int = 1000
    dt: float = 1e-3
    seed: int = 0
    tol: float = 1e-12
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)


def parse_grid(text):
    """``min:max:count`` with inclusive endpoints and ``count >= 2``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be min:max:count, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"grid must be min:max:count, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError("grid endpoints must be finite")
    if n < 2:
        raise UsageError("grid count must be at least 2")
    if not lo < hi:
        raise UsageError("grid needs min < max")
    return lo, hi, n


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def build_parser():
    ap = argparse.ArgumentParser(prog="skewdry",
                                 description="Laws of skew Brownian motion with dry friction.")
    sub = ap.add_subparsers(dest="command", required=True)

    def model_flags(p, t=True):
        p.add_argument("--mu", type=float, default=1.0, help="friction magnitude (>= 0)")
        p.add_argument("--eta", type=float, default=0.0, help="skewness in (-1, 1)")
        if t:
            p.add_argument("--t", type=float, default=1.0, help="time horizon")
        p.add_argument("--out", help="output file (default: standard output)")

    p = sub.add_parser("pdf-x", help="transient density of X(t)")
    model_flags(p)
    p.add_argument("--grid", default="-3:3:61", help="min:max:count")

    p = sub.add_parser("pdf-steady", help="steady-state density of X")
    model_flags(p, t=False)
    p.add_argument("--grid", default="-3:3:61", help="min:max:count")

    p = sub.add_parser("pdf-occupation", help="density of the occupation time I(t)")
    model_flags(p)
    p.add_argument("--grid", help="min:max:count strictly inside (0, t) (or (0, 1) with --scaled)")
    p.add_argument("--scaled", action="store_true", help="density of I(t)/t on (0, 1)")
    p.add_argument("--tol", type=float, default=1e-12, help="relative quadrature tolerance")

    p = sub.add_parser("cf", help="characteristic function of X(t) or I(t)")
    model_flags(p)
    p.add_argument("--which", choices=("x", "i"), default="x",
                   help="x: position X(t); i: occupation time I(t)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--z", type=float, help="single frequency")
    g.add_argument("--grid", help="min:max:count of frequencies")

    p = sub.add_parser("simulate", help="Monte Carlo paths; one CSV row per path")
    model_flags(p)
    p.add_argument("--paths", type=int, default=1000, help="number of paths")
    p.add_argument("--dt", type=float, default=1e-3, help="time step")
    p.add_argument("--seed", type=int, default=0, help="root seed (>= 0)")
    p.add_argument("--band-epsilon", type=float, default=None,
                   help="local-time band half-width (default sqrt(dt))")
    p.add_argument("--workers", type=int, default=1,
                   help="threads; the output does not depend on it")

    p = sub.add_parser("verify", help="run the cross-layer verification suite")
    p.add_argument("--quick", action="store_true", help="reduced sizes, under a minute")
    p.add_argument("--inject-alpha-fault", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("figures", help="write fig1.csv and fig2.csv")
    p.add_argument("--etas", default="-0.5,0,0.5", help="comma-separated skewness values")
    p.add_argument("--out-dir", default=".", help="directory for the CSV files")
    return ap


def _join_negative_values(argv):
    """Let ``--grid -3:3:7`` through argparse (it would read ``-3:3:7`` as a flag)."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _config(ns):
    """Validate every flag up front; raises UsageError or DomainError."""
    cmd = ns.command
    cfg = RunConfig(cmd)
    extra = cfg.extra
    if cmd in ("verify", "figures"):
        if cmd == "figures":
            etas = _floats(ns.etas)
            if not etas:
                raise UsageError("--etas needs at least one value")
            for e in etas:
                params_new(1.0, e)
            extra["etas"] = etas
            extra["out_dir"] = ns.out_dir
        else:
            extra["quick"] = ns.quick
            extra["fault"] = ns.inject_alpha_fault
        return cfg
    cfg.mu, cfg.eta, cfg.out = ns.mu, ns.eta, ns.out
    extra["params"] = params_new(ns.mu, ns.eta)
    if hasattr(ns, "t"):
        if not (ns.t > 0.0 and math.isfinite(ns.t)):
            raise UsageError("--t must be positive and finite")
        cfg.t = ns.t
    if cmd == "pdf-steady":
        extra["params"].require_steady_state()
    if cmd == "pdf-occupation":
        if not ns.tol > 0.0:
            raise UsageError("--tol must be positive")
        cfg.tol = ns.tol
        extra["scaled"] = ns.scaled
        top = 1.0 if ns.scaled else cfg.t
        if ns.grid is None:
            cfg.grid = (top / 100.0, 99.0 * top / 100.0, 99)
        else:
            cfg.grid = parse_grid(ns.grid)
        if not (cfg.grid[0] > 0.0 and cfg.grid[1] < top):
            raise UsageError(f"occupation grid must lie strictly inside (0, {top:g})")
    elif cmd in ("pdf-x", "pdf-steady"):
        cfg.grid = parse_grid(ns.grid)
    elif cmd == "cf":
        extra["which"] = ns.which
        if ns.z is not None:
            if not math.isfinite(ns.z):
                raise UsageError("--z must be finite")
            extra["z"] = np.array([ns.z])
        else:
            lo, hi, n = parse_grid(ns.grid or "-5:5:21")
            extra["z"] = np.linspace(lo, hi, n)
    elif cmd == "simulate":
        if ns.workers < 1:
            raise UsageError("--workers must be at least 1")
        cfg.paths, cfg.dt, cfg.seed = ns.paths, ns.dt, ns.seed
        extra["workers"] = ns.workers
        extra["sim"] = SimConfig(ns.dt, cfg.t, ns.paths, seed=ns.seed, band_epsilon=ns.band_epsilon)
    return cfg


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)


def _grid(cfg):
    lo, hi, n = cfg.grid
    return np.linspace(lo, hi, n)


def cmd_pdf_x(cfg):
    curve = sample_curve(Law.TRANSIENT_X, _grid(cfg), cfg.t, cfg.extra["params"])
    _emit(curve_csv(curve, "x"), cfg.out)


def cmd_pdf_steady(cfg):
    curve = sample_curve(Law.STEADY_X, _grid(cfg), None, cfg.extra["params"])
    _emit(curve_csv(curve, "x"), cfg.out)


def cmd_pdf_occupation(cfg):
    from .analytic import pdf_occupation, pdf_occupation_scaled

    grid, prm = _grid(cfg), cfg.extra["params"]
    if cfg.extra["scaled"]:
        vals = pdf_occupation_scaled(grid, cfg.t, prm, rtol=cfg.tol)
        label = "u"
    else:
        vals = pdf_occupation(grid, cfg.t, prm, rtol=cfg.tol)
        label = "y"
    _emit(table_csv([label, "density"], [grid, np.atleast_1d(vals)]), cfg.out)


def cmd_cf(cfg):
    fn = cf_x_time if cfg.extra["which"] == "x" else cf_i_time
    zs = cfg.extra["z"]
    vals = np.array([complex(fn(z, cfg.t, cfg.extra["params"])) for z in zs])
    _emit(table_csv(["z", "re", "im"], [zs, vals.real, vals.imag]), cfg.out)


def cmd_simulate(cfg):
    sim, prm = cfg.extra["sim"], cfg.extra["params"]
    summary = run_monte_carlo(prm, sim, workers=cfg.extra["workers"])
    _emit(samples_csv(summary, prm, sim), cfg.out)


def cmd_verify(cfg):
    make = faulty_params if cfg.extra["fault"] else normal_params
    start = time.perf_counter()
    print(f"{'status':<6}  {'check':<30}  {'measured':>12}  {'threshold':>10}  detail")

    def show(c):
        status = "PASS" if c.passed else "FAIL"
        print(f"{status:<6}  {c.name:<30}  {c.measured:>12.3e}  {c.threshold:>10.3g}  {c.detail}",
              flush=True)

    results = run_checks(quick=cfg.extra["quick"], make=make, on_result=show)
    failed = [c.name for c in results if not c.passed]
    print(f"# {len(results) - len(failed)}/{len(results)} checks passed "
          f"in {time.perf_counter() - start:.1f} s")
    if failed:
        print("# failed: " + ", ".join(failed))
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_figures(cfg):
    out_dir, etas = cfg.extra["out_dir"], cfg.extra["etas"]
    os.makedirs(out_dir, exist_ok=True)
    for name, spec in (("fig1.csv", FIG1), ("fig2.csv", FIG2)):
        path = os.path.join(out_dir, name)
        _emit(figure_csv(spec, etas), path)
        print(path)


_COMMANDS = {
    "pdf-x": cmd_pdf_x,
    "pdf-steady": cmd_pdf_steady,
    "pdf-occupation": cmd_pdf_occupation,
    "cf": cmd_cf,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "figures": cmd_figures,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(ns)
    except (UsageError, DomainError) as exc:
        print(f"skewdry {ns.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        code = _COMMANDS[cfg.command](cfg)
    except (DomainError, ResourceError) as exc:
        print(f"skewdry {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, NumericalInstability, EvaluationError, FloatingPointError) as exc:
        print(f"skewdry {cfg.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if code is None else code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
