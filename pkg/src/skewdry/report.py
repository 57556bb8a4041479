"""CSV tables: density curves, characteristic functions, raw samples, figure data.

Numbers are written with 17 significant digits, '.' as decimal separator
and LF line endings, so equal inputs give equal bytes.
"""
from __future__ import annotations

import io

import numpy as np

from .analytic import Law, pdf_occupation_scaled, pdf_x, sample_curve
from .model import ModelParams, params_new

__all__ = [
    "fmt",
    "table_csv",
    "curve_csv",
    "samples_csv",
    "FIG1",
    "FIG2",
    "figure_table",
    "figure_csv",
    "figure_density",
]


def fmt(v):
    """17 significant digits; integers stay integers."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def table_csv(header, columns, comments=()):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    for line in comments:
        buf.write("# " + line + "\n")
    return buf.getvalue()


def curve_csv(curve, label):
    return table_csv([label, "density"], [curve.abscissae, curve.values])


def samples_csv(summary, params: ModelParams, config):
    ids = np.arange(summary.n)
    st = summary.stats()
    notes = [
        f"mu={fmt(params.mu)}",
        f"eta={fmt(params.eta)}",
        f"horizon={fmt(config.horizon)}",
        f"dt={fmt(config.dt)}",
        f"seed={config.seed}",
        f"band_epsilon={fmt(config.band_epsilon)}",
    ]
    notes += [f"{k}={fmt(v)}" for k, v in st.items()]
    return table_csv(["stream_id", "x_final", "occupation", "local_time"],
                     [ids, summary.x_final, summary.occupation, summary.local_time], notes)


# figure datasets: (law, mu, t, lo, hi, count)
FIG1 = (Law.TRANSIENT_X, 1.0, 1.0, -3.0, 3.0, 601)
FIG2 = (Law.OCCUPATION_SCALED_T, 1.0, 2.0, 0.005, 0.995, 199)


def _symmetric_grid(lo, hi, n):
    # offsets about the centre are exact negatives of each other
    step = (hi - lo) / (n - 1)
    return 0.5 * (lo + hi) + step * (np.arange(n) - 0.5 * (n - 1))


def figure_table(spec, etas):
    """Grid and one density column per eta for a figure spec."""
    law, mu, t, lo, hi, n = spec
    grid = _symmetric_grid(lo, hi, n)
    cols = [sample_curve(law, grid, t, params_new(mu, e)).values for e in etas]
    return grid, cols


def _short(v):
    """Shortest text that parses back to the same float."""
    v = float(v)
    return f"{v:g}" if float(f"{v:g}") == v else repr(v)


def figure_csv(spec, etas):
    grid, cols = figure_table(spec, etas)
    label = "x" if spec[0] is Law.TRANSIENT_X else "u"
    names = [f"eta={_short(e)}" for e in etas]
    return table_csv([label] + names, [grid] + cols)


def figure_density(spec, eta):
    """The density function behind one figure column."""
    law, mu, t = spec[0], spec[1], spec[2]
    params = params_new(mu, eta)
    if law is Law.TRANSIENT_X:
        return lambda x: pdf_x(x, t, params)
    return lambda u: pdf_occupation_scaled(u, t, params)
