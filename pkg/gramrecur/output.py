"""
Result files: CSV tables through pandas, the JSON report, and static SVG
histograms with the reference density drawn over the bars.
"""
import json
import threading
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure
from tueplots import axes, figsizes

SVG_SALT = "gram-recur"

# rcParams are process-global; sweep workers write figures from threads
_STYLE_LOCK = threading.Lock()


def _ensure_parent(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def save_df(df, path):
    path = _ensure_parent(path)
    df.to_csv(path, index=False)
    return path


def write_spectrum_csv(path, s):
    s = np.asarray(s, dtype=float)
    return save_df(pd.DataFrame({"index": np.arange(s.size), "eigenvalue": s}), path)


def histogram_frame(hist, density=None, density_column="mp_density_at_midpoint"):
    """One row per bin; `density` is evaluated at the bin midpoints."""
    lo, hi = hist.edges[:-1], hist.edges[1:]
    df = pd.DataFrame({"bin_lo": lo, "bin_hi": hi, "mass": hist.masses})
    if density is not None:
        df[density_column] = np.asarray(density((lo + hi) / 2), dtype=float)
    return df


def write_histogram_csv(
    path, hist, density=None, density_column="mp_density_at_midpoint"
):
    return save_df(histogram_frame(hist, density, density_column), path)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else None
    return x


def write_json(path, data):
    path = _ensure_parent(path)
    path.write_text(json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n")
    return path


def write_histogram_svg(path, hist, density=None, xlabel="eigenvalue", title=None):
    """Bars show mass per unit length so they share a scale with the density curve."""
    path = _ensure_parent(path)
    widths = np.diff(hist.edges)
    style = {
        **figsizes.jmlr2001(nrows=1, ncols=1),
        **axes.lines(),
        "svg.hashsalt": SVG_SALT,
    }
    with _STYLE_LOCK, matplotlib.rc_context(style):
        fig = Figure()
        ax = fig.subplots()
        ax.bar(
            hist.edges[:-1],
            np.asarray(hist.masses) / widths,
            width=widths,
            align="edge",
            color="C0",
            alpha=0.6,
        )
        if density is not None:
            ts = np.linspace(hist.edges[0], hist.edges[-1], 400)
            ax.plot(ts, density(ts), color="black", linewidth=1.0)
        ax.set_xlim(hist.edges[0], hist.edges[-1])
        ax.set_xlabel(xlabel)
        ax.set_ylabel("density")
        if title:
            ax.set_title(title, loc="left")
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
