import json
import os

import numpy as np
import pandas as pd

from gramrecur.randmat import MPLaw, mp_density

LINEALPHA = 0.8
LINEWIDTH = 1.5

LABELS = {
    "baker-spectrum": "Baker map",
    "top-spectrum": "Kicked top",
    "random-spectrum": "Random vectors",
}
REGIMES = {
    (1.5, 1.0): "regular",
    (6.5, 1.5): "chaotic",
}


def get_cells(datadir):
    """The sweep index written by `gram-recur ... --grid`, one dict per cell."""
    filename = os.path.join(datadir, "sweep.json")
    with open(filename) as f:
        cells = json.load(f)["cells"]
    failed = [c["index"] for c in cells if c["status"] != "ok"]
    if failed:
        raise ValueError(f"Cells {failed} in {datadir} did not finish")
    return cells


def get_histogram(cell):
    return pd.read_csv(os.path.join(cell["out"], "histogram.csv"))


def get_spectrum(cell):
    return pd.read_csv(os.path.join(cell["out"], "spectrum.csv")).eigenvalue


def get_report(cell):
    with open(os.path.join(cell["out"], "report.json")) as f:
        return json.load(f)


def plot_histogram(df, tau, ax):
    widths = df.bin_hi - df.bin_lo
    ax.bar(
        df.bin_lo,
        df.mass / widths,
        width=widths,
        align="edge",
        color="C0",
        alpha=LINEALPHA,
        linewidth=0,
    )
    ts = np.linspace(0, df.bin_hi.iloc[-1], 400)
    ax.plot(ts, mp_density(MPLaw(tau), ts), color="black", linewidth=LINEWIDTH)
    ax.set_xlim(0, df.bin_hi.iloc[-1])
    return ax
