from pathlib import Path
import sys

sys.path.append(str(Path(__file__).resolve().parent.parent))
from common_plot_stuff import *

import matplotlib.pyplot as plt
from tueplots import axes, bundles, figsizes

plt.rcParams.update(bundles.jmlr2001())
plt.rcParams.update(axes.lines())
plt.rcParams.update({"axes.grid": False})

DIR = Path("experiments/2_kicked_top_spectra")
PARAMS = [(1.5, 1.0), (6.5, 1.5)]
TAUS = [0.5, 1.0]

cells = get_cells(DIR / "data")
reports = {}
for cell in cells:
    config = cell["config"]
    reports[(config["k"], config["p"], config["tau"])] = cell

plt.rcParams.update(figsizes.jmlr2001(nrows=2, ncols=2))
fig, ax = plt.subplots(len(PARAMS), len(TAUS), sharex="col")

for i, (k, p) in enumerate(PARAMS):
    for j, tau in enumerate(TAUS):
        cell = reports[(k, p, tau)]
        plot_histogram(get_histogram(cell), tau, ax=ax[i, j])
        zeros = get_report(cell)["summary"]["zero_count"] / len(get_spectrum(cell))
        ax[i, j].set_title(
            rf"$\bf {chr(ord('a') + 2 * i + j)}.$ {REGIMES[(k, p)]}, $k={k}$, "
            rf"$p={p}$, $\tau={tau}$",
            loc="left",
        )
        ax[i, j].text(
            0.95, 0.9, f"{zeros:.0%} at zero", transform=ax[i, j].transAxes, ha="right"
        )
        if i == len(PARAMS) - 1:
            ax[i, j].set_xlabel("eigenvalue")
        if j == 0:
            ax[i, j].set_ylabel("density")

filepath = DIR / "figure2.pdf"
fig.savefig(filepath, bbox_inches="tight")
print(f"Saved plot to {filepath}")
