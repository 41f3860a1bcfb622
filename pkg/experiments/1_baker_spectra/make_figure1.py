from pathlib import Path
import sys

sys.path.append(str(Path(__file__).resolve().parent.parent))
from common_plot_stuff import *

import matplotlib.pyplot as plt
from tueplots import axes, bundles, figsizes

plt.rcParams.update(bundles.jmlr2001())
plt.rcParams.update(axes.lines())
plt.rcParams.update({"axes.grid": False})

DIR = Path("experiments/1_baker_spectra")
Ns = [500, 1000, 1500]
TAUS = [0.5, 1.0, 1.5]

cells = get_cells(DIR / "data")
reports = {}
for cell in cells:
    config = cell["config"]
    reports[(config["N"], config["tau"])] = cell

plt.rcParams.update(figsizes.jmlr2001(nrows=3, ncols=3))
fig, ax = plt.subplots(len(Ns), len(TAUS), sharex="col")

for i, N in enumerate(Ns):
    for j, tau in enumerate(TAUS):
        cell = reports[(N, tau)]
        plot_histogram(get_histogram(cell), tau, ax=ax[i, j])
        w1 = get_report(cell)["distances"]["w1_mp"]
        ax[i, j].set_title(rf"$N={N}$, $\tau={tau}$ ($W_1={w1:.3f}$)", loc="left")
        if i == len(Ns) - 1:
            ax[i, j].set_xlabel("eigenvalue")
        if j == 0:
            ax[i, j].set_ylabel("density")

filepath = DIR / "figure1.pdf"
fig.savefig(filepath, bbox_inches="tight")
print(f"Saved plot to {filepath}")
