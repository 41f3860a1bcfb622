from pathlib import Path
import sys

sys.path.append(str(Path(__file__).resolve().parent.parent))
from common_plot_stuff import *

import matplotlib.pyplot as plt
from tueplots import axes, bundles, figsizes

plt.rcParams.update(bundles.jmlr2001())
plt.rcParams.update(axes.lines())
plt.rcParams.update({"axes.grid": True, "axes.grid.which": "major"})

DIR = Path("experiments/3_return_times")

cells = get_cells(DIR / "data")
summaries = [get_report(cell)["summary"] for cell in cells]

plt.rcParams.update(figsizes.jmlr2001(nrows=1, ncols=2))
fig, ax = plt.subplots(1, 2)

bits = [len(s["kac_cell"]) for s in summaries]
ax[0].plot(bits, [s["kac_expected"] for s in summaries], "--k", label=r"$1/\mu(A)$")
ax[0].plot(
    bits,
    [s["kac_mean"] for s in summaries],
    marker="o",
    linewidth=0,
    color="C0",
    label="sample mean",
)
ax[0].set_yscale("log", base=2)
ax[0].set_xlabel("cell depth $b$")
ax[0].set_ylabel("mean return time")
ax[0].legend()
ax[0].set_title(r"$\bf a.$ Kac", loc="left")

df = pd.read_csv(os.path.join(cells[0]["out"], "hitting_histogram.csv"))
widths = df.bin_hi - df.bin_lo
ax[1].bar(df.bin_lo, df.mass / widths, width=widths, align="edge", alpha=LINEALPHA)
ts = np.linspace(0, df.bin_hi.iloc[-1], 200)
ax[1].plot(ts, np.exp(-ts), color="black", linewidth=LINEWIDTH)
ax[1].set_xlabel(r"$\mu(A)\,\tau_A$")
ax[1].set_title(r"$\bf b.$ hitting times", loc="left")

filepath = DIR / "figure3.pdf"
fig.savefig(filepath, bbox_inches="tight")
print(f"Saved plot to {filepath}")
