"""
Density of states and the ESQPT peaks
=====================================

Histogram of l = 0 normalized energies (bin 0.01) for three system sizes and
four control parameters.  The dashed lines are f1 and f2; the peaks sit on
them.  The histogram peak height barely moves with N at this bin width, while
the inverse-spacing estimator (thin line) keeps growing.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from vibron2d import ModelParams, solve_block
from vibron2d.diagnostics import density_of_states, dos_peaks
from vibron2d.meanfield import mean_field_report

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

alpha = -0.6
fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True)
for ax, xi in zip(axes.flat, (0.15, 0.3, 0.4, 0.5)):
    for N, c in [(1024, "tab:blue"), (2048, "tab:orange"), (4096, "tab:green")]:
        b = solve_block(ModelParams(N, xi, alpha), 0)
        h = density_of_states(b, 0.01)
        s = density_of_states(b, estimator="spacing")
        ax.step(h.energies, h.values, where="mid", color=c, label=f"N={N}")
        ax.plot(s.energies, s.values, color=c, lw=0.4, alpha=0.6)
        if N == 4096:
            print(f"xi={xi}: histogram peaks at", dos_peaks(h))
    rep = mean_field_report(xi, alpha)
    for f in (rep.f1, rep.f2):
        if f is not None:
            ax.axvline(f, color="k", ls="--", lw=0.8)
    ax.set_title(f"xi = {xi}")
    ax.set_ylim(0, 15)
axes[0, 0].legend(frameon=False)
for ax in axes[1]:
    ax.set_xlabel(r"$(E - E_0)/N$")
fig.savefig(OUT / "density_of_states.png", dpi=150)
