"""
Mean-field energy functional
============================

The classical energy per boson as a function of the deformation r, in the
symmetric phase (xi = 0.1) for four anharmonicities: 0, alpha_t/2, alpha_t and
1.5 alpha_t.  Below alpha_t an interior maximum appears above the asymptote.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vibron2d.meanfield import alpha_threshold, energy_asymptote, energy_functional

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

xi = 0.1
at = alpha_threshold(xi)
r = np.linspace(0, 5, 500)

fig, ax = plt.subplots(figsize=(6, 4))
for frac, c in [(0.0, "k"), (0.5, "tab:blue"), (1.0, "tab:red"), (1.5, "tab:green")]:
    a = frac * at
    ax.plot(r, energy_functional(r, xi, a), color=c, label=f"alpha = {a:.3f}")
    ax.axhline(energy_asymptote(xi, a), color=c, lw=0.5, ls=":")
ax.set_xlabel("r")
ax.set_ylabel("E(r)")
ax.legend(frameon=False)
fig.savefig(OUT / "energy_functional.png", dpi=150)
print("alpha_t(0.1) =", at)
