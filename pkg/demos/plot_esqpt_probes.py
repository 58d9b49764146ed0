"""
Effective frequency, <n> and participation ratio
================================================

At xi = 0.16 the anharmonic ESQPT sits at f2 = 0.24.  The level spacing dips
(Dixon dip), <n>/N peaks and the participation ratio collapses there, and the
critical eigenstate is localized on the top basis state n = N.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vibron2d import ModelParams, full_spectrum
from vibron2d.diagnostics import critical_state, effective_frequency, expectation_n, participation_ratio
from vibron2d.meanfield import separatrix_f2

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

N, xi, alpha = 1000, 0.16, -0.6
f2 = separatrix_f2(xi, alpha)
blocks = full_spectrum(ModelParams(N, xi, alpha), [0, 1, 2], want_vectors=True)

fig, (a1, a2, a3) = plt.subplots(1, 3, figsize=(12, 3.8))
for l, b in blocks.items():
    w = effective_frequency(b)
    n = expectation_n(b)
    a1.plot(w.energies, w.values, ".", ms=2, label=f"l={l}")
    a2.plot(n.energies, n.values, ".", ms=2)
pr = participation_ratio(blocks[0])
a3.plot(pr.energies, pr.values, ".", ms=2, color="k")
for ax, name in [(a1, "omega_eff"), (a2, "<n>/N"), (a3, "PR / dim")]:
    ax.axvline(f2, color="gold", ls="--")
    ax.set_xlabel(r"$(E - E_0)/N$")
    ax.set_ylabel(name)
a1.legend(frameon=False)
fig.tight_layout()
fig.savefig(OUT / "esqpt_probes.png", dpi=150)

rep = critical_state(pr, blocks[0], f2)
print(f"critical state: ordinal {rep.ordinal} at {rep.energy:.4f}, dominant n = {rep.n_dominant}, "
      f"weight {rep.weight:.3f}")

###############################################################################
# Wave function of the critical state in the u(2) basis
fig, ax = plt.subplots(figsize=(5, 3))
b = blocks[0]
ax.plot(b.basis.n_values / N, b.vectors[:, rep.ordinal] ** 2)
ax.set_xlabel("n / N")
ax.set_ylabel(r"$|C_n|^2$")
fig.tight_layout()
fig.savefig(OUT / "critical_wavefunction.png", dpi=150)
print("top weight", np.max(b.vectors[:, rep.ordinal] ** 2))
