"""ESQPT probes computed from finite-N spectra.

Every probe returns a :class:`DiagnosticSeries`: one value per eigenstate (or
per adjacent pair of eigenstates) placed on the normalized excitation energy
axis ``(E - E_ground) / N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal
from numpy.typing import NDArray

from .algebra import ModelParams, assemble_hamiltonian, assemble_interaction, block_basis
from .errors import DegeneracyError, DomainError
from .spectral import SpectrumBlock, eigensystem, ground_state, normalized_excitation

KINDS = ("omega_eff", "expect_n", "pr", "dos", "qfs", "gamma")

DOS_BIN_WIDTH = 0.01
DEGENERACY_THRESHOLD = 0.1
CRITICAL_WINDOW = 0.05
GAMMA_MIN_GAP = 1e-12
QFS_MIN_GAP = 1e-12


@dataclass(frozen=True)
class DiagnosticSeries:
    """Values of one probe against normalized excitation energy.

    ``ordinals`` index the source block (for ``dos`` they index bins).
    ``valid`` marks points whose value is meaningful; invalid points carry NaN.
    """

    kind: str
    ell: int | tuple[int, int]
    energies: NDArray[np.float64] = field(repr=False)
    values: NDArray[np.float64] = field(repr=False)
    ordinals: NDArray[np.int64] = field(repr=False)
    params: ModelParams | None = None
    valid: NDArray[np.bool_] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown diagnostic kind {self.kind!r}")
        if not len(self.energies) == len(self.values) == len(self.ordinals):
            raise DomainError("series arrays must have equal length")
        if self.valid is None:
            object.__setattr__(self, "valid", np.isfinite(self.values))

    def __len__(self):
        return len(self.values)

    @property
    def points(self) -> list[tuple[float, float, int]]:
        return [
            (float(e), float(v), int(k))
            for e, v, k in zip(self.energies, self.values, self.ordinals)
        ]

    def window_mean(self, lo: float, hi: float) -> float:
        """Mean of the valid values with lo <= energy <= hi (NaN if none)."""
        m = self.valid & (self.energies >= lo) & (self.energies <= hi)
        return float(np.mean(self.values[m])) if m.any() else float("nan")


@dataclass(frozen=True)
class CriticalStateReport:
    ordinal: int
    energy: float
    n_dominant: int
    weight: float
    separatrix: str
    target: float

    @property
    def deviation(self) -> float:
        return self.energy - self.target


def _require_vectors(block: SpectrumBlock, what: str):
    if not block.has_vectors:
        raise DomainError(f"{what} needs eigenvectors; solve the block with vectors")


def effective_frequency(block: SpectrumBlock) -> DiagnosticSeries:
    """Level spacing E_j - E_{j-1} at the normalized midpoint energy."""
    if block.dim < 2:
        raise DomainError("effective frequency needs at least two levels")
    e = block.energies
    mid = (0.5 * (e[1:] + e[:-1]) - block.ground_ref) / block.N
    return DiagnosticSeries(
        kind="omega_eff",
        ell=block.ell,
        energies=mid,
        values=np.diff(e),
        ordinals=np.arange(1, block.dim),
        params=block.params,
    )


def expectation_n(block: SpectrumBlock) -> DiagnosticSeries:
    """<n>/N in every eigenstate."""
    _require_vectors(block, "<n>")
    n = block.basis.n_values.astype(float)
    vals = (block.vectors**2 * n[:, None]).sum(axis=0) / block.N
    return DiagnosticSeries(
        kind="expect_n",
        ell=block.ell,
        energies=normalized_excitation(block),
        values=vals,
        ordinals=np.arange(block.dim),
        params=block.params,
    )


def participation_ratios(block: SpectrumBlock) -> NDArray[np.float64]:
    """Raw participation ratios 1 / sum_n |C_n|^4, each in [1, dim]."""
    _require_vectors(block, "participation ratio")
    return 1.0 / np.sum(block.vectors**4, axis=0)


def participation_ratio(block: SpectrumBlock) -> DiagnosticSeries:
    """Participation ratio in the u(2) basis, divided by the block dimension."""
    return DiagnosticSeries(
        kind="pr",
        ell=block.ell,
        energies=normalized_excitation(block),
        values=participation_ratios(block) / block.dim,
        ordinals=np.arange(block.dim),
        params=block.params,
    )


def density_of_states(
    block: SpectrumBlock, bin_width: float = DOS_BIN_WIDTH, estimator: str = "histogram"
) -> DiagnosticSeries:
    """Level density on the normalized energy axis, normalized to unit area.

    ``estimator="histogram"`` counts levels in half-open bins [k w, (k+1) w)
    starting at zero.  ``estimator="spacing"`` returns the local inverse level
    spacing 1 / (dim * dx_j) at each midpoint; it resolves the growth of the
    ESQPT peak with N that fixed-width bins average away.
    """
    if block.dim < 2:
        raise DomainError("density of states needs at least two levels")
    x = normalized_excitation(block)
    if estimator == "spacing":
        dx = np.diff(x)
        with np.errstate(divide="ignore"):
            dens = 1.0 / (block.dim * dx)
        return DiagnosticSeries(
            kind="dos",
            ell=block.ell,
            energies=0.5 * (x[1:] + x[:-1]),
            values=dens,
            ordinals=np.arange(1, block.dim),
            params=block.params,
            valid=np.isfinite(dens),
        )
    if estimator != "histogram":
        raise DomainError(f"unknown DOS estimator {estimator!r}")
    if not bin_width > 0:
        raise DomainError(f"bin width must be positive, got {bin_width}")
    # levels sitting exactly on a bin edge (harmonic ladders) must not be
    # pushed into the lower bin by representation error in x / bin_width
    q = np.round(x / bin_width, 9)
    lo = np.floor(q.min())
    idx = np.floor(q).astype(np.int64) - int(lo)
    counts = np.bincount(idx)
    centers = (np.arange(len(counts)) + lo + 0.5) * bin_width
    return DiagnosticSeries(
        kind="dos",
        ell=block.ell,
        energies=centers,
        values=counts / (block.dim * bin_width),
        ordinals=np.arange(len(counts)),
        params=block.params,
    )


def dos_peaks(series: DiagnosticSeries, rel_prominence: float = 0.15) -> NDArray[np.float64]:
    """Energies of DOS maxima whose prominence exceeds a fraction of the top value.

    Returned in order of decreasing height.
    """
    vals = np.where(series.valid, series.values, 0.0)
    padded = np.concatenate([[0.0], vals, [0.0]])
    idx, props = scipy.signal.find_peaks(padded, prominence=rel_prominence * vals.max())
    idx = idx - 1
    order = np.argsort(-vals[idx], kind="stable")
    return series.energies[idx[order]]


def qfs(
    params: ModelParams,
    ell: int,
    ground_ref: float | None = None,
    block: SpectrumBlock | None = None,
) -> DiagnosticSeries:
    """Fidelity susceptibility of every eigenstate of one l block at lam = 0.

    chi_j = sum_{i != j} |<i|H_I|j>|^2 / (E_i - E_j)^2, where H_I = dH/dlam
    conserves l, so the sum stays inside the block.  The energy axis is
    referenced to the l = 0 ground state unless ``ground_ref`` is given.
    """
    basis = block_basis(params, ell)
    if block is None:
        block = eigensystem(assemble_hamiltonian(params, basis))
    _require_vectors(block, "QFS")
    if ground_ref is None:
        ground_ref = ground_state(params, 0)[0]
    HI = assemble_interaction(params, basis)
    V = block.vectors
    M = V.T @ HI.matvec(V)
    gaps = block.energies[:, None] - block.energies[None, :]
    np.fill_diagonal(gaps, np.inf)
    scale = max(1.0, float(np.abs(block.energies).max()))
    if block.dim > 1 and np.abs(gaps).min() < QFS_MIN_GAP * scale:
        raise DegeneracyError(f"degenerate levels inside l={ell} block; QFS undefined")
    chi = np.sum(M**2 / gaps**2, axis=0)
    return DiagnosticSeries(
        kind="qfs",
        ell=block.ell,
        energies=(block.energies - ground_ref) / params.N,
        values=chi,
        ordinals=np.arange(block.dim),
        params=params,
    )


def _pair_blocks(lower: SpectrumBlock, upper: SpectrumBlock):
    if lower.params != upper.params:
        raise DomainError("blocks come from different model parameters")
    if upper.ell != lower.ell + 1:
        raise DomainError(f"need blocks l and l+1, got {lower.ell} and {upper.ell}")


def quasilinearity(lower: SpectrumBlock, upper: SpectrumBlock) -> DiagnosticSeries:
    """Generalized quasilinearity gamma_{n,l} from blocks l and l + 1.

    For ordinal k of block l (n = l + 2k):
    gamma = (E_{l+1}[k] - E_l[k]) / (E_l[k+1] - E_l[k]).  It sits near 1/2 for
    linear-like levels, 0 for bent-like ones and 1 above the anharmonic
    separatrix.
    """
    _pair_blocks(lower, upper)
    k = min(lower.dim - 1, upper.dim)
    if k < 1:
        raise DomainError("blocks too small for the quasilinearity ratio")
    e0, e1 = lower.energies, upper.energies
    num = e1[:k] - e0[:k]
    den = e0[1 : k + 1] - e0[:k]
    valid = np.abs(den) > GAMMA_MIN_GAP * max(1.0, float(np.abs(e0).max()))
    gamma = np.full(k, np.nan)
    gamma[valid] = num[valid] / den[valid]
    return DiagnosticSeries(
        kind="gamma",
        ell=(lower.ell, upper.ell),
        energies=(e0[:k] - lower.ground_ref) / lower.N,
        values=gamma,
        ordinals=np.arange(k),
        params=lower.params,
        valid=valid,
    )


_EXTREMUM = {"pr": np.argmin, "omega_eff": np.argmin, "expect_n": np.argmax, "qfs": np.argmax}


def critical_state(
    series: DiagnosticSeries,
    block: SpectrumBlock,
    target: float,
    window: float = CRITICAL_WINDOW,
    separatrix: str = "f2",
) -> CriticalStateReport:
    """Extremal state of a probe near a critical energy and its dominant basis state."""
    if series.kind not in _EXTREMUM:
        raise DomainError(f"critical_state does not handle {series.kind!r} series")
    _require_vectors(block, "critical_state")
    m = series.valid & (np.abs(series.energies - target) <= window)
    if not m.any():
        raise DomainError(f"no states within {window} of {target}; widen the window")
    cand = np.flatnonzero(m)
    j = int(series.ordinals[cand[_EXTREMUM[series.kind](series.values[cand])]])
    weights = block.vectors[:, j] ** 2
    i = int(np.argmax(weights))
    return CriticalStateReport(
        ordinal=j,
        energy=float(normalized_excitation(block)[j]),
        n_dominant=int(block.basis.n_values[i]),
        weight=float(weights[i]),
        separatrix=separatrix,
        target=float(target),
    )


@dataclass(frozen=True)
class DegeneracyPair:
    ordinal: int
    energy: float
    partner_ordinal: int
    gap: float
    relative_gap: float
    degenerate: bool


def degeneracy_map(
    lower: SpectrumBlock, upper: SpectrumBlock, threshold: float = DEGENERACY_THRESHOLD
) -> list[DegeneracyPair]:
    """Classify each level of block l+1 as degenerate with a level of block l.

    Level k of block l+1 lies between levels k and k+1 of block l.  Its gap is
    the distance to the nearer of the two, measured in units of their spacing
    (the same ratio that makes gamma approach 0 or 1); it is flagged
    degenerate when that relative gap is below ``threshold``.
    """
    _pair_blocks(lower, upper)
    k = min(lower.dim - 1, upper.dim)
    e0, e1 = lower.energies, upper.energies
    out = []
    for i in range(k):
        below = e1[i] - e0[i]
        above = e0[i + 1] - e1[i]
        spacing = e0[i + 1] - e0[i]
        if abs(below) <= abs(above):
            gap, partner = below, i
        else:
            gap, partner = above, i + 1
        rel = abs(gap) / spacing if spacing > 0 else np.inf
        out.append(
            DegeneracyPair(
                ordinal=i,
                energy=float((e1[i] - upper.ground_ref) / upper.N),
                partner_ordinal=partner,
                gap=float(gap / upper.N),
                relative_gap=float(rel),
                degenerate=bool(rel < threshold),
            )
        )
    return out
