"""Classical-limit energy functional and the ESQPT separatrices.

With x = r^2 / (1 + r^2) the functional is the quadratic

    E(x) = xi + (1 - 5 xi) x + (4 xi + alpha) x^2,   x in [0, 1),

which is the form used for the closed-form critical quantities below.  All
energies are per boson, measured on the same axis as the normalized
excitation energies of the finite-N spectra.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import XI_CRITICAL
from .errors import DomainError


class RegimeWarning(UserWarning):
    """Parameters fall outside alpha_t(xi) <= alpha <= 0."""


def energy_functional(r, xi: float, alpha: float):
    """Mean-field energy per boson at deformation r >= 0 (scalar or array)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("r must be non-negative")
    r2 = r * r
    out = (
        (1.0 - xi) * r2 / (1.0 + r2)
        + alpha * r2 * r2 / (1.0 + r2) ** 2
        + xi * ((1.0 - r2) / (1.0 + r2)) ** 2
    )
    return float(out) if out.ndim == 0 else out


def energy_asymptote(xi: float, alpha: float) -> float:
    return 1.0 + alpha


def alpha_threshold(xi: float) -> float:
    """Most negative alpha that keeps r = 0 the only extremum, for xi <= 0.2."""
    if not 0.0 <= xi <= XI_CRITICAL:
        raise DomainError(f"alpha threshold is defined for 0 <= xi <= {XI_CRITICAL}, got {xi}")
    return -(3.0 * xi + 1.0) / 2.0


def phase(xi: float) -> str:
    return "symmetric" if xi <= XI_CRITICAL else "broken"


def r_min(xi: float, alpha: float) -> float | None:
    """Position of the off-origin minimum in the broken phase, else None.

    Requires xi > 0.2 and 2 alpha + 3 xi + 1 > 0; the latter implies
    4 xi + alpha > 0 there, so the stationary point is a true minimum.
    """
    if xi <= XI_CRITICAL:
        return None
    denom = 2.0 * alpha + 3.0 * xi + 1.0
    if denom <= 0.0:
        return None
    return math.sqrt(5.0 * (xi - XI_CRITICAL) / denom)


def _check_broken(xi, alpha):
    if 4.0 * xi + alpha <= 0.0:
        raise DomainError(f"4 xi + alpha must be positive in the broken phase (xi={xi}, alpha={alpha})")
    if 2.0 * alpha + 3.0 * xi + 1.0 <= 0.0:
        warnings.warn(
            f"no interior minimum for xi={xi}, alpha={alpha}; closed form evaluated anyway",
            RegimeWarning,
            stacklevel=3,
        )


def separatrix_f1(xi: float, alpha: float) -> float | None:
    """Barrier-to-linearity height E(0) - E(r_min); None in the symmetric phase."""
    if xi <= XI_CRITICAL:
        return None
    _check_broken(xi, alpha)
    return (5.0 * xi - 1.0) ** 2 / (4.0 * (4.0 * xi + alpha))


def separatrix_f2(xi: float, alpha: float, branch: str | None = None) -> float:
    """Asymptote minus minimum of the functional, the anharmonic ESQPT energy.

    ``branch`` forces the "symmetric" or "broken" closed form regardless of
    xi; by default the branch follows the phase.
    """
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"xi must lie in [0, 1], got {xi}")
    if branch not in (None, "symmetric", "broken"):
        raise DomainError(f"unknown branch {branch!r}")
    if branch == "symmetric" or (branch is None and xi <= XI_CRITICAL):
        if xi <= XI_CRITICAL and (alpha > 0.0 or alpha < alpha_threshold(xi)):
            warnings.warn(
                f"alpha={alpha} outside [alpha_t, 0] at xi={xi}",
                RegimeWarning,
                stacklevel=2,
            )
        return 1.0 + alpha - xi
    _check_broken(xi, alpha)
    return (1.0 + 2.0 * alpha + 3.0 * xi) ** 2 / (4.0 * (4.0 * xi + alpha))


def separatrix_crossing(alpha: float) -> float:
    """Control parameter where f1 = f2, i.e. xi* = 1 + alpha."""
    if not -1.0 < alpha <= 0.0:
        raise DomainError(f"separatrices cross inside (0, 1] only for -1 < alpha <= 0, got {alpha}")
    return 1.0 + alpha


@dataclass(frozen=True)
class MeanFieldReport:
    xi: float
    alpha: float
    phase: str
    alpha_threshold: float
    r_min: float | None
    f1: float | None
    f2: float | None
    crossing_xi: float | None


def mean_field_report(xi: float, alpha: float) -> MeanFieldReport:
    """Collect every closed-form mean-field quantity for one (xi, alpha).

    Quantities that are undefined for the inputs come back as None instead of
    raising, so the report can be tabulated over whole grids.
    """
    ph = phase(xi)
    # in the broken phase the threshold formula is reported as its extension
    at = -(3.0 * xi + 1.0) / 2.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        try:
            f1 = separatrix_f1(xi, alpha)
        except DomainError:
            f1 = None
        try:
            f2 = separatrix_f2(xi, alpha)
        except DomainError:
            f2 = None
    try:
        cross = separatrix_crossing(alpha)
    except DomainError:
        cross = None
    return MeanFieldReport(
        xi=xi,
        alpha=alpha,
        phase=ph,
        alpha_threshold=at,
        r_min=r_min(xi, alpha),
        f1=f1,
        f2=f2,
        crossing_xi=cross,
    )


def functional_derivative(r, xi: float, alpha: float, h: float = 1e-6):
    """Central-difference dE/dr, used to cross-check the closed forms."""
    r = np.asarray(r, dtype=float)
    lo = np.maximum(r - h, 0.0)
    hi = r + h
    return (energy_functional(hi, xi, alpha) - energy_functional(lo, xi, alpha)) / (hi - lo)
