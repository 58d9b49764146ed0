"""u(2) basis ladders and tridiagonal operator blocks for the 2D vibron model.

The model Hamiltonian is

    H = (1 - xi) n + alpha/(N-1) n(n+1) + xi/(N-1) P,     P = N(N+1) - W^2,

written in the cylindrical-oscillator basis |n^l>.  H conserves the vibrational
angular momentum l, so each l sector is a ladder n = |l|, |l|+2, ..., and the
only couplings are n <-> n +/- 2.  Every operator built here is therefore a
real symmetric tridiagonal block.

Energies are in units of the overall Hamiltonian scale (set to one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError

XI_CRITICAL = 0.2


def _frozen(a: NDArray) -> NDArray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModelParams:
    """System size and control parameters of one model instance.

    Parameters
    ----------
    N : int
        Total vibron number, N >= 2.
    xi : float
        Control parameter in [0, 1]; 0 is the u(2) limit, 1 the so(3) limit.
    alpha : float
        Strength of the anharmonic n(n+1)/(N-1) term.
    """

    N: int
    xi: float
    alpha: float = 0.0

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise DomainError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.N < 2:
            raise DomainError(f"N must be >= 2, got {self.N}")
        if not 0.0 <= self.xi <= 1.0:
            raise DomainError(f"xi must lie in [0, 1], got {self.xi}")
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha}")

    @property
    def symmetric_phase(self) -> bool:
        return self.xi <= XI_CRITICAL

    @property
    def in_studied_regime(self) -> bool:
        """True when alpha_t(xi) <= alpha <= 0 in the symmetric phase.

        In the broken phase only the sign condition alpha <= 0 is checked.
        """
        if self.alpha > 0.0:
            return False
        if self.symmetric_phase:
            return self.alpha >= -(3.0 * self.xi + 1.0) / 2.0
        return True

    def replace(self, **changes) -> "ModelParams":
        values = {"N": self.N, "xi": self.xi, "alpha": self.alpha}
        values.update(changes)
        return ModelParams(**values)


@dataclass(frozen=True)
class BasisBlock:
    """Fixed-l ladder of u(2) states, ordered by increasing n.

    The ordinal of |n^l> inside the block is k = (n - |l|) / 2.
    """

    N: int
    ell: int
    n_values: NDArray[np.int64] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.n_values)

    def ordinal(self, n: int) -> int:
        k, rem = divmod(n - abs(self.ell), 2)
        if rem or not 0 <= k < self.dim:
            raise DomainError(f"n={n} is not in the l={self.ell} ladder for N={self.N}")
        return k


@dataclass(frozen=True)
class So3Labels:
    """Displaced-oscillator (bent molecule) labels of a u(2) state."""

    nu_b: int
    omega: int
    K: int


@dataclass(frozen=True)
class TridiagonalBlock:
    """Real symmetric tridiagonal matrix of an operator within one l block."""

    diag: NDArray[np.float64] = field(repr=False)
    offdiag: NDArray[np.float64] = field(repr=False)
    basis: BasisBlock
    params: ModelParams | None = None
    label: str = "H"

    def __post_init__(self):
        if len(self.diag) != self.basis.dim or len(self.offdiag) != max(self.basis.dim - 1, 0):
            raise DomainError("diagonal/off-diagonal lengths do not match the basis dimension")

    @property
    def dim(self) -> int:
        return self.basis.dim

    def describe(self) -> str:
        p = self.params
        tag = f"{self.label}[l={self.basis.ell}, dim={self.dim}"
        if p is not None:
            tag += f", N={p.N}, xi={p.xi:g}, alpha={p.alpha:g}"
        return tag + "]"

    def to_dense(self) -> NDArray[np.float64]:
        m = np.diag(np.asarray(self.diag, dtype=float))
        if self.dim > 1:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m

    def matvec(self, x: NDArray) -> NDArray:
        """Multiply the block into a vector or into the columns of a matrix."""
        x = np.asarray(x, dtype=float)
        d = self.diag if x.ndim == 1 else self.diag[:, None]
        out = d * x
        if self.dim > 1:
            e = self.offdiag if x.ndim == 1 else self.offdiag[:, None]
            out[:-1] += e * x[1:]
            out[1:] += e * x[:-1]
        return out

    def inf_norm(self) -> float:
        a = np.abs(self.diag).astype(float)
        if self.dim > 1:
            a[:-1] += np.abs(self.offdiag)
            a[1:] += np.abs(self.offdiag)
        return float(a.max())


def block_basis(params: ModelParams | int, ell: int) -> BasisBlock:
    """Enumerate the u(2) ladder n = |l|, |l|+2, ..., <= N.

    Blocks for negative l are served by the |l| ladder; the spectrum depends
    on l only through l^2.
    """
    N = params.N if isinstance(params, ModelParams) else int(params)
    ell = int(ell)
    if abs(ell) > N:
        raise DomainError(f"|l|={abs(ell)} exceeds N={N}")
    a = abs(ell)
    return BasisBlock(N=N, ell=a, n_values=_frozen(np.arange(a, N + 1, 2, dtype=np.int64)))


def _check_basis(params: ModelParams, block: BasisBlock) -> None:
    if block.N != params.N:
        raise DomainError(f"basis built for N={block.N} but params have N={params.N}")


def _u2_diagonal(params: ModelParams, n: NDArray[np.int64]) -> NDArray[np.float64]:
    """(1 - xi) n + alpha/(N-1) n(n+1)."""
    nf = n.astype(float)
    return (1.0 - params.xi) * nf + params.alpha / (params.N - 1) * nf * (nf + 1.0)


def _pairing_diagonal(N: int, ell: int, n: NDArray[np.int64]) -> NDArray[np.int64]:
    """<n^l| P |n^l> in exact integer arithmetic."""
    return N * (N + 1) - (N - n) * (n + 2) - (N - n + 1) * n - ell * ell


def _pairing_offdiag(N: int, ell: int, n: NDArray[np.int64]) -> NDArray[np.float64]:
    """<n-2^l| P |n^l> for each n in the upper ladder, radicand kept integral."""
    if len(n) < 2:
        return np.zeros(0)
    upper = n[1:]
    from_lower_line = (N - upper + 2) * (N - upper + 1) * (upper + ell) * (upper - ell)
    lower = n[:-1]
    from_upper_line = (N - lower) * (N - lower - 1) * (lower + ell + 2) * (lower - ell + 2)
    # the two coupling lines of the matrix element table must describe the same entry
    if not np.array_equal(from_lower_line, from_upper_line):
        raise AssertionError("inconsistent n <-> n-2 coupling in the pairing operator")
    if np.any(from_lower_line < 0):
        raise AssertionError("negative radicand in pairing coupling")
    return np.sqrt(from_lower_line.astype(float))


def pairing_block(params: ModelParams, block: BasisBlock) -> TridiagonalBlock:
    """Unscaled pairing operator P = N(N+1) - W^2 in one l block."""
    _check_basis(params, block)
    n = block.n_values
    return TridiagonalBlock(
        diag=_frozen(_pairing_diagonal(params.N, block.ell, n).astype(float)),
        offdiag=_frozen(_pairing_offdiag(params.N, block.ell, n)),
        basis=block,
        params=params,
        label="P",
    )


def number_block(params: ModelParams, block: BasisBlock) -> TridiagonalBlock:
    """The u(2) number operator n, diagonal in the ladder."""
    _check_basis(params, block)
    return TridiagonalBlock(
        diag=_frozen(block.n_values.astype(float)),
        offdiag=_frozen(np.zeros(max(block.dim - 1, 0))),
        basis=block,
        params=params,
        label="n",
    )


def _weighted(params, block, w_u2, w_pair, label):
    _check_basis(params, block)
    n = block.n_values
    scale = params.xi / (params.N - 1)
    u2 = _u2_diagonal(params, n)
    pd = scale * _pairing_diagonal(params.N, block.ell, n).astype(float)
    po = scale * _pairing_offdiag(params.N, block.ell, n)
    return TridiagonalBlock(
        diag=_frozen(w_u2 * u2 + w_pair * pd),
        offdiag=_frozen(w_pair * po),
        basis=block,
        params=params,
        label=label,
    )


def assemble_hamiltonian(params: ModelParams, block: BasisBlock) -> TridiagonalBlock:
    """Hamiltonian matrix of one l block.

    Examples
    --------
    >>> p = ModelParams(N=2, xi=1.0, alpha=0.0)
    >>> h = assemble_hamiltonian(p, block_basis(p, 0))
    >>> h.diag.tolist(), round(float(h.offdiag[0]) ** 2, 12)
    ([2.0, 4.0], 8.0)
    """
    return _weighted(params, block, 1.0, 1.0, "H")


def assemble_lambda_hamiltonian(
    params: ModelParams, lam: float, block: BasisBlock
) -> TridiagonalBlock:
    """H(lam): weight 1 - lam on the u(2)-diagonal terms, 1 + lam on pairing."""
    return _weighted(params, block, 1.0 - lam, 1.0 + lam, f"H(lambda={lam:g})")


def assemble_interaction(params: ModelParams, block: BasisBlock) -> TridiagonalBlock:
    """dH(lam)/dlam, the perturbation that drives the fidelity susceptibility."""
    return _weighted(params, block, -1.0, 1.0, "H_I")


def so3_labels(n: int, ell: int, N: int) -> So3Labels:
    """Bent-molecule labels (nu_b, omega, K) of the u(2) state |n^l>."""
    n, ell, N = int(n), int(ell), int(N)
    if not abs(ell) <= n <= N:
        raise DomainError(f"need |l| <= n <= N, got n={n}, l={ell}, N={N}")
    if (n - ell) % 2:
        raise DomainError(f"n={n} and l={ell} must have the same parity")
    nu_b = (n - abs(ell)) // 2
    return So3Labels(nu_b=nu_b, omega=N - 2 * nu_b, K=ell)


def u2_label(labels: So3Labels, N: int) -> tuple[int, int]:
    """Inverse of :func:`so3_labels`: returns (n, l)."""
    if labels.omega != N - 2 * labels.nu_b:
        raise DomainError("omega inconsistent with nu_b for this N")
    return 2 * labels.nu_b + abs(labels.K), labels.K
