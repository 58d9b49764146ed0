"""Eigensolver layer for symmetric tridiagonal blocks.

The default route hands the block to LAPACK through
:func:`scipy.linalg.eigh_tridiagonal`.  :func:`tql_implicit` is an
implicit-shift QL solver with Wilkinson shifts kept as a dependency-free
alternative (``method="ql"``); it is slower but useful for cross-checks.

Every solve is followed by cheap a-posteriori checks (trace, residuals,
orthonormality) unless ``check=False``.
"""

from __future__ import annotations

import math
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .algebra import (
    BasisBlock,
    ModelParams,
    TridiagonalBlock,
    assemble_hamiltonian,
    block_basis,
)
from .errors import ConvergenceError, DomainError, NumericalCheckError

RESIDUAL_TOL = 1e-10
ORTHO_TOL = 1e-10
TRACE_RTOL = 1e-9
QL_TOL = 1e-14
QL_SWEEPS_PER_DIM = 50
SIGN_REL_CUTOFF = 1e-8


class GroundReferenceWarning(UserWarning):
    """The shared ground reference is not the l = 0 ground state."""


@dataclass
class SolveAudit:
    """Worst a-posteriori errors over every checked solve since the last reset."""

    blocks: int = 0
    vector_blocks: int = 0
    worst_trace: float = 0.0
    worst_residual: float = 0.0
    worst_ortho: float = 0.0


_AUDIT = SolveAudit()
_AUDIT_LOCK = threading.Lock()


def audit() -> SolveAudit:
    with _AUDIT_LOCK:
        return replace(_AUDIT)


def reset_audit() -> None:
    global _AUDIT
    with _AUDIT_LOCK:
        _AUDIT = SolveAudit()


def _record(trace=None, residual=None, ortho=None):
    with _AUDIT_LOCK:
        if trace is not None:
            _AUDIT.blocks += 1
            _AUDIT.worst_trace = max(_AUDIT.worst_trace, trace)
        if residual is not None:
            _AUDIT.vector_blocks += 1
            _AUDIT.worst_residual = max(_AUDIT.worst_residual, residual)
            _AUDIT.worst_ortho = max(_AUDIT.worst_ortho, ortho)


@dataclass(frozen=True)
class SpectrumBlock:
    """Ascending eigenvalues (and optionally eigenvectors) of one l block.

    ``vectors[:, j]`` is the eigenvector of ``energies[j]`` in the ascending-n
    basis order.  ``ground_ref`` is the energy used to form normalized
    excitation energies; :func:`full_spectrum` sets it to the global minimum
    over all requested blocks.
    """

    params: ModelParams | None
    ell: int
    energies: NDArray[np.float64] = field(repr=False)
    basis: BasisBlock = field(repr=False)
    vectors: NDArray[np.float64] | None = field(default=None, repr=False)
    ground_ref: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def N(self) -> int:
        return self.basis.N

    @property
    def has_vectors(self) -> bool:
        return self.vectors is not None

    @property
    def normalized(self) -> NDArray[np.float64]:
        return normalized_excitation(self)

    def with_ground_ref(self, ground_ref: float) -> "SpectrumBlock":
        return replace(self, ground_ref=float(ground_ref))


def tql_implicit(diag, offdiag, want_vectors=False, max_sweeps=None):
    """Implicit QL with Wilkinson shifts for a symmetric tridiagonal matrix.

    Returns ascending eigenvalues, and the orthonormal eigenvector matrix when
    ``want_vectors`` is set.  Raises :class:`ConvergenceError` after
    ``max_sweeps`` QL iterations (default ``50 * dim``).
    """
    d = np.array(diag, dtype=float)
    n = len(d)
    e = np.zeros(n)
    e[: n - 1] = offdiag
    z = np.eye(n) if want_vectors else None
    cap = QL_SWEEPS_PER_DIM * max(n, 1) if max_sweeps is None else max_sweeps
    sweeps = 0

    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= QL_TOL * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > cap:
                raise ConvergenceError(f"QL did not converge in {cap} sweeps (dim={n})")

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    zi = z[:, i].copy()
                    z[:, i] = c * zi - s * z[:, i + 1]
                    z[:, i + 1] = s * zi + c * z[:, i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(d, kind="stable")
    if z is None:
        return d[order]
    return d[order], z[:, order]


def _fix_signs(v: NDArray) -> NDArray:
    # first component above a relative cutoff is made positive
    mags = np.abs(v)
    first = np.argmax(mags > SIGN_REL_CUTOFF * mags.max(axis=0), axis=0)
    signs = np.sign(v[first, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def _solve(T: TridiagonalBlock, want_vectors: bool, method: str):
    d = np.asarray(T.diag, dtype=float)
    e = np.asarray(T.offdiag, dtype=float)
    if T.dim < 1:
        raise DomainError("empty block")
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise DomainError(f"non-finite entries in {T.describe()}")
    if T.dim == 1:
        return (d.copy(), np.ones((1, 1))) if want_vectors else d.copy()
    if method == "lapack":
        try:
            return scipy.linalg.eigh_tridiagonal(d, e, eigvals_only=not want_vectors)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"LAPACK failed on {T.describe()}: {exc}", T) from exc
    if method == "ql":
        try:
            return tql_implicit(d, e, want_vectors)
        except ConvergenceError as exc:
            raise ConvergenceError(f"{exc} on {T.describe()}", T) from exc
    raise DomainError(f"unknown eigensolver method {method!r}")


def _check_values(T: TridiagonalBlock, w: NDArray) -> None:
    trace = float(np.sum(T.diag))
    scale = max(1.0, float(np.sum(np.abs(T.diag))))
    dev = abs(float(np.sum(w)) - trace) / scale
    _record(trace=dev)
    if dev > TRACE_RTOL:
        raise NumericalCheckError(f"trace not preserved on {T.describe()}")
    if np.any(np.diff(w) < 0):
        raise NumericalCheckError(f"eigenvalues not ascending on {T.describe()}")


def _check_vectors(T: TridiagonalBlock, w: NDArray, v: NDArray) -> None:
    # residual scaled by the block norm, so one tolerance serves every N
    res = float(np.linalg.norm(T.matvec(v) - v * w, axis=0).max()) / max(1.0, T.inf_norm())
    ortho = float(np.abs(v.T @ v - np.eye(v.shape[1])).max())
    _record(residual=res, ortho=ortho)
    if res > RESIDUAL_TOL:
        raise NumericalCheckError(f"scaled eigen-residual {res:.3e} too large on {T.describe()}")
    if ortho > ORTHO_TOL:
        raise NumericalCheckError(f"orthonormality defect {ortho:.3e} on {T.describe()}")


def eigenvalues(T: TridiagonalBlock, method: str = "lapack", check: bool = True) -> NDArray:
    """Ascending eigenvalues of a tridiagonal block."""
    w = _solve(T, False, method)
    if check:
        _check_values(T, w)
    return w


def _spectrum_block(T, w, v, ground_ref):
    return SpectrumBlock(
        params=T.params,
        ell=T.basis.ell,
        energies=w,
        basis=T.basis,
        vectors=v,
        ground_ref=float(w[0]) if ground_ref is None else float(ground_ref),
    )


def eigensystem(
    T: TridiagonalBlock,
    ground_ref: float | None = None,
    method: str = "lapack",
    check: bool = True,
) -> SpectrumBlock:
    """Eigenvalues and sign-fixed orthonormal eigenvectors of a block.

    ``ground_ref`` defaults to the lowest eigenvalue of this block.
    """
    w, v = _solve(T, True, method)
    v = _fix_signs(v)
    if check:
        _check_values(T, w)
        _check_vectors(T, w, v)
    return _spectrum_block(T, w, v, ground_ref)


def solve_block(
    params: ModelParams,
    ell: int,
    want_vectors: bool = False,
    ground_ref: float | None = None,
    method: str = "lapack",
) -> SpectrumBlock:
    """Assemble and diagonalize the Hamiltonian block of angular momentum l."""
    T = assemble_hamiltonian(params, block_basis(params, ell))
    if want_vectors:
        return eigensystem(T, ground_ref, method)
    return _spectrum_block(T, eigenvalues(T, method), None, ground_ref)


def ground_state(params: ModelParams, ell: int = 0):
    """Lowest eigenpair (energy, vector) of one block, without the full solve."""
    T = assemble_hamiltonian(params, block_basis(params, ell))
    if T.dim == 1:
        return float(T.diag[0]), np.ones(1)
    try:
        w, v = scipy.linalg.eigh_tridiagonal(
            T.diag, T.offdiag, select="i", select_range=(0, 0)
        )
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"LAPACK failed on {T.describe()}: {exc}", T) from exc
    v = _fix_signs(v)
    _check_vectors(T, w, v)
    return float(w[0]), v[:, 0]


def full_spectrum(
    params: ModelParams,
    ells,
    want_vectors: bool = False,
    jobs: int = 1,
    method: str = "lapack",
) -> dict[int, SpectrumBlock]:
    """Solve several l blocks and share a common ground-state reference.

    Blocks are independent, so ``jobs > 1`` solves them on a thread pool; the
    result is identical to the sequential run.
    """
    ells = [int(l) for l in ells]
    if not ells:
        raise DomainError("no l values requested")
    for l in ells:
        if abs(l) > params.N:
            raise DomainError(f"|l|={abs(l)} exceeds N={params.N}")

    def work(l):
        try:
            return solve_block(params, l, want_vectors, method=method)
        except ConvergenceError as exc:
            raise ConvergenceError(f"l={l}: {exc}", exc.block) from exc

    if jobs > 1 and len(ells) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            blocks = list(pool.map(work, ells))
    else:
        blocks = [work(l) for l in ells]

    lows = [b.energies[0] for b in blocks]
    ground = float(min(lows))
    if 0 not in ells:
        warnings.warn(
            "l=0 not among the requested blocks; ground reference may not be the true ground state",
            GroundReferenceWarning,
            stacklevel=2,
        )
    elif lows[ells.index(0)] > ground:
        # happens past the separatrix crossing, where the lowest level moves to l > 0
        warnings.warn(
            f"lowest level lies outside the l=0 block for {params}",
            GroundReferenceWarning,
            stacklevel=2,
        )
    return {l: b.with_ground_ref(ground) for l, b in zip(ells, blocks)}


def normalized_excitation(block: SpectrumBlock) -> NDArray[np.float64]:
    """(E_j - ground_ref) / N, the energy axis shared with the separatrices."""
    return (block.energies - block.ground_ref) / block.N
