"""Reproduction checks against closed forms and the published figure features.

Each ``check_*`` function returns a :class:`CheckResult` with the measured
values next to the expectation.  :func:`run_all` executes every check, never
stopping early; an exception inside a check is recorded as a failure.
"""

from __future__ import annotations

import json
import time
import traceback
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import ModelParams, assemble_hamiltonian, assemble_lambda_hamiltonian, block_basis
from .diagnostics import (
    critical_state,
    density_of_states,
    dos_peaks,
    effective_frequency,
    expectation_n,
    participation_ratio,
    qfs,
    quasilinearity,
)
from .meanfield import separatrix_crossing, separatrix_f1, separatrix_f2
from .spectral import (
    GroundReferenceWarning,
    SpectrumBlock,
    audit,
    eigensystem,
    eigenvalues,
    full_spectrum,
    ground_state,
    reset_audit,
    solve_block,
)

ALPHA = -0.6
DOS_N = (1024, 2048, 4096)
DOS_CASES = {0.15: 1, 0.3: 2, 0.4: 1, 0.5: 2}
DOS_BIN = 0.01
DOS_PROMINENCE = 0.15
OBS_TOL = 0.02
GAMMA_TOL = 0.05
GAMMA_MARGIN = 0.03
QFS_FD_STEP = 1e-3
QFS_FD_RTOL = 1e-4
QFS_FD_ATOL = 1e-10
GS_N = (100, 200, 400)
GS_FINE_GRID = np.round(np.arange(0.15, 0.3 + 1e-12, 0.0005), 10)
GS_COARSE_GRID = np.round(np.arange(0.2, 1.0 + 1e-12, 0.01), 10)


@dataclass
class CheckResult:
    id: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.id:2d} {self.name}: {self.detail}"


def _jsonify(x):
    if isinstance(x, dict):
        return {str(k): _jsonify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonify(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return None if not np.isfinite(x) else float(x)
    if isinstance(x, np.ndarray):
        return _jsonify(x.tolist())
    return x


# --- 1 -----------------------------------------------------------------------


def exact_limit_measurements():
    worst_diag = 0.0
    worst_off = 0.0
    for N, a in [(2, 0.0), (11, -0.6), (50, -0.3), (101, 0.4)]:
        p = ModelParams(N, 0.0, a)
        for l in range(0, N + 1):
            h = assemble_hamiltonian(p, block_basis(p, l))
            n = h.basis.n_values.astype(float)
            expect = n + a / (N - 1) * n * (n + 1)
            worst_diag = max(worst_diag, float(np.abs(h.diag - expect).max()))
            if h.dim > 1:
                worst_off = max(worst_off, float(np.abs(h.offdiag).max()))
    p = ModelParams(2, 1.0, 0.0)
    w = eigenvalues(assemble_hamiltonian(p, block_basis(p, 0)))
    return worst_diag, worst_off, w


def check_exact_limits() -> CheckResult:
    worst_diag, worst_off, w = exact_limit_measurements()
    err = float(np.abs(w - np.array([0.0, 6.0])).max())
    ok = worst_diag == 0.0 and worst_off == 0.0 and err <= 1e-12
    return CheckResult(
        1,
        "exact limits",
        ok,
        {"xi0_diag_dev": worst_diag, "xi0_offdiag_max": worst_off, "N2_eigs": w},
        {"xi0_diag_dev": 0.0, "N2_eigs": [0.0, 6.0], "tol": 1e-12},
        f"xi=0 diag dev {worst_diag:g}, offdiag {worst_off:g}; N=2 eigs {w.round(14).tolist()}",
    )


# --- 2 -----------------------------------------------------------------------


def so3_limit_error(N: int = 50) -> float:
    p = ModelParams(N, 1.0, 0.0)
    worst = 0.0
    for l in range(N + 1):
        w = solve_block(p, l).energies
        omega = N - 2 * np.arange(len(w))
        closed = (N * (N + 1) - omega * (omega + 1)) / (N - 1)
        worst = max(worst, float(np.abs(w - closed).max()))
    return worst


def check_so3_limit() -> CheckResult:
    err = so3_limit_error(50)
    return CheckResult(
        2,
        "so(3) closed form",
        err < 1e-9,
        {"max_abs_error": err},
        {"max_abs_error": "< 1e-9"},
        f"N=50 max |E - closed form| = {err:.3e}",
    )


# --- 3 -----------------------------------------------------------------------


def check_separatrix_algebra() -> CheckResult:
    a = ALPHA
    sym = separatrix_f2(0.2, a, branch="symmetric")
    brk = separatrix_f2(0.2, a, branch="broken")
    f1_edge = separatrix_f1(0.2 + 1e-12, a)
    xs = separatrix_crossing(a)
    f1x, f2x = separatrix_f1(xs, a), separatrix_f2(xs, a)
    devs = [abs(sym - (0.8 + a)), abs(brk - (0.8 + a)), abs(f1x - 0.25), abs(f2x - 0.25)]
    ok = max(devs) <= 1e-12 and abs(f1_edge) <= 1e-12 and abs(xs - 0.4) <= 1e-12
    return CheckResult(
        3,
        "separatrix algebra",
        ok,
        {"f2_sym": sym, "f2_broken": brk, "f1_xi_c_plus": f1_edge, "crossing": xs, "f1": f1x, "f2": f2x},
        {"f2_at_xi_c": 0.8 + a, "crossing": 0.4, "f_at_crossing": 0.25, "tol": 1e-12},
        f"f2(xi_c)={sym:.15g}/{brk:.15g}, xi*={xs:g}, f1=f2={f1x:.15g}",
    )


# --- 4 -----------------------------------------------------------------------


def dos_targets(xi: float, alpha: float = ALPHA) -> list[float]:
    f1 = separatrix_f1(xi, alpha)
    f2 = separatrix_f2(xi, alpha)
    targets = [f2] if f1 is None or abs(f1 - f2) < DOS_BIN else [f1, f2]
    return sorted(targets)


def dos_measurements():
    out = {}
    for xi in DOS_CASES:
        for N in DOS_N:
            b = solve_block(ModelParams(N, xi, ALPHA), 0)
            hist = density_of_states(b, DOS_BIN)
            spacing = density_of_states(b, estimator="spacing")
            out[(xi, N)] = {
                "peaks": sorted(float(x) for x in dos_peaks(hist, DOS_PROMINENCE)),
                "hist_height": float(hist.values.max()),
                "spacing_height": float(np.nanmax(spacing.values)),
            }
    return out


def _increasing(xs) -> bool:
    return all(b > a for a, b in zip(xs, xs[1:]))


def check_dos_peaks() -> CheckResult:
    """Peak locations and growth with N, both on the 0.01 histogram.

    The inverse-spacing heights are reported alongside; they are not used for
    the pass/fail decision because the criterion fixes the histogram.
    """
    m = dos_measurements()
    located = grown = True
    notes = []
    for xi, count in DOS_CASES.items():
        targets = dos_targets(xi)
        peaks = m[(xi, 4096)]["peaks"]
        good = len(peaks) == count and all(abs(p - t) <= DOS_BIN for p, t in zip(peaks, targets))
        hist = [m[(xi, N)]["hist_height"] for N in DOS_N]
        spacing = [m[(xi, N)]["spacing_height"] for N in DOS_N]
        located &= good
        grown &= _increasing(hist)
        notes.append(
            f"xi={xi}: peaks {np.round(peaks, 3).tolist()} vs {np.round(targets, 3).tolist()}"
            f" {'ok' if good else 'MISS'}, histogram heights {np.round(hist, 2).tolist()}"
            f" {'rising' if _increasing(hist) else 'NOT rising'}"
            f" (inverse-spacing {np.round(spacing, 2).tolist()})"
        )
    measured = {f"{xi}/{N}": v for (xi, N), v in m.items()}
    measured["locations_ok"] = located
    measured["histogram_heights_rising"] = grown
    return CheckResult(
        4,
        "DOS peak locations and heights",
        located and grown,
        measured,
        {"within": DOS_BIN, "targets": {xi: dos_targets(xi) for xi in DOS_CASES}, "heights": "increasing in N"},
        "; ".join(notes),
    )


# --- 5, 6 -------------------------------------------------------------------


def _vectors_block(N, xi, alpha=ALPHA, ell=0) -> SpectrumBlock:
    return full_spectrum(ModelParams(N, xi, alpha), sorted({0, ell}), want_vectors=True)[ell]


def check_dixon_dip() -> CheckResult:
    b = _vectors_block(1000, 0.16)
    target = separatrix_f2(0.16, ALPHA)
    w = effective_frequency(b)
    nexp = expectation_n(b)
    x_dip = float(w.energies[np.argmin(w.values)])
    x_peak = float(nexp.energies[np.argmax(nexp.values)])
    ok = abs(x_dip - target) <= OBS_TOL and abs(x_peak - target) <= OBS_TOL and w.values.min() > 0
    return CheckResult(
        5,
        "Dixon dip / <n> peak",
        ok,
        {"omega_eff_argmin": x_dip, "expect_n_argmax": x_peak, "omega_eff_min": float(w.values.min())},
        {"target": target, "tol": OBS_TOL},
        f"dip at {x_dip:.4f}, <n> peak at {x_peak:.4f}, f2={target:g}",
    )


def check_localization() -> CheckResult:
    cases = []
    b = _vectors_block(1000, 0.16)
    r = critical_state(participation_ratio(b), b, separatrix_f2(0.16, ALPHA), separatrix="f2")
    cases.append(("xi=0.16 f2", r, 1000))
    b = _vectors_block(1000, 0.3)
    s = participation_ratio(b)
    r1 = critical_state(s, b, separatrix_f1(0.3, ALPHA), separatrix="f1")
    r2 = critical_state(s, b, separatrix_f2(0.3, ALPHA), separatrix="f2")
    cases += [("xi=0.3 f1", r1, 0), ("xi=0.3 f2", r2, 1000)]
    ok = all(r.n_dominant == want for _, r, want in cases)
    return CheckResult(
        6,
        "localization of critical states",
        ok,
        {name: {"energy": r.energy, "n_dominant": r.n_dominant, "weight": r.weight} for name, r, _ in cases},
        {name: want for name, _, want in cases},
        ", ".join(f"{name}: n*={r.n_dominant} at {r.energy:.4f}" for name, r, _ in cases),
    )


# --- 7 -----------------------------------------------------------------------


def fidelity_curvature(params: ModelParams, ell: int, step: float = QFS_FD_STEP):
    """-d^2 F / d dlam^2 at dlam = 0 from overlaps of dense eigenvectors."""
    basis = block_basis(params, ell)

    def states(lam):
        m = assemble_lambda_hamiltonian(params, lam, basis).to_dense()
        return np.linalg.eigh(m)[1]

    v0, vp, vm = states(0.0), states(step), states(-step)
    fp = np.abs(np.sum(v0 * vp, axis=0))
    fm = np.abs(np.sum(v0 * vm, axis=0))
    return (2.0 - fp - fm) / step**2


def qfs_oracle_deviation(N: int = 6, xi: float = 0.4, alpha: float = ALPHA) -> float:
    p = ModelParams(N, xi, alpha)
    worst = 0.0
    for l in range(N + 1):
        chi = qfs(p, l).values
        fd = fidelity_curvature(p, l)
        dev = np.abs(chi - fd) / np.maximum(np.abs(fd), QFS_FD_ATOL / QFS_FD_RTOL)
        worst = max(worst, float(dev.max()))
    return worst


def qfs_peaks(N: int, xi: float = 0.16, alpha: float = ALPHA, ells=range(5), window: float = 0.05):
    p = ModelParams(N, xi, alpha)
    blocks = full_spectrum(p, sorted({0, *ells}), want_vectors=True)
    target = separatrix_f2(xi, alpha)
    out = {}
    for l in ells:
        s = qfs(p, l, ground_ref=blocks[0].ground_ref, block=blocks[l])
        m = np.abs(s.energies - target) <= window
        out[l] = float(s.values[m].max())
    return out


def check_qfs() -> CheckResult:
    dev = qfs_oracle_deviation()
    even_N = qfs_peaks(100)
    odd_N = qfs_peaks(101)
    stag_even = min(even_N[l] for l in (0, 2, 4)) > max(even_N[l] for l in (1, 3))
    stag_odd = max(odd_N[l] for l in (0, 2, 4)) < min(odd_N[l] for l in (1, 3))
    ok = dev <= QFS_FD_RTOL and stag_even and stag_odd
    return CheckResult(
        7,
        "QFS oracle and staggering",
        ok,
        {"fd_rel_dev": dev, "peaks_N100": even_N, "peaks_N101": odd_N},
        {"fd_rel_dev": QFS_FD_RTOL, "N100": "even l > odd l", "N101": "odd l > even l"},
        f"FD rel dev {dev:.2e}; N=100 peaks {np.round(list(even_N.values()), 1).tolist()}, "
        f"N=101 peaks {np.round(list(odd_N.values()), 1).tolist()}",
    )


# --- 8 -----------------------------------------------------------------------


def gamma_series(xi: float, N: int = 100, alpha: float = ALPHA):
    with warnings.catch_warnings():
        # past the crossing the l=1 ground lies marginally below l=0
        warnings.simplefilter("ignore", GroundReferenceWarning)
        blocks = full_spectrum(ModelParams(N, xi, alpha), [0, 1])
    return quasilinearity(blocks[0], blocks[1])


def gamma_plateaus(xi: float, N: int = 100, alpha: float = ALPHA, margin: float = GAMMA_MARGIN):
    """Window means of gamma between consecutive critical energies.

    Returns a list of (lo, hi, mean) ordered by energy; the critical
    energies are the distinct separatrix values for (xi, alpha).
    """
    s = gamma_series(xi, N, alpha)
    crit = dos_targets(xi, alpha) if xi > 0.2 else [separatrix_f2(xi, alpha)]
    edges = [-np.inf] + crit + [np.inf]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        a, b = lo + margin, hi - margin
        out.append((a, b, s.window_mean(a, b)))
    return out


GAMMA_EXPECT = {0.15: [0.5, 1.0], 0.3: [0.0, 0.5, 1.0], 0.4: [0.0, 1.0]}


def check_gamma() -> CheckResult:
    ok = True
    measured = {}
    notes = []
    for xi, expect in GAMMA_EXPECT.items():
        means = [m for _, _, m in gamma_plateaus(xi)]
        measured[xi] = means
        good = len(means) == len(expect) and all(abs(m - e) <= GAMMA_TOL for m, e in zip(means, expect))
        ok &= good
        notes.append(f"xi={xi}: {np.round(means, 3).tolist()}")
    return CheckResult(
        8,
        "gamma plateaus",
        ok,
        measured,
        {"plateaus": GAMMA_EXPECT, "tol": GAMMA_TOL, "margin": GAMMA_MARGIN},
        "; ".join(notes),
    )


# --- 9 -----------------------------------------------------------------------


def ground_order_parameter(N: int, xis, alpha: float = ALPHA) -> np.ndarray:
    out = np.empty(len(xis))
    for i, xi in enumerate(xis):
        p = ModelParams(N, float(xi), alpha)
        _, v = ground_state(p, 0)
        out[i] = float(np.sum(v**2 * block_basis(p, 0).n_values)) / N
    return out


def crossover_point(N: int, alpha: float = ALPHA) -> float:
    """xi of steepest rise of the ground-state <n>/N on the fine grid."""
    vals = ground_order_parameter(N, GS_FINE_GRID, alpha)
    slope = np.diff(vals) / np.diff(GS_FINE_GRID)
    mid = 0.5 * (GS_FINE_GRID[1:] + GS_FINE_GRID[:-1])
    return float(mid[np.argmax(slope)])


def check_ground_state() -> CheckResult:
    low = {N: float(ground_order_parameter(N, [0.1])[0]) for N in GS_N}
    mono = {N: bool(np.all(np.diff(ground_order_parameter(N, GS_COARSE_GRID)) > 0)) for N in GS_N}
    cross = {N: crossover_point(N) for N in GS_N}
    dist = [abs(cross[N] - 0.2) for N in GS_N]
    approach = all(b < a for a, b in zip(dist, dist[1:]))
    ok = all(v < 0.02 for v in low.values()) and all(mono.values()) and approach
    return CheckResult(
        9,
        "ground-state QPT precursor",
        ok,
        {"n_over_N_at_0.1": low, "monotone_above_0.2": mono, "crossover": cross},
        {"n_over_N_at_0.1": "< 0.02", "crossover": "|xi_mid - 0.2| decreasing in N"},
        f"<n>/N(0.1)={[round(v, 5) for v in low.values()]}, crossover {[round(c, 5) for c in cross.values()]}",
    )


# --- 10 ----------------------------------------------------------------------

HYGIENE_CASES = [
    (2, 1.0, 0.0, 0),
    (50, 1.0, 0.0, 0),
    (50, 1.0, 0.0, 25),
    (6, 0.4, ALPHA, 0),
    (6, 0.4, ALPHA, 1),
    (100, 0.16, ALPHA, 0),
    (100, 0.16, ALPHA, 3),
    (101, 0.16, ALPHA, 1),
    (100, 0.4, ALPHA, 0),
    (1000, 0.16, ALPHA, 0),
    (1000, 0.3, ALPHA, 0),
    (400, 0.2, ALPHA, 0),
]


def hygiene_measurements():
    worst_res = 0.0
    worst_ortho = 0.0
    for N, xi, a, l in HYGIENE_CASES:
        p = ModelParams(N, xi, a)
        T = assemble_hamiltonian(p, block_basis(p, l))
        b = eigensystem(T)
        V, w = b.vectors, b.energies
        res = np.linalg.norm(T.matvec(V) - V * w, axis=0).max() / max(1.0, T.inf_norm())
        worst_res = max(worst_res, float(res))
        worst_ortho = max(worst_ortho, float(np.abs(V.T @ V - np.eye(T.dim)).max()))
    return worst_res, worst_ortho


def check_hygiene() -> CheckResult:
    """Residual and orthonormality over every block solved so far, plus a fixed set.

    Under :func:`run_all` the audit is reset before check 1, so the worst
    values cover every checked solve made by checks 1-9.
    """
    res, ortho = hygiene_measurements()
    a = audit()
    res, ortho = max(res, a.worst_residual), max(ortho, a.worst_ortho)
    ok = res <= 1e-10 and ortho <= 1e-10 and a.worst_trace <= 1e-9
    return CheckResult(
        10,
        "numerical hygiene",
        ok,
        {
            "scaled_residual": res,
            "orthonormality": ortho,
            "trace_rel_dev": a.worst_trace,
            "blocks_audited": a.blocks,
            "vector_blocks_audited": a.vector_blocks,
        },
        {"scaled_residual": 1e-10, "orthonormality": 1e-10, "trace_rel_dev": 1e-9},
        f"{a.blocks} blocks audited ({a.vector_blocks} with vectors): max scaled residual {res:.2e}, "
        f"orthonormality defect {ortho:.2e}, trace dev {a.worst_trace:.1e}",
    )


CHECKS = [
    check_exact_limits,
    check_so3_limit,
    check_separatrix_algebra,
    check_dos_peaks,
    check_dixon_dip,
    check_localization,
    check_qfs,
    check_gamma,
    check_ground_state,
    check_hygiene,
]


def run_all(checks=None, echo=None) -> list[CheckResult]:
    results = []
    reset_audit()
    for i, fn in enumerate(checks or CHECKS, start=1):
        t0 = time.perf_counter()
        try:
            r = fn()
        except Exception as exc:  # noqa: BLE001 - failures are aggregated
            cid = CHECKS.index(fn) + 1 if fn in CHECKS else i
            r = CheckResult(cid, fn.__name__, False, detail=f"error: {exc!r}")
            r.measured["traceback"] = traceback.format_exc()
        # NumericalCheckError inside any check already lands here as a failure
        r.seconds = time.perf_counter() - t0
        results.append(r)
        if echo is not None:
            echo(r.line())
    return results


def report_json(results: list[CheckResult]) -> str:
    doc = {
        "passed": all(r.passed for r in results),
        "checks": [_jsonify(asdict(r)) for r in results],
    }
    return json.dumps(doc, indent=1) + "\n"
