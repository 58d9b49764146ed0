"""Parameter sweeps and figure datasets.

A :class:`Dataset` is a tidy table with a provenance header.  Rows are emitted
in a fixed order (outer grid axes, then xi, then l, then ordinal) and floats are
written with 17 significant digits, so identical configurations give
byte-identical files regardless of the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import ModelParams, block_basis
from .diagnostics import (
    CRITICAL_WINDOW,
    DEGENERACY_THRESHOLD,
    DOS_BIN_WIDTH,
    critical_state,
    degeneracy_map,
    density_of_states,
    effective_frequency,
    expectation_n,
    participation_ratio,
    qfs,
    quasilinearity,
)
from .errors import DomainError
from .meanfield import (
    RegimeWarning,
    alpha_threshold,
    energy_functional,
    mean_field_report,
)
from .spectral import GroundReferenceWarning, full_spectrum

FIGURES = ("functional", "dos", "obs", "pr", "qfs", "gamma")


@dataclass
class RunConfig:
    """Everything a sweep needs; grids are plain lists."""

    N: list[int] = field(default_factory=lambda: [100])
    xi: list[float] = field(default_factory=lambda: [0.16])
    alpha: list[float] = field(default_factory=lambda: [-0.6])
    ells: list[int] = field(default_factory=lambda: [0, 1])
    vectors: bool = False
    dos_bin_width: float = DOS_BIN_WIDTH
    degeneracy_threshold: float = DEGENERACY_THRESHOLD
    critical_window: float = CRITICAL_WINDOW
    jobs: int = 1
    overrides: frozenset = frozenset()

    def validate(self) -> None:
        for name in ("N", "xi", "alpha", "ells"):
            if not getattr(self, name):
                raise DomainError(f"grid {name!r} is empty")
        for N in self.N:
            for l in self.ells:
                if abs(l) > N:
                    raise DomainError(f"l={l} is invalid for N={N}")
        for x in self.xi:
            if not 0.0 <= x <= 1.0:
                raise DomainError(f"xi={x} outside [0, 1]")
        if self.dos_bin_width <= 0:
            raise DomainError("bin width must be positive")

    def given(self, name: str) -> bool:
        return name in self.overrides

    def provenance(self) -> dict:
        return {
            "N": self.N,
            "xi": self.xi,
            "alpha": self.alpha,
            "ell": self.ells,
            "dos_bin_width": self.dos_bin_width,
            "degeneracy_threshold": self.degeneracy_threshold,
            "critical_window": self.critical_window,
            "version": __version__,
        }


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else None
    return v


@dataclass
class Dataset:
    name: str
    columns: list[str]
    rows: list[tuple]
    header: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# dataset: {self.name}\n")
        for k in sorted(self.header):
            buf.write(f"# {k}: {json.dumps(self.header[k], sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "dataset": self.name,
            "header": self.header,
            "columns": self.columns,
            "records": [
                {c: _jsonable(v) for c, v in zip(self.columns, r)} for r in self.rows
            ],
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"

    def write(self, out_dir, fmt: str = "csv") -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt not in ("csv", "json"):
            raise DomainError(f"unknown output format {fmt!r}")
        path = out_dir / f"{self.name}.{fmt}"
        path.write_text(self.to_csv() if fmt == "csv" else self.to_json())
        return path


def _pmap(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _separatrices(xi, alpha):
    rep = mean_field_report(xi, alpha)
    return rep.f1, rep.f2


def _header(config, **extra):
    h = config.provenance()
    h.update(extra)
    return h


def run_spectrum(config: RunConfig) -> Dataset:
    """Raw and normalized energies for every grid point and requested l."""
    config.validate()
    points = [(N, a, x) for N in config.N for a in config.alpha for x in config.xi]

    def work(pt):
        N, a, x = pt
        blocks = full_spectrum(ModelParams(N, x, a), config.ells)
        rows = []
        for l in config.ells:
            b = blocks[l]
            for k, (e, en) in enumerate(zip(b.energies, b.normalized)):
                rows.append((N, x, a, l, k, e, en))
        return rows

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    return Dataset(
        "spectrum",
        ["N", "xi", "alpha", "ell", "ordinal", "energy", "norm_energy"],
        rows,
        _header(config),
    )


def run_eigenvectors(config: RunConfig) -> Dataset:
    """Sign-fixed eigenvector components C_n for every state (long format)."""
    config.validate()
    points = [(N, a, x) for N in config.N for a in config.alpha for x in config.xi]

    def work(pt):
        N, a, x = pt
        blocks = full_spectrum(ModelParams(N, x, a), config.ells, want_vectors=True)
        rows = []
        for l in config.ells:
            b = blocks[l]
            for k in range(b.dim):
                for n, c in zip(b.basis.n_values, b.vectors[:, k]):
                    rows.append((N, x, a, l, k, int(n), c))
        return rows

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    return Dataset(
        "eigenvectors",
        ["N", "xi", "alpha", "ell", "ordinal", "n", "coefficient"],
        rows,
        _header(config),
    )


def run_correlation_diagram(config: RunConfig) -> Dataset:
    """Normalized excitation energies across a xi grid with separatrix overlays."""
    config.validate()
    if len(config.xi) < 2:
        raise DomainError("the correlation diagram needs at least two xi values")
    points = [(N, a, x) for N in config.N for a in config.alpha for x in config.xi]

    def work(pt):
        N, a, x = pt
        blocks = full_spectrum(ModelParams(N, x, a), config.ells)
        f1, f2 = _separatrices(x, a)
        rows = []
        for l in config.ells:
            for k, en in enumerate(blocks[l].normalized):
                rows.append((N, a, x, l, k, en, f1, f2))
        return rows

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    return Dataset(
        "correlation",
        ["N", "alpha", "xi", "ell", "ordinal", "norm_energy", "f1", "f2"],
        rows,
        _header(config),
    )


def run_separatrix(config: RunConfig) -> Dataset:
    rows = []
    for a in config.alpha:
        for x in config.xi:
            r = mean_field_report(x, a)
            rows.append((a, x, r.phase, r.alpha_threshold, r.r_min, r.f1, r.f2, r.crossing_xi))
    return Dataset(
        "separatrix",
        ["alpha", "xi", "phase", "alpha_threshold", "r_min", "f1", "f2", "crossing_xi"],
        rows,
        _header(config),
    )


def run_dos(config: RunConfig, estimator: str = "histogram") -> Dataset:
    config.validate()
    points = [(N, a, x, l) for N in config.N for a in config.alpha for x in config.xi for l in config.ells]

    def work(pt):
        N, a, x, l = pt
        p = ModelParams(N, x, a)
        b = full_spectrum(p, sorted({0, l}))[l]
        s = density_of_states(b, config.dos_bin_width, estimator)
        return [(N, a, x, l, c, d) for c, d in zip(s.energies, s.values)]

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    name = "dos" if estimator == "histogram" else "dos_spacing"
    return Dataset(
        name,
        ["N", "alpha", "xi", "ell", "bin_center" if estimator == "histogram" else "energy", "density"],
        rows,
        _header(config, estimator=estimator),
    )


def _targets(x, a):
    f1, f2 = _separatrices(x, a)
    out = []
    if f1 is not None:
        out.append(("f1", f1))
    if f2 is not None:
        out.append(("f2", f2))
    return out


def run_pr(config: RunConfig) -> list[Dataset]:
    """Normalized PR per state plus wave functions of the critical states."""
    config.validate()
    points = [(N, a, x, l) for N in config.N for a in config.alpha for x in config.xi for l in config.ells]

    def work(pt):
        N, a, x, l = pt
        p = ModelParams(N, x, a)
        b = full_spectrum(p, sorted({0, l}), want_vectors=True)[l]
        s = participation_ratio(b)
        pr_rows = [(N, a, x, l, k, e, v) for e, v, k in s.points]
        wf_rows = []
        for name, t in _targets(x, a):
            try:
                rep = critical_state(s, b, t, config.critical_window, name)
            except DomainError:
                continue
            w = b.vectors[:, rep.ordinal] ** 2
            for n, c2 in zip(b.basis.n_values, w):
                wf_rows.append((N, a, x, l, name, t, rep.ordinal, rep.energy, n / N, c2))
        return pr_rows, wf_rows

    res = _pmap(work, points, config.jobs)
    pr = Dataset(
        "pr",
        ["N", "alpha", "xi", "ell", "ordinal", "norm_energy", "pr_normalized"],
        [r for chunk, _ in res for r in chunk],
        _header(config),
    )
    wf = Dataset(
        "pr_wavefunctions",
        ["N", "alpha", "xi", "ell", "separatrix", "target", "ordinal", "norm_energy", "n_over_N", "weight"],
        [r for _, chunk in res for r in chunk],
        _header(config),
    )
    return [pr, wf]


def run_qfs(config: RunConfig) -> Dataset:
    config.validate()
    points = [(N, a, x) for N in config.N for a in config.alpha for x in config.xi]

    def work(pt):
        N, a, x = pt
        p = ModelParams(N, x, a)
        blocks = full_spectrum(p, sorted({0, *config.ells}), want_vectors=True)
        g = blocks[0].ground_ref
        rows = []
        for l in config.ells:
            s = qfs(p, l, ground_ref=g, block=blocks[l])
            rows.extend((N, a, x, l, k, e, v) for e, v, k in s.points)
        return rows

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    return Dataset(
        "qfs",
        ["N", "alpha", "xi", "ell", "ordinal", "norm_energy", "chi_F"],
        rows,
        _header(config),
    )


def run_gamma(config: RunConfig) -> Dataset:
    config.validate()
    points = [(N, a, x) for N in config.N for a in config.alpha for x in config.xi]

    def work(pt):
        N, a, x = pt
        p = ModelParams(N, x, a)
        ells = sorted({0} | {l for l in config.ells if l < N} | {l + 1 for l in config.ells if l < N})
        blocks = full_spectrum(p, ells)
        rows = []
        for l in config.ells:
            if l + 1 > N:
                continue
            s = quasilinearity(blocks[l], blocks[l + 1])
            for e, v, k, ok in zip(s.energies, s.values, s.ordinals, s.valid):
                rows.append((N, a, x, l, int(k), e, v, bool(ok)))
        return rows

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    return Dataset(
        "gamma",
        ["N", "alpha", "xi", "ell", "ordinal", "norm_energy", "gamma", "valid"],
        rows,
        _header(config),
    )


def run_degeneracy(config: RunConfig) -> Dataset:
    """Level pairing between blocks l and l + 1 (see :func:`degeneracy_map`)."""
    config.validate()
    points = [(N, a, x) for N in config.N for a in config.alpha for x in config.xi]

    def work(pt):
        N, a, x = pt
        p = ModelParams(N, x, a)
        ells = [l for l in config.ells if l + 1 <= N]
        blocks = full_spectrum(p, sorted({0} | set(ells) | {l + 1 for l in ells}))
        rows = []
        for l in ells:
            for d in degeneracy_map(blocks[l], blocks[l + 1], config.degeneracy_threshold):
                rows.append((N, a, x, l, d.ordinal, d.energy, d.partner_ordinal, d.gap, d.relative_gap, d.degenerate))
        return rows

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    return Dataset(
        "degeneracy",
        ["N", "alpha", "xi", "ell", "ordinal", "norm_energy", "partner_ordinal", "gap", "relative_gap", "degenerate"],
        rows,
        _header(config),
    )


def run_obs(config: RunConfig) -> Dataset:
    """Effective frequency and <n>/N per state."""
    config.validate()
    points = [(N, a, x, l) for N in config.N for a in config.alpha for x in config.xi for l in config.ells]

    def work(pt):
        N, a, x, l = pt
        b = full_spectrum(ModelParams(N, x, a), sorted({0, l}), want_vectors=True)[l]
        rows = [(N, a, x, l, "omega_eff", k, e, v) for e, v, k in effective_frequency(b).points]
        rows += [(N, a, x, l, "expect_n", k, e, v) for e, v, k in expectation_n(b).points]
        return rows

    rows = [r for chunk in _pmap(work, points, config.jobs) for r in chunk]
    return Dataset(
        "obs",
        ["N", "alpha", "xi", "ell", "quantity", "ordinal", "norm_energy", "value"],
        rows,
        _header(config),
    )


def run_functional(config: RunConfig, r_max: float = 5.0, r_points: int = 501) -> Dataset:
    """Energy functional curves E(r) on a grid of (xi, alpha)."""
    r = np.linspace(0.0, r_max, r_points)
    rows = []
    for a in config.alpha:
        for x in config.xi:
            for ri, ei in zip(r, energy_functional(r, x, a)):
                rows.append((x, a, ri, ei))
    return Dataset("functional", ["xi", "alpha", "r", "energy"], rows, _header(config))


# figure defaults, as used in the published panels
FIGURE_DEFAULTS = {
    "functional": dict(N=[100], xi=[0.1], alpha=None, ells=[0]),
    "dos": dict(N=[1024, 2048, 4096], xi=[0.15, 0.3, 0.4, 0.5], alpha=[-0.6], ells=[0]),
    "obs": dict(N=[50, 100, 1000], xi=[0.16], alpha=[-0.5, -0.6, -0.7], ells=[0, 1, 2, 3, 4]),
    "pr": dict(N=[1000], xi=[0.16, 0.3], alpha=[-0.6], ells=[0]),
    "qfs": dict(N=[100], xi=[0.16, 0.3], alpha=[-0.6], ells=[0, 1, 2, 3, 4]),
    "gamma": dict(N=[100], xi=[0.15, 0.2, 0.3, 0.4, 0.5], alpha=[-0.6], ells=[0]),
}


def _figure_config(fig_id: str, config: RunConfig) -> RunConfig:
    d = FIGURE_DEFAULTS[fig_id]
    cfg = RunConfig(**{k: getattr(config, k) for k in config.__dataclass_fields__})
    for key in ("N", "xi", "alpha", "ells"):
        if not config.given(key) and d.get(key) is not None:
            setattr(cfg, key, list(d[key]))
    if fig_id == "functional" and not config.given("alpha"):
        at = alpha_threshold(cfg.xi[0])
        cfg.alpha = [0.0, 0.5 * at, at, 1.5 * at]
    return cfg


def run_figure(fig_id: str, config: RunConfig) -> list[Dataset]:
    """Tables behind one figure; unset grid axes fall back to the figure defaults."""
    if fig_id not in FIGURES:
        raise DomainError(f"unknown figure id {fig_id!r}; choose from {', '.join(FIGURES)}")
    cfg = _figure_config(fig_id, config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        warnings.simplefilter("ignore", GroundReferenceWarning)
        if fig_id == "functional":
            return [run_functional(cfg)]
        if fig_id == "dos":
            return [run_dos(cfg), run_dos(cfg, "spacing")]
        if fig_id == "obs":
            return [run_obs(cfg)]
        if fig_id == "pr":
            return run_pr(cfg)
        if fig_id == "qfs":
            return [run_qfs(cfg)]
        return [run_gamma(cfg)]


_PLOT_X = {
    "spectrum": ("xi", "norm_energy"),
    "correlation": ("xi", "norm_energy"),
    "separatrix": ("xi", "f2"),
    "dos": ("bin_center", "density"),
    "dos_spacing": ("energy", "density"),
    "pr": ("norm_energy", "pr_normalized"),
    "pr_wavefunctions": ("n_over_N", "weight"),
    "qfs": ("norm_energy", "chi_F"),
    "gamma": ("norm_energy", "gamma"),
    "degeneracy": ("norm_energy", "relative_gap"),
    "obs": ("norm_energy", "value"),
    "functional": ("r", "energy"),
    "eigenvectors": ("n", "coefficient"),
}


def plot_script(paths: list[Path], datasets: list[Dataset]) -> str:
    """Plain gnuplot script with one plot per CSV table."""
    lines = ["# gnuplot script", "set datafile separator ','", "set key off", ""]
    for path, ds in zip(paths, datasets):
        x, y = _PLOT_X.get(ds.name, (ds.columns[0], ds.columns[-1]))
        xi, yi = ds.columns.index(x) + 1, ds.columns.index(y) + 1
        lines += [
            f"set title '{ds.name}'",
            f"set xlabel '{x}'",
            f"set ylabel '{y}'",
            f"plot '{path.name}' every ::1 using {xi}:{yi} with points pt 7 ps 0.3",
            "pause -1",
            "",
        ]
    return "\n".join(lines)
