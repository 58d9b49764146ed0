"""Command-line front end.

    vibron2d correlation --N 100 --xi 0:1:0.01 --alpha -0.6 --out data/
    vibron2d figure dos --jobs 4 --out data/ --plot-script
    vibron2d verify --out data/

Grid flags take a single value, a comma list, or an inclusive ``a:b:step``
range (ranges and lists may be mixed: ``0.1,0.2:0.3:0.05``).  A ``--config``
file holds ``key = value`` lines using the flag names without dashes; flags
given on the command line win.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage or
domain errors.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__, sweep, verify
from .diagnostics import CRITICAL_WINDOW, DEGENERACY_THRESHOLD, DOS_BIN_WIDTH
from .errors import DomainError, VibronError
from .meanfield import RegimeWarning
from .spectral import GroundReferenceWarning

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# keys accepted in a config file, mapped to argparse dests
CONFIG_KEYS = {
    "N": "N",
    "xi": "xi",
    "alpha": "alpha",
    "ell": "ell",
    "vectors": "vectors",
    "bin-width": "bin_width",
    "window": "window",
    "threshold": "threshold",
    "format": "format",
    "out": "out",
    "jobs": "jobs",
    "plot-script": "plot_script",
    "estimator": "estimator",
}

# per-command grid defaults; anything missing falls back to RunConfig()
COMMAND_DEFAULTS = {
    "correlation": dict(N="100", xi="0:1:0.01", alpha="-0.6", ell="0,1"),
    "spectrum": dict(N="100", xi="0.16", alpha="-0.6", ell="0"),
    "separatrix": dict(xi="0:1:0.01", alpha="-0.6"),
    "dos": dict(N="1024", xi="0.15", alpha="-0.6", ell="0"),
    "pr": dict(N="1000", xi="0.16", alpha="-0.6", ell="0"),
    "qfs": dict(N="100", xi="0.16", alpha="-0.6", ell="0:4"),
    "gamma": dict(N="100", xi="0.4", alpha="-0.6", ell="0"),
}


class UsageError(Exception):
    pass


def _range(text: str, cast):
    parts = text.split(":")
    if len(parts) == 2 and cast is int:
        parts.append("1")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must look like a:b:step")
    try:
        a, b, step = (Decimal(p) for p in parts)
    except InvalidOperation:
        raise UsageError(f"bad range {text!r}") from None
    if step <= 0:
        raise UsageError(f"range step must be positive in {text!r}")
    if b < a:
        raise UsageError(f"range end below start in {text!r}")
    # decimal arithmetic keeps 0:1:0.01 free of 0.30000000000000004
    count = int((b - a) / step) + 1
    vals = [a + k * step for k in range(count)]
    return [cast(v) for v in vals]


def parse_grid(text, cast=float) -> list:
    """'0.1', '0.1,0.2', '0:1:0.01' or a mix, endpoints inclusive."""
    if isinstance(text, (list, tuple)):
        return [cast(v) for v in text]
    out = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" in tok:
            out.extend(_range(tok, cast))
        else:
            try:
                out.append(cast(Decimal(tok)) if cast is float else cast(tok))
            except (ValueError, InvalidOperation):
                raise UsageError(f"cannot parse {tok!r} as {cast.__name__}") from None
    if not out:
        raise UsageError(f"empty grid {text!r}")
    return out


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


def read_config(path) -> dict:
    """Parse a key = value file; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[CONFIG_KEYS[key]] = val
    return out


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("grid")
    g.add_argument("--N", help="boson number(s), e.g. 100 or 50,100,1000")
    g.add_argument("--xi", help="control parameter: value, list or a:b:step")
    g.add_argument("--alpha", help="anharmonicity: value, list or a:b:step")
    g.add_argument("--ell", help="vibrational angular momenta, e.g. 0,1 or 0:4")
    o = p.add_argument_group("options")
    o.add_argument("--vectors", action="store_const", const=True, default=None,
                   help="also emit eigenvector components (spectrum)")
    o.add_argument("--bin-width", dest="bin_width", help=f"DOS bin width (default {DOS_BIN_WIDTH})")
    o.add_argument("--window", help=f"critical-state search window (default {CRITICAL_WINDOW})")
    o.add_argument("--threshold", help=f"relative degeneracy threshold (default {DEGENERACY_THRESHOLD})")
    o.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    o.add_argument("--out", help="output directory; tables go to stdout when omitted")
    o.add_argument("--jobs", help="worker threads over grid points (default 1)")
    o.add_argument("--plot-script", dest="plot_script", action="store_const", const=True, default=None,
                   help="write a gnuplot script next to the CSV files")
    o.add_argument("--config", help="key = value file mirroring the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibron2d",
        description="Spectra, separatrices and ESQPT diagnostics of the anharmonic 2D vibron model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    helps = {
        "correlation": "normalized excitation energies across a xi grid with f1/f2 overlays",
        "spectrum": "raw and normalized energies per (N, xi, alpha, l)",
        "dos": "density of states per l block",
        "pr": "normalized participation ratios and critical-state wave functions",
        "qfs": "quantum fidelity susceptibility of every state",
        "gamma": "quasilinearity parameter and l/l+1 degeneracy map",
        "separatrix": "closed-form mean-field quantities over a (xi, alpha) grid",
    }
    for name, h in helps.items():
        p = sub.add_parser(name, help=h, description=h)
        _common(p)
        if name == "dos":
            p.add_argument("--estimator", choices=("histogram", "spacing"),
                           help="histogram (default) or inverse level spacing")

    p = sub.add_parser("figure", help="regenerate the tables behind one figure")
    p.add_argument("fig_id", help=f"one of: {', '.join(sweep.FIGURES)}")
    _common(p)

    p = sub.add_parser("verify", help="run the acceptance checks and write a JSON report")
    p.add_argument("--check", action="append", default=None,
                   help="run only this check (name or number); repeatable")
    _common(p)
    return parser


def _settings(args) -> dict:
    """Merge command defaults < config file < flags; record which keys were set."""
    merged = dict(COMMAND_DEFAULTS.get(args.command, {}))
    given = set()
    if args.config:
        cfg = read_config(args.config)
        merged.update(cfg)
        given |= set(cfg)
    for dest in CONFIG_KEYS.values():
        val = getattr(args, dest, None)
        if val is not None:
            merged[dest] = val
            given.add(dest)
    merged["_given"] = given
    return merged


def _number(text, cast, name):
    try:
        return cast(text)
    except (TypeError, ValueError):
        raise UsageError(f"--{name} expects a {cast.__name__}, got {text!r}") from None


def make_config(s: dict) -> sweep.RunConfig:
    cfg = sweep.RunConfig()
    if "N" in s:
        cfg.N = parse_grid(s["N"], int)
    if "xi" in s:
        cfg.xi = parse_grid(s["xi"], float)
    if "alpha" in s:
        cfg.alpha = parse_grid(s["alpha"], float)
    if "ell" in s:
        cfg.ells = parse_grid(s["ell"], int)
    cfg.vectors = _bool(s.get("vectors", False))
    if "bin_width" in s:
        cfg.dos_bin_width = _number(s["bin_width"], float, "bin-width")
    if "window" in s:
        cfg.critical_window = _number(s["window"], float, "window")
    if "threshold" in s:
        cfg.degeneracy_threshold = _number(s["threshold"], float, "threshold")
    cfg.jobs = _number(s.get("jobs", 1), int, "jobs")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    rename = {"ell": "ells"}
    cfg.overrides = frozenset(rename.get(k, k) for k in s["_given"])
    return cfg


def _datasets(command: str, s: dict, cfg: sweep.RunConfig, fig_id=None) -> list:
    if command == "figure":
        return sweep.run_figure(fig_id, cfg)
    if command == "correlation":
        return [sweep.run_correlation_diagram(cfg)]
    if command == "spectrum":
        out = [sweep.run_spectrum(cfg)]
        if cfg.vectors:
            out.append(sweep.run_eigenvectors(cfg))
        return out
    if command == "separatrix":
        return [sweep.run_separatrix(cfg)]
    if command == "dos":
        return [sweep.run_dos(cfg, s.get("estimator") or "histogram")]
    if command == "pr":
        return sweep.run_pr(cfg)
    if command == "qfs":
        return [sweep.run_qfs(cfg)]
    if command == "gamma":
        return [sweep.run_gamma(cfg), sweep.run_degeneracy(cfg)]
    raise UsageError(f"unknown command {command!r}")


def emit(datasets, fmt: str, out, plot: bool, stdout) -> None:
    if plot and fmt != "csv":
        raise UsageError("--plot-script needs CSV output")
    if plot and not out:
        raise UsageError("--plot-script needs --out")
    if out:
        paths = [ds.write(out, fmt) for ds in datasets]
        for p in paths:
            print(p, file=stdout)
        if plot:
            script = Path(out) / "plot.gp"
            script.write_text(sweep.plot_script(paths, datasets))
            print(script, file=stdout)
        return
    for ds in datasets:
        stdout.write(ds.to_csv() if fmt == "csv" else ds.to_json())


def _select_checks(names):
    if not names:
        return None
    chosen = []
    for name in names:
        for i, fn in enumerate(verify.CHECKS, start=1):
            if name in (str(i), fn.__name__, fn.__name__.removeprefix("check_")):
                chosen.append(fn)
                break
        else:
            valid = ", ".join(fn.__name__.removeprefix("check_") for fn in verify.CHECKS)
            raise UsageError(f"unknown check {name!r}; choose from {valid}")
    return chosen


def run_verify(args, s, stdout) -> int:
    checks = _select_checks(args.check)
    results = verify.run_all(checks, echo=lambda line: print(line, file=stdout, flush=True))
    report = verify.report_json(results)
    if s.get("out"):
        path = Path(s["out"])
        path.mkdir(parents=True, exist_ok=True)
        (path / "verify.json").write_text(report)
        print(path / "verify.json", file=stdout)
    else:
        stdout.write(report)
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed", file=stdout)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; keep --help at 0
        return int(exc.code or 0)

    try:
        s = _settings(args)
        if args.command == "verify":
            return run_verify(args, s, stdout)
        cfg = make_config(s)
        fmt = s.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise UsageError(f"unknown format {fmt!r}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GroundReferenceWarning)
            warnings.simplefilter("ignore", RegimeWarning)
            datasets = _datasets(args.command, s, cfg, getattr(args, "fig_id", None))
        emit(datasets, fmt, s.get("out"), _bool(s.get("plot_script", False)), stdout)
    except (UsageError, DomainError) as exc:
        print(f"vibron2d: error: {exc}", file=stderr)
        return EXIT_USAGE
    except VibronError as exc:
        print(f"vibron2d: numerical failure: {exc}", file=stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
