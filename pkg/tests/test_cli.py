import io
import json
import subprocess
import sys

import pytest

from vibron2d import cli


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def data_rows(text):
    return [l for l in text.splitlines() if l and not l.startswith("#")][1:]


@pytest.mark.parametrize(
    "text, cast, expected",
    [
        ("0.1", float, [0.1]),
        ("0:0.3:0.1", float, [0.0, 0.1, 0.2, 0.3]),
        ("0.1,0.2:0.3:0.05", float, [0.1, 0.2, 0.25, 0.3]),
        ("0:4", int, [0, 1, 2, 3, 4]),
        ("100,200", int, [100, 200]),
        ("-0.6", float, [-0.6]),
    ],
)
def test_parse_grid(text, cast, expected):
    assert cli.parse_grid(text, cast) == expected


def test_parse_grid_inclusive_long_range():
    xs = cli.parse_grid("0:1:0.01")
    assert len(xs) == 101 and xs[30] == 0.3 and xs[-1] == 1.0


@pytest.mark.parametrize("bad", ["", "a", "0:1", "1:0:0.1", "0:1:0", "0:1:-0.1"])
def test_parse_grid_errors(bad):
    with pytest.raises(cli.UsageError):
        cli.parse_grid(bad)


def test_spectrum_stdout():
    code, out, _ = run("spectrum", "--N", "2", "--xi", "1", "--alpha", "0", "--ell", "0")
    assert code == 0
    rows = data_rows(out)
    assert [float(r.split(",")[5]) for r in rows] == pytest.approx([0.0, 6.0], abs=1e-12)


def test_correlation_row_count():
    code, out, _ = run("correlation", "--N", "10", "--xi", "0:1:0.1")
    assert code == 0
    # 11 xi values x (dim l=0 + dim l=1) = 11 x (6 + 5)
    assert len(data_rows(out)) == 11 * 11


def test_json_and_out_dir(tmp_path):
    code, out, _ = run("separatrix", "--xi", "0.1,0.3", "--format", "json", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "separatrix.json").read_text())
    assert len(doc["records"]) == 2


def test_plot_script(tmp_path):
    code, out, _ = run("gamma", "--N", "20", "--xi", "0.3", "--out", str(tmp_path), "--plot-script")
    assert code == 0
    script = (tmp_path / "plot.gp").read_text()
    assert "gamma.csv" in script and "degeneracy.csv" in script


def test_plot_script_requires_out_and_csv(tmp_path):
    assert run("separatrix", "--plot-script")[0] == 2
    assert run("separatrix", "--plot-script", "--format", "json", "--out", str(tmp_path))[0] == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nN = 6\nxi = 0.3\nalpha = -0.6\nell = 0,1\nformat = json\n")
    code, out, _ = run("spectrum", "--config", str(cfg))
    assert code == 0
    doc = json.loads(out)
    assert {r["N"] for r in doc["records"]} == {6}
    code, out, _ = run("spectrum", "--config", str(cfg), "--N", "8", "--format", "csv")
    assert code == 0 and out.startswith("# dataset: spectrum")
    assert {r.split(",")[0] for r in data_rows(out)} == {"8"}


def test_config_file_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run("spectrum", "--config", str(cfg))[0] == 2
    assert run("spectrum", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_jobs_flag_same_bytes():
    a = run("qfs", "--N", "30", "--xi", "0.1,0.3", "--ell", "0:2", "--jobs", "1")[1]
    b = run("qfs", "--N", "30", "--xi", "0.1,0.3", "--ell", "0:2", "--jobs", "3")[1]
    assert a == b


def test_usage_and_domain_errors():
    assert run("figure", "fig9")[0] == 2
    assert run("spectrum", "--xi", "1.5")[0] == 2
    assert run("spectrum", "--N", "4", "--ell", "7")[0] == 2
    assert run("spectrum", "--jobs", "0")[0] == 2
    assert run("nosuch")[0] == 2
    code, _, err = run("figure", "fig9")
    assert "functional" in err


def test_figure_with_overrides():
    code, out, _ = run("figure", "gamma", "--N", "20", "--xi", "0.15")
    assert code == 0
    assert out.startswith("# dataset: gamma")


def test_dos_estimator_flag():
    code, out, _ = run("dos", "--N", "100", "--estimator", "spacing")
    assert code == 0 and out.startswith("# dataset: dos_spacing")


def test_vectors_flag():
    code, out, _ = run("spectrum", "--N", "4", "--xi", "0.3", "--ell", "0", "--vectors")
    assert code == 0 and "# dataset: eigenvectors" in out


def test_verify_subset(tmp_path):
    code, out, _ = run("verify", "--check", "so3_limit", "--check", "3", "--out", str(tmp_path))
    assert code == 0
    assert out.count("[PASS]") == 2
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] and len(report["checks"]) == 2


def test_verify_unknown_check():
    assert run("verify", "--check", "nonsense")[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "vibron2d", "separatrix", "--xi", "0.3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "separatrix" in res.stdout
