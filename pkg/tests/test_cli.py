import json
from importlib.resources import files
from pathlib import Path

import numpy as np
import pytest

from pspline_ci.cli import load_fit, main, read_xy_csv
from pspline_ci.intervals import read_band_csv

FOSSIL = str(files("pspline_ci") / "data" / "fossil_standin.csv")

CONFIG = """\
# small smoke experiment
target.kind = broken_stick
sampler.n = 101
noise.sigma = 0.1
knots.n_interior = 24
run.seed = 4242
run.replicates = 10
run.methods = theta=1, theta=0.1, iter:5
"""


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def fossil_fit(tmp_path, capsys):
    code, out, err = run(["fit", FOSSIL, "--x", "age", "--y", "strontium.ratio", "--knots", 26, "--out", tmp_path], capsys)
    assert code == 0, err
    return tmp_path


def test_fit_writes_outputs(fossil_fit):
    meta = json.loads((fossil_fit / "fit.json").read_text())
    assert meta["n"] == 106 and len(meta["coefficients"]) == 30
    assert meta["alpha"] > 0 and meta["sigma2"] > 0
    assert (fossil_fit / "fitted.csv").read_text().startswith("x,fitted\n")


def test_load_fit_reproduces_coefficients(fossil_fit):
    res, meta = load_fit(fossil_fit / "fit.json")
    np.testing.assert_allclose(res.beta_hat, meta["coefficients"], rtol=1e-10, atol=1e-14)


def test_band_outputs(fossil_fit, tmp_path, capsys):
    out = tmp_path / "bands"
    code, stdout, err = run(
        ["band", fossil_fit / "fit.json", "--theta", 0, "--theta", 0.1, "--nbc", 5, "--overlay", "iter:5", "--out", out],
        capsys,
    )
    assert code == 0, err
    names = sorted(p.name for p in out.iterdir())
    assert "band_theta-0.1.csv" in names and "band_iter-5.svg" in names and "band_theta-0.json" in names
    cols = read_band_csv((out / "band_theta-0.1.csv").read_text())
    assert np.all(cols["lower"] <= cols["estimate"]) and np.all(cols["estimate"] <= cols["upper"])
    assert len(stdout.splitlines()) == 9


def test_band_rerun_is_byte_identical(fossil_fit, tmp_path, capsys):
    for d in ("a", "b"):
        code, _, _ = run(["band", fossil_fit / "fit.json", "--method", "hodges", "--grid", "uniform:64", "--out", tmp_path / d], capsys)
        assert code == 0
    for name in ("band_hodges.csv", "band_hodges.svg", "band_hodges.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_svg_is_well_formed(fossil_fit, capsys):
    import xml.etree.ElementTree as ET

    code, _, _ = run(["band", fossil_fit / "fit.json", "--theta", 1, "--out", fossil_fit], capsys)
    assert code == 0
    root = ET.parse(fossil_fit / "band_theta-1.svg").getroot()
    assert root.tag.endswith("svg")


def test_fit_with_bands_inline(tmp_path, capsys):
    code, stdout, err = run(
        ["fit", FOSSIL, "--x", "age", "--y", "strontium.ratio", "--knots", 26, "--theta", 0.05, "--out", tmp_path], capsys
    )
    assert code == 0, err
    assert (tmp_path / "band_theta-0.05.csv").exists()


def test_coverage_smoke_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(CONFIG)
    for d, w in (("one", 1), ("two", 2)):
        code, _, err = run(["coverage", cfg, "--out", tmp_path / d, "--workers", w], capsys)
        assert code == 0, err
    one, two = tmp_path / "one", tmp_path / "two"
    csvs = sorted(p.name for p in one.glob("coverage_*.csv"))
    assert csvs == ["coverage_iter-5.csv", "coverage_theta-0.1.csv", "coverage_theta-1.csv"]
    for name in csvs + ["coverage.json", "coverage.svg"]:
        assert (one / name).read_bytes() == (two / name).read_bytes()
    man = json.loads((one / "manifest.json").read_text())
    import hashlib

    assert man["config_sha256"] == hashlib.sha256(CONFIG.encode()).hexdigest()
    assert man["master_seed"] == 4242 and man["replicates"] == 10 and man["workers"] == 1
    assert man["outputs"] == sorted(man["outputs"])
    assert "duration_seconds" in man and "software_version" in man


def test_coverage_seed_override(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(CONFIG.replace("run.replicates = 10", "run.replicates = 3"))
    run(["coverage", cfg, "--out", tmp_path / "a", "--workers", 1], capsys)
    run(["coverage", cfg, "--out", tmp_path / "b", "--workers", 1, "--seed", 1], capsys)
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert (a["master_seed"], b["master_seed"]) == (4242, 1)


def _bad_csv(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    return p


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("age,other\n1,2\n2,3\n3,4\n", "missing column 'strontium.ratio'"),
        ("age,strontium.ratio\n1,2\n2,abc\n3,4\n", "row 3"),
        ("age,strontium.ratio\n1,2\n2\n3,4\n", "row 3"),
        ("age,strontium.ratio\n1,2\n", "at least 3 rows"),
    ],
)
def test_fit_input_errors(tmp_path, capsys, text, fragment):
    code, _, err = run(["fit", _bad_csv(tmp_path, text), "--x", "age", "--y", "strontium.ratio", "--out", tmp_path], capsys)
    assert code == 2
    assert err.startswith("error: ") and fragment in err and err.count("\n") == 1


def test_coverage_config_errors(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("run.replicates = 5\n")
    code, _, err = run(["coverage", cfg, "--out", tmp_path], capsys)
    assert code == 2 and "run.seed" in err
    cfg.write_text("run.seed = 1\nrun.colour = red\n")
    code, _, err = run(["coverage", cfg, "--out", tmp_path], capsys)
    assert code == 2 and "run.colour" in err and "line 2" in err
    cfg.write_text("run.seed = 1\nrun.methods = theta=2\n")
    code, _, err = run(["coverage", cfg, "--out", tmp_path], capsys)
    assert code == 2 and "theta" in err


def test_band_unknown_method(fossil_fit, capsys):
    code, _, err = run(["band", fossil_fit / "fit.json", "--method", "bootstrap", "--out", fossil_fit], capsys)
    assert code == 2 and "unknown interval method" in err


def test_band_needs_a_method(fossil_fit, capsys):
    code, _, err = run(["band", fossil_fit / "fit.json", "--out", fossil_fit], capsys)
    assert code == 2 and "no interval methods" in err


def test_missing_file(tmp_path, capsys):
    code, _, err = run(["fit", tmp_path / "nope.csv", "--x", "a", "--y", "b"], capsys)
    assert code == 2 and err.startswith("error: ")


def test_env_default_out(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PSPLINE_CI_OUT", str(tmp_path / "envout"))
    code, stdout, _ = run(["fit", FOSSIL, "--x", "age", "--y", "strontium.ratio", "--knots", 26], capsys)
    assert code == 0
    assert (tmp_path / "envout" / "fit.json").exists()


def test_read_xy_csv_skips_blank_lines(tmp_path):
    p = _bad_csv(tmp_path, "a,b\n1,2\n\n2,3\n3,5\n")
    d = read_xy_csv(p, "a", "b")
    assert d.n == 3 and d.ys.tolist() == [2.0, 3.0, 5.0]
    assert Path(p).exists()


REPO = Path(__file__).resolve().parent.parent


def test_saturated_fit_warning(tmp_path, capsys):
    p = _bad_csv(tmp_path, "x,y\n0,1\n1,2\n2,3\n")
    code, _, err = run(["fit", p, "--x", "x", "--y", "y", "--knots", 1, "--order", 2, "--out", tmp_path], capsys)
    assert code == 0
    assert "exact interpolating fit" in err
    assert json.loads((tmp_path / "fit.json").read_text())["edf"] == pytest.approx(3.0)


def test_smoke_config_ships(tmp_path, capsys):
    code, stdout, err = run(["coverage", REPO / "configs" / "smoke.cfg", "--out", tmp_path, "--workers", 1], capsys)
    assert code == 0, err
    man = json.loads((tmp_path / "manifest.json").read_text())
    listed = {Path(p).name for p in man["outputs"]}
    assert listed == {p.name for p in tmp_path.iterdir()} - {"manifest.json"}


def test_default_experiment_config(tmp_path, capsys):
    code, _, err = run(["coverage", REPO / "configs" / "broken_stick.cfg", "--out", tmp_path, "--workers", 1], capsys)
    assert code == 0, err
    assert len(list(tmp_path.glob("coverage_*.csv"))) == 4 and (tmp_path / "coverage.svg").exists()
    assert json.loads((tmp_path / "manifest.json").read_text())["duration_seconds"] < 600
