import json
import subprocess
import sys

import numpy as np
import pytest

from medianosc.cli import main
from medianosc.fieldio import load_field


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), (json.loads(err) if err.strip() else None)


@pytest.fixture
def gen(tmp_path, capsys):
    def make(name, *extra, suffix=".field"):
        path = tmp_path / f"{name}{suffix}"
        code, out, _ = run(capsys, "gen", name, "--out", path, *extra)
        assert code == 0
        return path
    return make


def test_median_examples(gen, capsys):
    code, out, _ = run(capsys, "median", gen("two-level-step", "--n", 64), "--s", 0.25)
    assert code == 0 and out["median"] == -2
    assert all(out["holds"].values())
    assert out["defining_counts"]["cells"] == 64
    _, out, _ = run(capsys, "median", gen("constant", "--param", "value=7"), "--s", 0.3)
    assert out["median"] == 7
    _, out, _ = run(capsys, "median", gen("linear", "--n", 1024), "--s", 0.5)
    assert abs(out["median"] - 0.5) <= 1 / 1024


def test_median_region(gen, capsys):
    _, out, _ = run(capsys, "median", gen("two-level-step", "--n", 64), "--s", 0.25, "--region", "32:32")
    assert out["median"] == 1 and out["region"]["measure"] == 0.5


def test_gen_round_trip(gen):
    f = load_field(gen("piecewise", "--dim", 2, "--n", 32, "--seed", 4))
    from medianosc.corpus import CorpusSpec, generate
    assert np.array_equal(f.values, generate(CorpusSpec("piecewise", 2, 32, 4)).values)
    c = load_field(gen("lipschitz", "--n", 16, suffix=".csv"))
    assert np.array_equal(c.values, generate(CorpusSpec("lipschitz", n=16)).values)


def test_pair_counterexample_files(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "pair-counterexample", "--s", 0.75, "--s1", 0.5,
                       "--n", 64, "--out", tmp_path / "pc.field")
    assert code == 0 and len(out["files"]) == 2
    f, g = (load_field(p) for p in out["files"])
    assert f.values.sum() == 15 and g.values.sum() == 31


def test_sharp_out(gen, capsys, tmp_path):
    code, out, _ = run(capsys, "sharp", gen("step", "--n", 32), "--s", 0.25,
                       "--out", tmp_path / "m.field")
    assert code == 0 and out["sup"] == 0.5 and out["family"] == "all"
    assert load_field(tmp_path / "m.field").values.max() == 0.5


def test_decompose_single_and_mask(gen, capsys, tmp_path):
    src = gen("spike-block", "--n", 64)
    code, out, _ = run(capsys, "decompose", src, "--s", 0.25, "--delta", 0.5, "--beta", 1.0,
                       "--mask", tmp_path / "mask.field")
    # the block {31, 32} straddles the midpoint, so two length-2 cubes are taken
    assert code == 0 and out["ok"]
    assert [c["lo"] for c in out["selected"]] == [[30], [32]]
    assert load_field(tmp_path / "mask.field").values.sum() == 4


def test_decompose_two_threshold(gen, capsys):
    code, out, _ = run(capsys, "decompose", gen("step", "--n", 64), "--two-threshold")
    assert code == 0 and out["ok"] and out["packing"] <= 0.25


def test_decompose_errors(gen, capsys):
    src = gen("step", "--n", 64)
    code, _, err = run(capsys, "decompose", src, "--delta", 0.1, "--beta", 1)
    assert code == 3 and err["error"] == "HypothesisViolated"
    code, _, err = run(capsys, "decompose", src, "--s", 0.25)
    assert code == 3
    code, _, _ = run(capsys, "decompose", src, "--delta", 1, "--beta", 1, "--region", "3:8")
    assert code == 3


def test_decompose_violation_exit(gen, capsys):
    # a single-cell spike in 2D at s=1/2 with tiny beta trips the upper bound on a floor cell
    src = gen("spike", "--dim", 2, "--n", 64)
    code, out, _ = run(capsys, "decompose", src, "--s", 0.5, "--delta", 0.01, "--beta", 0.001)
    assert code == 1 and not out["ok"]
    assert out["report"]["condition2_upper_floor_violations"] == 1


def test_oscillation_csv(gen, capsys, tmp_path):
    code, out, _ = run(capsys, "oscillation", gen("step", "--n", 256), "--csv", tmp_path / "o.csv")
    assert code == 0 and out["verdict"] == "DISCONTINUOUS-CONSISTENT"
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert lines[0] == "delta,omega_estimate,modulus,ratio" and len(lines) == 7
    _, out, _ = run(capsys, "oscillation", gen("lipschitz", "--n", 256), "--delta-grid", "0.1,0.05,0.01")
    assert out["verdict"] == "CONTINUOUS-CONSISTENT" and len(out["profile"]) == 3


def test_jn(gen, capsys, tmp_path):
    code, out, _ = run(capsys, "jn", gen("log-singularity", "--n", 4096), "--phi", "const",
                       "--csv", tmp_path / "t.csv")
    assert code == 0 and out["fit"]["slope"] < 0
    assert out["fit"]["c2_reference"] == pytest.approx(np.log(2) / 28)


def test_vmo(gen, capsys):
    code, out, _ = run(capsys, "vmo", gen("constant", "--n", 64))
    assert code == 0 and all(r["phi_s"] == 0 for r in out["modulus"])
    _, out, _ = run(capsys, "vmo", gen("step", "--n", 256), "--phi", "const")
    assert out["norm"]["norm"] == 0.5 and out["embedding"]["empirical_constant"] == 0.5


@pytest.mark.parametrize("suite", ["median-rules", "prop11"])
def test_propcheck_median_rules(capsys, suite):
    code, out, _ = run(capsys, "propcheck", "--suite", suite, "--cases", 50)
    assert code == 0 and out["ok"] and out["suites"][0]["cases"] == 8 * 50


def test_propcheck_reports_violation_exit(capsys):
    code, out, _ = run(capsys, "propcheck", "--suite", "decomposition")
    assert code == (0 if out["ok"] else 1)


@pytest.mark.parametrize("argv,code", [
    (["median", "/nonexistent/field"], 2),
    (["median", "IN", "--s", "1.5"], 3),
    (["median", "IN", "--region", "zz"], 3),
    (["gen", "nope", "--out", "x"], 3),
    (["vmo", "IN", "--phi", "sin"], 3),
    (["jn", "IN", "--lambda-grid", "1,0"], 3),
    (["bogus"], 3),
])
def test_exit_codes(gen, capsys, argv, code):
    src = str(gen("step", "--n", 16))
    got, _, err = run(capsys, *[src if a == "IN" else a for a in argv])
    assert got == code and err["exit_code"] == code


def test_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.field"
    bad.write_bytes(b"garbage")
    code, _, err = run(capsys, "median", bad)
    assert code == 2 and err["error"] == "FieldFormatError"


def test_reproducible_bytes(tmp_path):
    def once(tag):
        out = tmp_path / f"r{tag}.field"
        cmd = [sys.executable, "-m", "medianosc"]
        subprocess.run(cmd + ["gen", "piecewise", "--n", "64", "--seed", "9", "--out", str(out)],
                       check=True, capture_output=True)
        res = subprocess.run(cmd + ["vmo", str(out), "--phi", "power:0.5",
                                    "--csv", str(tmp_path / f"v{tag}.csv")],
                             check=True, capture_output=True)
        return out.read_bytes(), res.stdout, (tmp_path / f"v{tag}.csv").read_bytes()

    assert once("a") == once("b")
