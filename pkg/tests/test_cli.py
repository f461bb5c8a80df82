import json
import math
import subprocess
import sys

import numpy as np
import pytest

from slicehardy.blaschke import blaschke_factor
from slicehardy.cli import run
from slicehardy.io import series_to_json
from slicehardy.quaternion import Quaternion
from slicehardy.series import RegularSeries, star_inverse


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def series_file(tmp_path, f, name="f.json"):
    return write(tmp_path, name, series_to_json(f))


def run_json(args, tmp_path):
    out = tmp_path / "out.json"
    code = run(args + ["--output", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_eval(tmp_path):
    src = series_file(tmp_path, RegularSeries(np.array([[2.0, 1, 0, 0], [0, 0, 0, 0], [1.0, 0, 0, 0]])))
    code, doc = run_json(["eval", "--input", src, "--point", "0,1,0,0", "--point", "0,0,0,0"], tmp_path)
    assert code == 0
    assert doc["values"][0]["value"] == pytest.approx([1.0, 1.0, 0.0, 0.0])
    assert doc["values"][1]["value"] == pytest.approx([2.0, 1.0, 0.0, 0.0])
    assert doc["config"]["command"] == "eval"
    assert doc["config"]["point"] == [[0, 1, 0, 0], [0, 0, 0, 0]]


def test_eval_q_squared_at_i(tmp_path):
    src = series_file(tmp_path, RegularSeries.monomial(2))
    code, doc = run_json(["eval", "--input", src, "--point", "0,1,0,0"], tmp_path)
    assert code == 0 and doc["values"][0]["value"] == pytest.approx([-1, 0, 0, 0])


def test_malformed_coeffs_exit_2(tmp_path, capsys):
    src = write(tmp_path, "bad.json", {"degree": 1, "coeffs": [[1, 0, 0, 0], [1, 0]]})
    assert run(["eval", "--input", src, "--point", "0,0,0,0"]) == 2
    assert "coeffs[1]" in capsys.readouterr().err


def test_missing_input_and_point(tmp_path):
    assert run(["eval", "--point", "0,0,0,0"]) == 2
    src = series_file(tmp_path, RegularSeries.monomial(2))
    assert run(["eval", "--input", src]) == 2


def test_norm_two(tmp_path, rng):
    f = RegularSeries(rng.standard_normal((6, 4)))
    code, doc = run_json(["norm", "--input", series_file(tmp_path, f), "--p", "2"], tmp_path)
    assert code == 0
    est = doc["estimate"]
    assert est["value"] == pytest.approx(f.l2_norm(), rel=1e-8)
    for key in ("r_used", "achieved_unit", "truncation_error_bound", "divergent"):
        assert key in est
    assert doc["config"]["p"] == 2.0


def test_norm_inf_of_blaschke_factor(tmp_path):
    src = series_file(tmp_path, blaschke_factor(Quaternion(0.5)))
    code, doc = run_json(["norm", "--input", src, "--p", "inf"], tmp_path)
    assert code == 0
    assert doc["estimate"]["p"] == "inf"
    assert doc["estimate"]["value"] == pytest.approx(1.0, abs=1e-6)


def test_norm_divergence_flag(tmp_path):
    src = series_file(tmp_path, star_inverse(RegularSeries.from_real([1.0, -1.0]), 1024))
    code, doc = run_json(["norm", "--input", src, "--p", "2", "--unit", "0,1,0,0"], tmp_path)
    assert code == 0
    assert doc["scope"] == "slice"
    assert doc["estimate"]["divergent"] is True


def test_norm_requires_p(tmp_path):
    assert run(["norm", "--input", series_file(tmp_path, RegularSeries.monomial(1))]) == 2


def test_zeros(tmp_path):
    src = series_file(tmp_path, RegularSeries.from_real([1.0, 0.0, 1.0]))
    code, doc = run_json(["zeros", "--input", src], tmp_path)
    assert code == 0
    (z,) = doc["zeros"]
    assert z["type"] == "spherical" and z["mult"] == 2
    assert z["x"] == pytest.approx(0.0, abs=1e-12) and z["y"] == pytest.approx(1.0)


def test_blaschke(tmp_path):
    zeros = [{"type": "isolated", "point": [0, 0.5, 0, 0], "mult": 1}, {"type": "isolated", "point": [0, 0, 0.5, 0], "mult": 1}]
    code, doc = run_json(["blaschke", "--input", write(tmp_path, "z.json", zeros)], tmp_path)
    assert code == 0
    assert max(doc["target_residuals"]) < 1e-9
    assert all(c["passed"] for c in doc["certificates"])
    f = RegularSeries(np.array(doc["series"]["coeffs"]))
    from slicehardy.series import eval_series

    for p in ([0, 0.5, 0, 0], [0, 0, 0.5, 0]):
        assert np.linalg.norm(eval_series(f, np.array(p))) < 1e-9


def test_blaschke_direct_and_bad_sequence(tmp_path):
    zeros = [{"type": "isolated", "point": [0.2, 0, 0.3, 0], "mult": 2}]
    code, doc = run_json(["blaschke", "--input", write(tmp_path, "z.json", zeros), "--mode", "direct"], tmp_path)
    assert code == 0 and doc["product"]["factors"][0]["power"] == 2
    bad = [{"type": "isolated", "point": [0, 0.5, 0, 0], "mult": 1}, {"type": "spherical", "x": 0, "y": 0.5, "mult": 2}]
    assert run(["blaschke", "--input", write(tmp_path, "b.json", bad)]) == 2
    outside = [{"type": "isolated", "point": [0, 1.5, 0, 0], "mult": 1}]
    assert run(["blaschke", "--input", write(tmp_path, "o.json", outside)]) == 2


def test_factor_outer_inner(tmp_path):
    f = RegularSeries.from_real(np.convolve([1.0, 0.0, 1.0], [-0.5, 1.0]))
    code, doc = run_json(["factor", "--input", series_file(tmp_path, f)], tmp_path)
    assert code == 0
    assert doc["method"] == "outer_inner"
    assert doc["residual"] < 1e-7
    assert {"E", "S", "B"} <= set(doc)
    assert all(c["passed"] for c in doc["certificates"])


def test_factor_zero_extraction(tmp_path):
    from slicehardy.series import star_mul

    f = star_mul(RegularSeries(np.array([[0, -0.5, 0, 0], [1.0, 0, 0, 0]])), RegularSeries(np.array([[0, 0, -0.5, 0], [1.0, 0, 0, 0]])))
    code, doc = run_json(["factor", "--input", series_file(tmp_path, f)], tmp_path)
    assert code == 0
    assert doc["method"] == "zero_extraction"
    assert doc["residual"] < 1e-8


def test_trace_polynomial(tmp_path):
    src = series_file(tmp_path, RegularSeries.monomial(3))
    out = tmp_path / "t.csv"
    assert run(["trace", "--input", src, "--unit", "0,0,1,0", "--nodes", "16", "--output", str(out)]) == 0
    text = out.read_text().splitlines()
    assert text[0].startswith("# config ")
    cfg = json.loads(text[0][len("# config ") :])
    assert cfg["nodes"] == 16 and cfg["unit"] == [0, 0, 1, 0]
    data = np.loadtxt(out, delimiter=",", skiprows=3)
    assert data.shape == (16, 6)
    assert np.allclose(data[:, 1], np.cos(3 * data[:, 0]))
    assert np.allclose(data[:, 3], np.sin(3 * data[:, 0]))


def test_trace_blaschke_unimodular(tmp_path):
    src = series_file(tmp_path, blaschke_factor(Quaternion(0.0, 0.3, 0.4, 0.0)))
    out = tmp_path / "t.csv"
    assert run(["trace", "--input", src, "--nodes", "512", "--output", str(out)]) == 0
    data = np.loadtxt(out, delimiter=",", skiprows=3)
    assert np.max(np.abs(data[:, 5] - 1)) < 1e-8


def test_trace_empty_rgrid(tmp_path, capsys):
    src = series_file(tmp_path, RegularSeries.monomial(1))
    assert run(["trace", "--input", src, "--rgrid", ""]) == 2
    assert "rgrid" in capsys.readouterr().err


def test_config_file(tmp_path):
    src = series_file(tmp_path, RegularSeries.monomial(2))
    cfg = write(tmp_path, "c.json", {"input": src, "p": "inf", "nodes": 64})
    code, doc = run_json(["norm", "--config", cfg], tmp_path)
    assert code == 0
    assert doc["config"]["nodes"] == 64 and math.isinf(float(doc["estimate"]["p"]))
    # explicit flags override the file
    code, doc = run_json(["norm", "--config", cfg, "--p", "2"], tmp_path)
    assert doc["config"]["p"] == 2.0
    bad = write(tmp_path, "bad.json", {"input": src, "p": 2, "bogus": 1})
    assert run(["norm", "--config", bad]) == 2


def test_deterministic_output(tmp_path, rng):
    src = series_file(tmp_path, RegularSeries(rng.standard_normal((4, 4))))
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}.json"
        assert run(["norm", "--input", src, "--p", "3", "--seed", "7", "--output", str(out)]) == 0
        doc = json.loads(out.read_text())
        doc["config"].pop("output")
        outs.append(doc)
    assert outs[0] == outs[1]


def test_console_entry_point(tmp_path):
    src = series_file(tmp_path, RegularSeries.monomial(2))
    res = subprocess.run(
        [sys.executable, "-m", "slicehardy", "eval", "--input", src, "--point", "0,1,0,0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["values"][0]["value"] == pytest.approx([-1, 0, 0, 0])
