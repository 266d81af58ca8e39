import csv
import io
import json

import numpy as np
import pytest

from sas_witness import cli
from sas_witness import witnesses as W


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_near_mixed(capsys):
    code, out, _ = run(capsys, "check", "--n", "2", "--lambdas", "0.334,0.333,0.333")
    assert code == 0
    data = json.loads(out)
    assert all(v["certified"] for v in data["verdicts"])


def test_check_pure(capsys):
    code, out, _ = run(capsys, "check", "--n", "2", "--lambdas", "1,0,0", "--format", "csv")
    assert code == 2
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["certified"] for r in rows] == ["0"] * 4


def test_check_n3_nesting(capsys):
    code, out, _ = run(capsys, "check", "--n", "3", "--lambdas", "0.30,0.26,0.24,0.20", "--y", "extremal")
    v = {d["witness"]: d["certified"] for d in json.loads(out)["verdicts"]}
    assert not v["W0"] or v["W1"]
    assert not v["W3"] or v["W2"]
    assert code == (0 if any(v.values()) else 2)


@pytest.mark.parametrize(
    "lambdas",
    ["0.5,0.3,0.3", "0.6,0.5,-0.1", "a,b,c", "0.5,0.5"],
)
def test_check_rejects_bad_spectra(capsys, lambdas):
    code, _, err = run(capsys, "check", "--n", "2", "--lambdas", lambdas)
    assert code == 1
    assert "error" in err


def test_check_normalize(capsys):
    code, out, _ = run(capsys, "check", "--n", "2", "--lambdas", "2,2,2", "--normalize")
    assert code == 0
    assert json.loads(out)["lambdas"] == pytest.approx([1 / 3] * 3)


def test_check_input_files(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"n_qubits": 2, "lambdas": [0.34, 0.33, 0.33]}))
    assert run(capsys, "check", "--input", str(p))[0] == 0
    q = tmp_path / "rho.json"
    q.write_text(json.dumps({"n_qubits": 1, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}))
    assert run(capsys, "check", "--input", str(q))[0] == 1  # N = 1 is below range
    assert run(capsys, "check", "--input", str(tmp_path / "missing.json"))[0] == 1


def test_check_y_modes(capsys):
    base = ["check", "--n", "2", "--lambdas", "0.34,0.33,0.33"]
    assert run(capsys, *base, "--y", "zero")[0] == 0
    assert run(capsys, *base, "--y", "455/12")[0] == 0
    code, _, err = run(capsys, *base, "--y", "-1")
    assert code == 1 and "inadmissible" in err


def test_check_trace(tmp_path, capsys):
    t = tmp_path / "trace.csv"
    run(capsys, "check", "--n", "2", "--lambdas", "0.45,0.35,0.2", "--trace", str(t))
    assert t.read_text().startswith("iteration,value,gap")


def test_radii_csv(capsys):
    code, out, _ = run(capsys, "radii", "--n-min", "2", "--n-max", "5", "--ghz-max", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == list(W.RADII_COLUMNS)
    for r, N in zip(rows, range(2, 6)):
        assert float(r["r_S3"]) == pytest.approx(float(W.w3_bound(N)) ** 0.5, rel=1e-15)
    assert rows[2]["r_GHZ"] == ""
    assert rows[0]["r_GHZ"] != ""


def test_radii_flags_unchecked_candidates(capsys):
    assert "not checked" not in run(capsys, "radii", "--n-min", "2", "--n-max", "6", "--ghz-max", "0")[2]
    assert "not checked" in run(capsys, "radii", "--n-min", "7", "--n-max", "7", "--ghz-max", "0")[2]


def test_radii_deterministic(capsys):
    a = run(capsys, "radii", "--n-min", "2", "--n-max", "8", "--ghz-max", "4")[1]
    b = run(capsys, "radii", "--n-min", "2", "--n-max", "8", "--ghz-max", "4")[1]
    assert a == b


def test_radii_ratios_n65(capsys):
    out = run(capsys, "radii", "--n-min", "65", "--n-max", "65", "--format", "json")[1]
    row = json.loads(out)[0]
    assert row["r_S3"] / row["r_S0"] == pytest.approx(1.849, abs=0.005)
    assert row["r_vmin_S1"] / row["r_S0"] == pytest.approx(1.423, abs=0.005)


def test_radii_bad_range(capsys):
    assert run(capsys, "radii", "--n-min", "5", "--n-max", "3")[0] == 1


def test_polytope(capsys, tmp_path):
    out = tmp_path / "g.json"
    assert run(capsys, "polytope", "--n", "2", "--output", str(out))[0] == 0
    g = json.loads(out.read_text())
    assert g["n_vertices"] == 6 and g["n_faces"] == 6
    assert g["r_inner"] == "sqrt(1/168)"
    assert g["r_inner_squared"] == g["w0_bound"] == "1/168"
    g3 = json.loads(run(capsys, "polytope", "--n", "3")[1])
    assert g3["n_vertices"] == 14 and g3["n_edge_midpoints"] == 6
    assert run(capsys, "polytope", "--n", "9")[0] == 1


def test_verify_small(capsys):
    args = ["verify", "--n-max", "3", "--spectra", "40", "--unitaries", "10", "--completeness-samples", "300"]
    code, out, _ = run(capsys, *args, "--seed", "42")
    assert code == 0
    code2, out2, _ = run(capsys, *args, "--seed", "42")
    assert out == out2


def test_verify_fault_injection(capsys):
    code, _, err = run(capsys, "verify", "--n-max", "2", "--spectra", "40", "--unitaries", "10",
                       "--completeness-samples", "10", "--inject-fault")
    assert code == 3
    assert "unitary_seed" in err


def test_hidden_flag_not_in_help(capsys):
    with pytest.raises(SystemExit):
        cli.main(["verify", "--help"])
    assert "inject" not in capsys.readouterr().out


def test_help_lists_exit_codes(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    assert "exit codes" in capsys.readouterr().out


def _scan(capsys, n, res):
    code, out, _ = run(capsys, "scan", "--n", str(n), "--resolution", str(res))
    assert code == 0
    return np.genfromtxt(io.StringIO(out), delimiter=",", names=True)


def test_scan_n2_regions(capsys):
    a = _scan(capsys, 2, 60)
    area = {w: a[w].sum() for w in ("w0", "w1", "w2", "w3")}
    assert area["w0"] < area["w1"] < area["w2"]
    assert area["w3"] <= area["w2"]
    assert np.all(a["w3"][a["w1"] == 1] == 1)
    # every certified grid point is exactly SAS
    certified = (a["w0"] + a["w1"] + a["w2"] + a["w3"]) > 0
    assert np.all(a["exact_n2"][certified] == 1)
    lam = np.column_stack([a[f"lambda_{i}"] for i in range(3)])
    assert np.all(np.diff(lam, axis=1) <= 1e-15)


def test_scan_n3_complementary(capsys):
    a = _scan(capsys, 3, 30)
    assert np.any((a["w1"] == 1) & (a["w3"] == 0))
    assert np.any((a["w3"] == 1) & (a["w1"] == 0))


def test_scan_bad_n(capsys):
    assert run(capsys, "scan", "--n", "4")[0] == 1
