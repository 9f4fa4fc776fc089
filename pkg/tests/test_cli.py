import json

import numpy as np
import pytest

from qchan import bench, io
from qchan.channel import Channel, apply
from qchan.cli import main

PSI1 = str(io.fixture_path("psi1"))
PSI2 = str(io.fixture_path("psi2"))
IDENT = str(io.fixture_path("identity"))
DEPOL = str(io.fixture_path("depolarizing"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def qutrit(tmp_path):
    path = tmp_path / "qutrit.json"
    io.dump(Channel.identity(3), path)
    return str(path)


@pytest.fixture
def shrinking(tmp_path):
    path = tmp_path / "shrink.json"
    path.write_text(json.dumps({"kraus": [io.encode_matrix(0.9 * np.eye(2))]}))
    return str(path)


def test_metric_text(capsys):
    code, out, _ = run(capsys, "metric", PSI1, PSI2)
    assert code == 0
    values = dict(line.split() for line in out.splitlines())
    assert float(values["superfidelity"]) == pytest.approx(0.75)
    assert float(values["root_superinfidelity_CG"]) == pytest.approx(0.5)


@pytest.mark.parametrize("order", ["before", "after"])
def test_global_flags_either_side(capsys, order):
    argv = ["--json", "metric", IDENT, DEPOL] if order == "before" else ["metric", IDENT, DEPOL, "--json"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    payload = json.loads(out)
    assert payload["dim"] == 2
    assert payload["superfidelity"] == pytest.approx(0.25)


def test_metric_out_file(capsys, tmp_path):
    path = tmp_path / "m.json"
    code, _, _ = run(capsys, "metric", PSI1, PSI2, "--out", str(path))
    assert code == 0
    assert json.loads(path.read_text())["superfidelity"] == pytest.approx(0.75)


def test_invalid_channel_exit_code(capsys, shrinking):
    code, _, err = run(capsys, "metric", shrinking, IDENT)
    assert code == 3 and "not CP-TP" in err
    code, out, _ = run(capsys, "--json", "metric", shrinking, IDENT)
    payload = json.loads(out)
    assert code == 3 and payload["exit_code"] == 3
    assert payload["defects"]["tp_defect"] > 0.2


def test_no_validate_skips_checks(capsys, shrinking):
    code, _, _ = run(capsys, "metric", shrinking, IDENT, "--no-validate")
    assert code != 3


def test_dimension_mismatch(capsys, qutrit):
    code, _, err = run(capsys, "metric", IDENT, qutrit)
    assert code == 4 and "dimension mismatch" in err
    code, out, _ = run(capsys, "circuit", IDENT, qutrit, "--json")
    assert code == 4 and json.loads(out) == {
        "error": json.loads(out)["error"], "exit_code": 4, "dim_a": 2, "dim_b": 3,
    }


def test_unparseable_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, out, _ = run(capsys, "--json", "metric", str(bad), IDENT)
    assert code == 2 and "invalid JSON" in json.loads(out)["error"]
    code, _, _ = run(capsys, "metric", str(tmp_path / "missing.json"), IDENT)
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "metric", PSI1)[0] == 2
    assert run(capsys, "--seed", "-1", "metric", PSI1, PSI2)[0] == 2
    assert run(capsys, "--seed", str(2**64), "metric", PSI1, PSI2)[0] == 2
    code, out, _ = run(capsys, "--json", "verify", "nope")
    assert code == 2 and json.loads(out)["exit_code"] == 2


def test_seed_accepts_full_u64(capsys):
    code, out, _ = run(capsys, "circuit", IDENT, DEPOL, "--shots", "100", "--seed", str(2**64 - 1), "--json")
    assert code == 0 and json.loads(out)["shots_overlap"] == 100


def test_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "chaining-counterexample")
    assert code == 0
    assert out.splitlines()[-1].startswith("chaining-counterexample: PASS")
    path = tmp_path / "v.json"
    code, out, _ = run(capsys, "verify", "bounds", "--n", "50", "--json", "--out", str(path))
    assert code == 0 and json.loads(out)["passed"] and json.loads(path.read_text())["suite"] == "bounds"


def test_circuit(capsys):
    code, out, _ = run(capsys, "--json", "circuit", IDENT, DEPOL)
    payload = json.loads(out)
    assert code == 0
    assert payload["p0"] == pytest.approx(5 / 8)
    assert payload["superfidelity_estimate"] == pytest.approx(0.25)
    assert payload["register"]["qubits"] == 5
    code, out, _ = run(capsys, "circuit", IDENT, DEPOL, "--shots", "1000", "--seed", "3")
    assert code == 0 and "superfidelity" in out
    assert run(capsys, "circuit", IDENT, DEPOL, "--shots", "-5")[0] == 2


def test_bench_stdout_and_file(capsys, tmp_path):
    code, out, err = run(capsys, "bench", "--dims", "2", "--n-pairs", "30", "--seed", "4")
    assert code == 0
    assert out.splitlines()[0].split(",") == bench.CSV_HEADER
    assert len(out.splitlines()) == 1 + len(bench.BENCH_METRICS)
    assert "eigendecompositions" in err
    path = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bench", "--dims", "2,3", "--n-pairs", "30", "--out", str(path), "--json")
    assert code == 0
    assert json.loads(out)["out"] == str(path)
    assert [r["dim"] for r in bench.read_csv(path)] == [2] * 8 + [3] * 8


def test_bench_argument_errors(capsys, tmp_path):
    assert run(capsys, "bench", "--dims", "1-3", "--n-pairs", "5")[0] == 2
    assert run(capsys, "bench", "--dims", "x", "--n-pairs", "5")[0] == 2
    assert run(capsys, "bench", "--dims", "2", "--n-pairs", "0")[0] == 2
    assert run(capsys, "bench", "--dims", "2", "--n-pairs", "5", "--out", str(tmp_path / "no" / "b.csv"))[0] == 1


def test_family_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "family", "depolarizing", "2", "1.0")
    assert code == 0
    c = io.loads(out)
    assert np.allclose(c.dynamical, Channel.identity(2).dynamical)
    code, out, _ = run(capsys, "family", "dephasing", "0.5+0.5i")
    assert code == 0
    assert apply(io.loads(out), np.full((2, 2), 0.5))[0, 1] == pytest.approx(0.25 + 0.25j)
    path = tmp_path / "p.json"
    code, out, _ = run(capsys, "family", "pauli", "2", "0.5", "0", "0.5", "0", "--out", str(path), "--json")
    assert code == 0 and json.loads(out)["dim"] == 2
    assert io.load(path).dim == 2
    code, out, _ = run(capsys, "family", "dephasing", "[[1, 0.5], [0.5, 1]]")
    assert code == 0 and io.loads(out).dim == 2


def test_family_parameter_errors(capsys):
    code, _, err = run(capsys, "family", "werner_holevo", "2", "0.5")
    assert code == 2 and "1/(d+1) = 0.333333" in err
    assert run(capsys, "family", "depolarizing", "2")[0] == 2
    assert run(capsys, "family", "dephasing", "abc")[0] == 2
    assert run(capsys, "family", "amplitude", "1")[0] == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith("qchan ")
