import json
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg as sla

from polarrep import cli

MODEL = Path(__file__).resolve().parents[1] / "models" / "sl2_adjoint.json"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, text):
    p = tmp_path / "model.json"
    p.write_text(text)
    return str(p)


def test_validate_builtin(capsys):
    code, out, _ = run(capsys, "validate", "--builtin", "sln-son:n=3")
    assert code == 0
    rep = json.loads(out)
    assert (rep["pair"]["dim_g"], rep["pair"]["dim_v"]) == (3, 5)
    assert all(c["pass"] for c in rep["checks"].values())


def test_validate_hand_written_model(capsys):
    code, out, _ = run(capsys, "validate", "--model", str(MODEL))
    assert code == 0
    rep = json.loads(out)
    assert rep["pair"]["combined_dims"] == {"k_R": 1, "p_R": 2, "V_R∩W": 1, "V_R∩iW": 2}


def test_roots_on_model_matches_builtin(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["roots", "--model", str(MODEL), "--budget", "40", "--out", str(a)]) == 0
    assert cli.main(["roots", "--builtin", "sl2-adjoint", "--budget", "40", "--seed", "7",
                     "--out", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    sig = lambda r: sorted(tuple(s) for s in r["cartan_classes"]["signatures"])  # noqa: E731
    assert sig(ra) == sig(rb) == [(0, 1), (1, 0)]


def test_malformed_json_exit_2(capsys, tmp_path):
    path = write(tmp_path, '{\n  "basis": ["a",\n}')
    code, _, err = run(capsys, "validate", "--model", path)
    assert code == 2
    assert "line 3" in err and "column" in err


def test_schema_error_exit_3(capsys, tmp_path):
    doc = json.loads(MODEL.read_text())
    doc["colour"] = "blue"
    code, _, err = run(capsys, "validate", "--model", write(tmp_path, json.dumps(doc)))
    assert code == 3 and "schema error" in err
    doc = json.loads(MODEL.read_text())
    doc["structure_constants"][0] = [0, 1, 1]
    code, _, _ = run(capsys, "validate", "--model", write(tmp_path, json.dumps(doc)))
    assert code == 3


def test_noncommuting_involutions_exit_4(capsys, tmp_path):
    doc = json.loads(MODEL.read_text())
    # conjugate theta by exp(i t ad(E - F)) on both factors: still an involution
    # compatible with tau, but no longer commuting with sigma
    ad = np.array([[0, 1, 1], [-2, 0, 0], [-2, 0, 0]], dtype=float)   # ad(E - F) on (H, E, F)
    a = np.kron(np.eye(2), sla.expm(0.3j * ad))
    theta = a @ np.array(doc["involutions"]["theta"], dtype=float) @ np.conj(np.linalg.inv(a))
    doc["involutions"]["theta"] = [[[z.real, z.imag] for z in row] for row in theta]
    code, _, err = run(capsys, "validate", "--model", write(tmp_path, json.dumps(doc)))
    assert code == 4
    assert "sigma∘theta − theta∘sigma" in err


def test_bad_builtin(capsys):
    assert run(capsys, "validate", "--builtin", "nope")[0] == 2
    assert run(capsys, "validate", "--builtin", "sln-son:n")[0] == 2
    assert run(capsys, "validate", "--builtin", "sln-son:m=3")[0] == 3
    assert run(capsys, "validate")[0] == 2


def test_checks_only_and_strict(capsys):
    code, out, _ = run(capsys, "isoparam", "--builtin", "sl2-adjoint", "--checks-only", "--samples", "2",
                       "--strict")
    assert code == 0
    rep = json.loads(out)
    assert set(rep) <= {"checks", "provenance", "errors", "incomplete"}
    assert rep["checks"] and all(c["pass"] for c in rep["checks"].values())


def test_probe_closures(capsys):
    code, out, _ = run(capsys, "probe-closures", "--builtin", "so3-r3", "--sub", "so2-r3", "--samples", "3")
    assert code == 0
    probe = json.loads(out)["probe"]
    assert probe["all_equal"] is False
    assert [s["dim_a"] for s in probe["samples"]] == [2, 2, 2]


def test_cayley_verb_deterministic(capsys):
    a = run(capsys, "cayley", "--builtin", "sl2-adjoint", "--seed", "3", "--budget", "30")
    b = run(capsys, "cayley", "--builtin", "sl2-adjoint", "--seed", "3", "--budget", "30")
    assert a[0] == 0 and a == b
    rep = json.loads(a[1])
    assert rep["cayley"] and rep["extremal"]


def test_to_json_normalizes_numbers():
    out = cli.to_json({"z": np.array([1 + 2j, -0.0]), "x": np.float64(1 / 3), "n": np.int64(4)})
    assert out["z"] == [[1.0, 2.0], [0.0, 0.0]]
    assert out["x"] == pytest.approx(1 / 3, rel=1e-11) and out["n"] == 4
