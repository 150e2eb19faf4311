import json

import numpy as np
import pytest

from trajopt import fileio
from trajopt.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def instance_file(tmp_path, capsys):
    code, out, _ = run(capsys, "cool", "--demo", "working-example")
    assert code == 0
    path = tmp_path / "instance.json"
    path.write_text(out)
    return str(path)


def test_cool_demo_fields(instance_file):
    text = open(instance_file).read()
    doc = json.loads(text)
    assert list(doc) == ["eigenvalues", "target", "cost", "initial_populations", "eps_pop", "eps_grad"]
    assert len(doc["eigenvalues"]) == 8
    assert doc["cost"][:4] == [0, 0.1, 0.4, 1.1]
    # loading and re-serializing the instance reproduces the bytes
    from trajopt.core import validate

    inst = validate(fileio.instance_from_dict(doc))
    assert fileio.dumps_canonical(fileio.instance_to_dict(inst)) + "\n" == text


def test_cool_explicit_flags(capsys):
    code, out, _ = run(
        capsys,
        "cool",
        "--system-energies", "0,0.3",
        "--system-populations", "0.5,0.5",
        "--machine-energies", "0,0.1,0.4,1.1",
        "--beta", "1",
    )
    assert code == 0
    code2, out2, _ = run(capsys, "cool", "--demo", "working-example")
    assert out == out2


def test_cool_incoherent_demo(capsys):
    code, out, _ = run(capsys, "cool", "--demo", "incoherent")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["eigenvalues"]) == 12
    assert "conserved" in doc
    assert len({round(v, 9) for v in doc["conserved"]}) == 5


def test_cool_bad_flags(capsys):
    code, _, err = run(capsys, "cool", "--system-energies", "0,x", "--machine-energies", "0", "--beta", "1")
    assert code == 2 and "system-energies" in err


def test_build_eval_roundtrip(tmp_path, capsys, instance_file):
    out_path = str(tmp_path / "traj.json")
    code, _, _ = run(capsys, "build", instance_file, out_path)
    assert code == 0
    text = open(out_path).read()
    doc = fileio.load_json(out_path)
    assert fileio.dumps_canonical(fileio.trajectory_from_dict(doc)) + "\n" == text

    code, out, _ = run(capsys, "eval", instance_file, "--grid", "7")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "alpha,omega,work"
    rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
    # every breakpoint appears and matches the stored omega digit for digit
    for alpha, omega in doc["breakpoints"]:
        key = fileio.format_float(alpha)
        assert key in rows
        assert rows[key][1] == fileio.format_float(omega)
    # work is zero at the initial target value
    assert float(rows[fileio.format_float(0.5)][2]) == 0.0


def test_trajectory_file_evaluates_standalone(tmp_path, capsys, instance_file):
    from trajopt.trajectory import omega_opt

    out_path = str(tmp_path / "traj.json")
    run(capsys, "build", instance_file, out_path)
    doc = fileio.load_json(out_path)
    runtime = fileio.trajectory_to_runtime(doc)
    for alpha, omega in doc["breakpoints"]:
        assert omega_opt(runtime, float(alpha)) == float(omega)


def test_eps_flags_override_instance(tmp_path, capsys, instance_file):
    out_path = str(tmp_path / "traj.json")
    run(capsys, "--eps-pop", "1e-9", "--eps-grad", "1e-9", "build", instance_file, out_path)
    doc = fileio.load_json(out_path)
    assert doc["metadata"]["eps_pop"] == 1e-9
    assert doc["metadata"]["eps_grad"] == 1e-9


def test_malformed_json_is_parse_error(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, err = run(capsys, "build", str(broken), str(tmp_path / "o.json"))
    assert code == 2 and "invalid JSON" in err


def test_eval_single_alpha(capsys, instance_file):
    code, out, _ = run(capsys, "eval", instance_file, "--alpha", "0.5")
    assert code == 0
    assert len(out.strip().split("\n")) == 2


def test_eval_alpha_out_of_range(capsys, instance_file):
    code, out, err = run(capsys, "eval", instance_file, "--alpha", "2.0")
    assert code == 3
    assert out == ""


def test_build_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"eigenvalues": [0.5, "x"], "target": [1, 0], "cost": [0, 1]}')
    code, _, err = run(capsys, "build", str(bad), str(tmp_path / "out.json"))
    assert code == 2 and "eigenvalues" in err

    missing = tmp_path / "missing_field.json"
    missing.write_text('{"eigenvalues": [0.5, 0.5], "cost": [0, 1]}')
    code, _, err = run(capsys, "build", str(missing), str(tmp_path / "out.json"))
    assert code == 2 and "target" in err

    code, _, _ = run(capsys, "build", str(tmp_path / "nope.json"), str(tmp_path / "out.json"))
    assert code == 1


def test_lift_output(tmp_path, capsys, instance_file):
    out_path = str(tmp_path / "lift.json")
    code, _, _ = run(capsys, "lift", instance_file, out_path, "--alpha", "0.52")
    assert code == 0
    doc = json.loads(open(out_path).read())
    u = np.array(doc["unitary"], dtype=float)
    ds = np.array(doc["doubly_stochastic"], dtype=float)
    assert np.max(np.abs(u.T @ u - np.eye(8))) <= 1e-12
    assert np.max(np.abs(u**2 - ds)) <= 1e-12
    # lifting at alpha_min is a permutation matrix
    code, _, _ = run(capsys, "lift", instance_file, out_path, "--alpha", "0.34497293037343785")
    perm = np.array(json.loads(open(out_path).read())["unitary"])
    assert np.isin(perm, [0.0, 1.0]).all()


def test_verify_pass_and_json(capsys, instance_file):
    code, out, _ = run(capsys, "verify", instance_file, "--samples", "500")
    assert code == 0 and out.strip().endswith("OK")
    code, out, _ = run(capsys, "verify", instance_file, "--samples", "200", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    names = {c["name"] for c in doc["checks"]}
    assert {"envelope-equivalence", "monte-carlo-audit"} <= names


def test_verify_edge_check_small_instance(tmp_path, capsys):
    inst = {
        "eigenvalues": [0.4, 0.3, 0.2, 0.1],
        "target": [0, 0, 1, 1],
        "cost": [0, 1, 0, 1],
    }
    path = tmp_path / "small.json"
    path.write_text(json.dumps(inst))
    code, out, _ = run(capsys, "verify", str(path), "--samples", "200")
    assert code == 0
    assert "PASS  edge-structure" in out


def test_verify_tamper_negative_control(tmp_path, capsys, instance_file):
    traj_path = str(tmp_path / "traj.json")
    run(capsys, "build", instance_file, traj_path)
    code, _, _ = run(capsys, "verify", instance_file, "--samples", "100", "--trajectory", traj_path)
    assert code == 0
    doc = fileio.load_json(traj_path)
    doc["steps"][2]["gradient"] += 1e-3
    tampered = str(tmp_path / "tampered.json")
    open(tampered, "w").write(json.dumps(doc))
    code, out, _ = run(capsys, "verify", instance_file, "--samples", "100", "--trajectory", tampered)
    assert code == 4
    assert "FAIL" in out


def test_verify_conserved_instance(tmp_path, capsys):
    code, out, _ = run(capsys, "cool", "--demo", "incoherent")
    path = tmp_path / "inc.json"
    path.write_text(out)
    code, out, _ = run(capsys, "verify", str(path), "--samples", "300")
    assert code == 0


def test_verify_large_flat_instance_skips_enumeration_runs_audit(tmp_path, capsys):
    rng = np.random.default_rng(5)
    lam = rng.dirichlet(np.ones(12))
    inst = {
        "eigenvalues": list(map(float, lam)),
        "target": list(map(float, rng.normal(size=12))),
        "cost": list(map(float, rng.normal(size=12))),
    }
    path = tmp_path / "big.json"
    path.write_text(json.dumps(inst))
    code, out, _ = run(capsys, "verify", str(path), "--samples", "300")
    assert code == 0
    assert "SKIP  envelope-equivalence" in out
    assert "PASS  monte-carlo-audit" in out


def test_enum_cap_env_var(tmp_path, capsys, instance_file, monkeypatch):
    monkeypatch.setenv("TRAJOPT_MAX_ENUM_DIM", "4")
    code, out, _ = run(capsys, "verify", instance_file, "--samples", "100")
    assert code == 0
    assert "skipped" in out and "envelope-equivalence" in out
