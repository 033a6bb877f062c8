import json
import subprocess
import sys
from fractions import Fraction

from tracestab.cli import (
    EXIT_MALFORMED,
    EXIT_MISSING_FILE,
    EXIT_MODULE_ERROR,
    EXIT_OK,
    fmt_q,
    parse_args,
)


def _run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "tracestab.cli", *args],
                          capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_parse_args_examples():
    cfg = parse_args(["i-number", "--group", "sl2.json"])
    assert cfg.subcommand == "i-number" and cfg.group == "sl2.json"
    cfg = parse_args(["sigma", "--catalog"])
    assert cfg.subcommand == "sigma" and cfg.catalog_flag
    cfg = parse_args(["verify", "stabilization", "--models", "m.json", "--seed", "7"])
    assert cfg.subcommand == "verify" and cfg.target == "stabilization"
    assert cfg.seed == 7 and cfg.trials == 100


def test_seed_and_trials_defaults():
    cfg = parse_args(["stabilize", "verify"])
    assert cfg.seed == 0 and cfg.trials == 100 and cfg.models == "fixtures"


def test_unknown_subcommand_exits_2():
    rc, _, _ = _run_cli(["frobnicate"])
    assert rc == 2


def test_missing_file_exits_3():
    rc, _, err = _run_cli(["sigma", "--group", "/nonexistent/nowhere.json"])
    assert rc == EXIT_MISSING_FILE


def test_malformed_json_exits_4(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc, _, _ = _run_cli(["sigma", "--group", str(bad)])
    assert rc == EXIT_MALFORMED


def test_unknown_fields_rejected(tmp_path):
    spec = tmp_path / "g.json"
    spec.write_text(json.dumps({"rank": 1, "simple_roots": [[2]],
                                "simple_coroots": [[1]], "color": "red"}))
    rc, _, _ = _run_cli(["sigma", "--group", str(spec)])
    assert rc == EXIT_MALFORMED


def test_floats_rejected(tmp_path):
    spec = tmp_path / "g.json"
    spec.write_text('{"rank": 1, "simple_roots": [[2.0]], "simple_coroots": [[1]]}')
    rc, _, _ = _run_cli(["sigma", "--group", str(spec)])
    assert rc == EXIT_MALFORMED


def test_module_error_exits_5(tmp_path):
    spec = tmp_path / "g.json"
    # Valid JSON, invalid Cartan data.
    spec.write_text(json.dumps({"rank": 1, "simple_roots": [[1]],
                                "simple_coroots": [[1]]}))
    rc, _, err = _run_cli(["sigma", "--group", str(spec)])
    assert rc == EXIT_MODULE_ERROR
    assert b"NonCartan" in err


def test_sigma_group_sl2():
    rc, out, _ = _run_cli(["sigma", "--group", "sl2"])
    assert rc == EXIT_OK
    assert json.loads(out)["sigma"] == "-1/8"


def test_sigma_group_from_file(tmp_path):
    spec = tmp_path / "sl2.json"
    spec.write_text(json.dumps({"rank": 1, "simple_roots": [[2]],
                                "simple_coroots": [[1]]}))
    rc, out, _ = _run_cli(["sigma", "--group", str(spec)])
    assert rc == EXIT_OK and json.loads(out)["sigma"] == "-1/8"


def test_sigma_catalog_tsv():
    rc, out, _ = _run_cli(["sigma", "--catalog", "--format", "tsv"])
    assert rc == EXIT_OK
    lines = out.decode().strip().split("\n")
    assert len(lines) == 10
    for line in lines:
        key, ctype, value = line.split("\t")
        assert "/" in value


def test_i_number_group_file_with_theta(tmp_path):
    spec = tmp_path / "o2.json"
    spec.write_text(json.dumps({
        "group": {"rank": 1, "simple_roots": [], "simple_coroots": []},
        "theta": [[-1]],
    }))
    rc, out, _ = _run_cli(["i-number", "--group", str(spec)])
    assert rc == EXIT_OK and json.loads(out)["i"] == "+1/2"


def test_separate_theta_file(tmp_path):
    group = tmp_path / "gl1.json"
    group.write_text(json.dumps({"rank": 1, "simple_roots": [],
                                 "simple_coroots": []}))
    theta = tmp_path / "theta.json"
    theta.write_text(json.dumps({"theta": [[-1]]}))
    rc, out, _ = _run_cli(["i-number", "--group", str(group),
                           "--theta", str(theta)])
    assert rc == EXIT_OK and json.loads(out)["i"] == "+1/2"


def test_verify_ei_gl1():
    rc, out, _ = _run_cli(["verify", "ei", "--group", "gl1"])
    assert rc == EXIT_OK
    obj = json.loads(out)
    assert obj["e"] == "0/1" and obj["i"] == "0/1" and obj["equal"]


def test_verify_central_quotient(tmp_path):
    z = tmp_path / "z.json"
    z.write_text(json.dumps({"generators": [["1/2"]]}))
    rc, out, _ = _run_cli(["verify", "central-quotient", "--group", "sl2",
                           "--z", str(z)])
    assert rc == EXIT_OK and json.loads(out)["pass"]


def test_elliptic_json_and_tsv():
    rc, out, _ = _run_cli(["elliptic", "--group", "sl2"])
    assert rc == EXIT_OK
    obj = json.loads(out)
    assert obj["count"] == 2
    assert obj["classes"][0]["rep"] == ["0/1"]
    rc, out, _ = _run_cli(["elliptic", "--group", "o2_twist", "--format", "tsv"])
    assert rc == EXIT_OK
    assert out.decode().strip().split("\t")[1] == "2"


def test_packets_verify(tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps({"sM_dim": 1, "r_dim": 1}))
    rc, out, _ = _run_cli(["packets", "verify", "--model", str(model),
                           "--trials", "5"])
    assert rc == EXIT_OK
    assert json.loads(out)["pass"]


def test_packets_verify_with_dual_group(tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps({
        "sM_dim": 0, "r_dim": 1, "id": "o2",
        "dual_group": {"base": "gl1", "thetas": {"0": [[1]], "1": [[-1]]}},
    }))
    rc, out, _ = _run_cli(["packets", "verify", "--model", str(model),
                           "--trials", "3"])
    assert rc == EXIT_OK and json.loads(out)["pass"]


def test_stabilize_verify_fixtures():
    rc, out, _ = _run_cli(["stabilize", "verify", "--trials", "3"])
    assert rc == EXIT_OK
    obj = json.loads(out)
    assert obj["pass"]
    names = {item["identity"] for item in obj["identities"]}
    assert any(n.startswith("discrete=stable") for n in names)
    assert any(n.startswith("endoscopic=discrete") for n in names)


def test_stabilize_verify_documented_fixture_value():
    rc, out, _ = _run_cli(["stabilize", "verify", "--trials", "0"])
    assert rc == EXIT_OK
    obj = json.loads(out)
    first = obj["identities"][0]
    assert first["identity"] == "discrete=stable[0]"
    # Fixture sum with f = 1: o2 gives 1/4, sl2 model -1/4, swap -1/8+..., etc.
    assert first["lhs"] == first["rhs"]


def test_stabilize_verify_models_file(tmp_path):
    models = tmp_path / "models.json"
    models.write_text(json.dumps({
        "models": [{
            "sM_dim": 0, "r_dim": 1, "id": "o2",
            "dual_group": {"base": "gl1", "thetas": {"0": [[1]], "1": [[-1]]}},
        }],
        "descriptors": [{
            "group_label": "u1", "model_id": "o2", "x": "1", "class_index": 0,
            "out_card": 2, "out_phi_card": 2, "zbar_generators": [["1/2"]],
            "sprime": "trivial", "splus_over_s_card": 2, "s_phi_prime_card": 1,
        }],
    }))
    rc, out, _ = _run_cli(["stabilize", "verify", "--models", str(models),
                           "--trials", "4", "--seed", "3"])
    assert rc == EXIT_OK
    obj = json.loads(out)
    assert obj["pass"]
    # The documented fixture vector (f = 1) gives 1/4 on both sides.
    first = obj["identities"][0]
    assert first["lhs"] == {"im": "0/1", "re": "+1/4"}
    assert first["rhs"] == {"im": "0/1", "re": "+1/4"}


def test_determinism_byte_identical():
    rc1, out1, _ = _run_cli(["stabilize", "verify", "--seed", "42", "--trials", "10"])
    rc2, out2, _ = _run_cli(["stabilize", "verify", "--seed", "42", "--trials", "10"])
    assert rc1 == rc2 == EXIT_OK
    assert out1 == out2


def test_report_json_roundtrip():
    rc, out, _ = _run_cli(["stabilize", "verify", "--trials", "2"])
    assert rc == EXIT_OK
    obj = json.loads(out)
    redumped = json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=2) + "\n"
    assert redumped.encode() == out


def test_fmt_q():
    assert fmt_q(Fraction(-1, 8)) == "-1/8"
    assert fmt_q(Fraction(1, 2)) == "+1/2"
    assert fmt_q(Fraction(0)) == "0/1"
    assert fmt_q(Fraction(2, 4)) == "+1/2"


def test_lts_threads_env_override(monkeypatch):
    monkeypatch.setenv("LTS_THREADS", "3")
    cfg = parse_args(["elliptic", "--group", "sl2"])
    assert cfg.threads == 3

def test_report_subcommand():
    rc, out, _ = _run_cli(["report"])
    assert rc == EXIT_OK
    obj = json.loads(out)
    assert obj["pass"]
    assert all(item["pass"] for item in obj["sections"]["e_equals_i"])
    sigmas = {item["name"]: item["sigma"] for item in obj["sections"]["sigma"]}
    assert sigmas["sl2"] == "-1/8" and sigmas["g2"] == "+151/864"
