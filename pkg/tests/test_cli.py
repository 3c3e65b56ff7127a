import json
import subprocess
import sys

import numpy as np
import pytest

from wigmagic.cli import main, parse_state


def run(tmp_path, *argv):
    return main([argv[0], "--output", str(tmp_path), *argv[1:]])


def test_parse_state_presets(tmp_path):
    assert parse_state("t-state").nqubits == 1
    assert parse_state("bell").nqubits == 2
    assert np.isclose(parse_state("ry:0").matrix[0, 0], 1)
    assert parse_state("[[1, 0], [0, 0]]").nqubits == 1
    path = tmp_path / "s.json"
    path.write_text("[[0.6, 0], [0, 0.8]]")
    assert np.isclose(parse_state(f"@{path}").matrix[1, 1], 0.64)


def test_distance_outputs(tmp_path, capsys):
    assert run(tmp_path, "distance", "--state", "ry:0.7853981633974483") == 0
    assert capsys.readouterr().out.startswith("distance: ok: C=0.41421356")
    summary = json.loads((tmp_path / "distance.summary.json").read_text())
    assert summary["passed"] and summary["seed"] == 2024
    assert summary["report"]["kappa"] == pytest.approx(1.0, abs=1e-6)
    assert (tmp_path / "nearest_free.csv").exists() and (tmp_path / "witness.csv").exists()


def test_wigner_and_extent(tmp_path):
    assert run(tmp_path, "wigner", "--state", "bell") == 0
    assert len((tmp_path / "wigner.csv").read_text().splitlines()) == 17
    assert run(tmp_path, "extent", "--state", "rx:1.0471975511965976") == 0
    s = json.loads((tmp_path / "extent.summary.json").read_text())
    assert s["gamma"] == pytest.approx((np.sqrt(3) + 1) / 2, abs=1e-9)
    assert s["kappa"] == pytest.approx(2.0, abs=1e-6)


def test_json_format(tmp_path):
    assert run(tmp_path, "enumerate-stabilizers", "--n", "1", "--format", "json") == 0
    data = json.loads((tmp_path / "stabilizers_n1.json").read_text())
    assert len(data) == 6 and data[0]["generators"] == "+Z"


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "distance", "--state", "nonsense") == 2
    assert run(tmp_path, "distance", "--state", "[[1, 1]]") == 2
    assert run(tmp_path, "kappa-sweep", "--family", "rz") == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["distance", "--output", str(blocker / "sub")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(tmp_path, "distance", "--config", str(bad)) == 2
    bad.write_text(json.dumps({"tolerances": {"lp_gap": -1}}))
    assert run(tmp_path, "distance", "--config", str(bad)) == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    assert "error" in capsys.readouterr().err


def test_config_and_flag_priority(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "rx", "theta": 0.7853981633974483, "points": 4, "p-max": 0.2, "seed": 5}))
    assert run(tmp_path, "noise-sweep", "--config", str(cfg), "--points", "3") == 0
    s = json.loads((tmp_path / "noise-sweep.summary.json").read_text())
    assert s["family"] == "Rx" and len(s["p_grid"]) == 3 and s["seed"] == 5
    assert s["p_grid"][-1] == pytest.approx(0.2)


def test_claim_failure_exit_code(tmp_path, capsys):
    # global depolarizing noise leaves residual distance above p*
    code = run(tmp_path, "noise-sweep", "--family", "rx", "--points", "6", "--p-max", "0.5")
    assert code == 1
    assert "FAILED" in capsys.readouterr().out
    assert run(tmp_path, "noise-sweep", "--family", "rx", "--points", "6", "--p-max", "0.5", "--channel", "codespace") == 0


def test_byte_identical_records(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["kappa-sweep", "--family", "brz", "--points", "5", "--output", str(d)]) == 0
    assert (a / "kappa_BellRz.csv").read_bytes() == (b / "kappa_BellRz.csv").read_bytes()


def test_verify_single_qubit(tmp_path):
    assert run(tmp_path, "verify", "--n", "1") == 0
    s = json.loads((tmp_path / "verify.summary.json").read_text())
    assert s["passed"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "wigmagic", "distance", "--state", "t-state", "--output", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("distance: ok")
