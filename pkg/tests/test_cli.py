import csv
import json
import subprocess
import sys

import pytest

from hypbubble.cli import main


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_spectral_bound_violation_exits_2(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"params": {"N": 3, "p": 3.0, "lambda": 1.0}})
    assert main(["ground-state", "--config", cfg, "--output", str(tmp_path)]) == 2
    assert "bottom of the spectrum" in capsys.readouterr().err


def test_unknown_key_exits_2(tmp_path):
    cfg = write(tmp_path, "c.json", {"params": {"N": 3, "q": 1}})
    assert main(["energy", "--config", cfg, "--output", str(tmp_path)]) == 2


def test_lemma_sweep_row_count_and_determinism(tmp_path):
    cfg = write(tmp_path, "c.json", {"lemma_sweep": {"t_step": 0.25, "separations": [8.0, 9.0]}})
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["lemma-sweep", "--config", cfg, "--output", str(out)]) == 0
        outs.append(out)
    with open(outs[0] / "lemma_sweep.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) - 1 == 5 * 2
    for name in ("lemma_sweep.csv", "lemma_sweep.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_strict_regime_flag(tmp_path):
    cfg = write(tmp_path, "c.json", {"lemma_sweep": {"t_step": 0.5}})
    assert main(["lemma-sweep", "--config", cfg, "--strict-regime",
                 "--output", str(tmp_path)]) == 2


def test_output_env_override(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("HYPBUBBLE_OUTPUT", str(target))
    assert main(["spectrum"]) == 0
    assert (target / "spectrum.csv").exists()


def test_ground_state_outputs(tmp_path):
    assert main(["ground-state", "--output", str(tmp_path)]) == 0
    for name in ("ground_state.csv", "ground_state.json", "ground_state.dat",
                 "ground_state_summary.json"):
        assert (tmp_path / name).exists()
    summary = json.loads((tmp_path / "ground_state_summary.json").read_text())
    assert summary["A_discrepancy"] < 1e-6


def test_verify_subset_via_module(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "hypbubble", "verify", "--only", "2,8,10",
                           "--output", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.count("[PASS]") == 3
    data = json.loads((tmp_path / "acceptance" / "acceptance.json").read_text())
    assert [d["number"] for d in data] == [2, 8, 10]


def test_bad_seed_rejected(tmp_path):
    cfg = write(tmp_path, "c.json", {"seed": -3})
    assert main(["spectrum", "--config", cfg, "--output", str(tmp_path)]) == 2
