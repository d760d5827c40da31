from __future__ import annotations

from pathlib import Path

from swarmamp.cli import main

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def test_validate_ok(capsys):
    code = main(["validate", "--config", str(CONFIG_DIR / "desk.yaml")])
    assert code == 0
    assert "config ok" in capsys.readouterr().out


def test_validate_bad_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema_version: 2\nscenario: nope\n")
    code = main(["validate", "--config", str(bad)])
    assert code == 2
    err = capsys.readouterr().err
    assert "violation" in err


def test_run_writes_outputs_and_reports_verdict(tmp_path, capsys):
    code = main(
        [
            "run",
            "--config",
            str(CONFIG_DIR / "desk.yaml"),
            "--out",
            str(tmp_path),
            "--episodes",
            "6",
            "--workers",
            "1",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "verdict:" in out
    assert (tmp_path / "reports.csv").exists()
    assert (tmp_path / "verdict.json").exists()


def test_run_rejects_bad_config(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("episodes: 0\n")
    assert main(["run", "--config", str(bad)]) == 2


def test_sweep_cli(tmp_path, capsys):
    code = main(
        [
            "sweep",
            "--config",
            str(CONFIG_DIR / "desk.yaml"),
            "--axis",
            "distance",
            "--episodes",
            "30",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    assert (tmp_path / "sweep_distance.csv").exists()


def test_replay_round_trip(tmp_path, capsys):
    code = main(
        [
            "run",
            "--config",
            str(CONFIG_DIR / "desk.yaml"),
            "--out",
            str(tmp_path),
            "--episodes",
            "3",
            "--workers",
            "1",
        ]
    )
    assert code == 0
    trace = tmp_path / "traces" / "joint_0000.jsonl"
    code = main(["replay", str(trace), "--config", str(CONFIG_DIR / "desk.yaml")])
    assert code == 0
    assert "replay ok" in capsys.readouterr().out


def test_replay_detects_tampering(tmp_path, capsys):
    main(
        [
            "run",
            "--config",
            str(CONFIG_DIR / "desk.yaml"),
            "--out",
            str(tmp_path),
            "--episodes",
            "3",
            "--workers",
            "1",
        ]
    )
    trace = tmp_path / "traces" / "nat_0000.jsonl"
    text = trace.read_text()
    # flip one recorded heading
    tampered = text.replace('"heading":0.0', '"heading":0.25', 1)
    assert tampered != text
    trace.write_text(tampered)
    code = main(["replay", str(trace), "--config", str(CONFIG_DIR / "desk.yaml")])
    assert code == 1
    assert "mismatch" in capsys.readouterr().out
