"""Command-line interface: determinism, artifacts, exit codes."""
from __future__ import annotations

import json

import pytest

from seqdes import MHConfig, SeqConfig, SessionStore, create_session, recommend_next
from seqdes.cli import main
from seqdes.jsonio import canonical_dumps

MH_FLAGS = ["--kept", "600", "--burn-in", "150"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_writes_deterministic_csv(tmp_path, capsys):
    out = tmp_path / "counts.csv"
    argv = ["simulate", "--scenario", "normal", "--days", "20", "--seed", "3", "--out", str(out)]
    code, text, _ = run(argv, capsys)
    assert code == 0
    assert str(out) in text
    first = out.read_bytes()
    assert first.startswith(b"day,count\n")
    assert len(first.decode().strip().split("\n")) == 21

    code, _, _ = run(argv, capsys)
    assert code == 0
    assert out.read_bytes() == first


def test_simulate_json_output_and_custom_params(tmp_path, capsys):
    out = tmp_path / "counts.json"
    argv = [
        "simulate", "--r", "0.2", "--k", "800", "--days", "10",
        "--seed", "1", "--out", str(out), "--json",
    ]
    code, text, _ = run(argv, capsys)
    assert code == 0
    payload = json.loads(text)
    assert text == canonical_dumps(payload) + "\n"
    assert payload["rows"] == 10
    assert payload["K"] == 800.0
    parsed = json.loads(out.read_text())
    assert isinstance(parsed, list) and len(parsed) == 10


def test_simulate_requires_model(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--days", "5", "--seed", "1", "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 2


def test_fit_roundtrip_artifacts(tmp_path, capsys):
    data = tmp_path / "counts.csv"
    main(["simulate", "--scenario", "normal", "--days", "15", "--seed", "2", "--out", str(data)])
    capsys.readouterr()

    draws = tmp_path / "draws.csv"
    summary = tmp_path / "summary.json"
    argv = [
        "fit", "--data", str(data), "--seed", "4", *MH_FLAGS,
        "--out-draws", str(draws), "--out-summary", str(summary), "--json",
    ]
    code, text, _ = run(argv, capsys)
    assert code == 0
    payload = json.loads(text)
    assert text == canonical_dumps(payload) + "\n"
    assert payload["n_kept"] == 600
    assert draws.read_bytes().startswith(b"iter,r,K\n")
    assert json.loads(summary.read_text())["mean"]["K"] > 0

    first = (draws.read_bytes(), summary.read_bytes(), text)
    code, text, _ = run(argv, capsys)
    assert (draws.read_bytes(), summary.read_bytes(), text) == first


def test_fit_missing_file_is_runtime_error(tmp_path, capsys):
    code, out, err = run(["fit", "--data", str(tmp_path / "nope.csv"), "--seed", "1"], capsys)
    assert code == 1
    assert out == ""
    envelope = json.loads(err)
    assert err == canonical_dumps(envelope) + "\n"
    assert envelope["code"] == "io-error"
    assert "nope.csv" in envelope["message"]


def test_fit_rejects_negative_seed(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fit", "--data", str(tmp_path / "x.csv"), "--seed", "-1"])
    assert exc.value.code == 2


def test_sequential_artifacts_and_determinism(tmp_path, capsys):
    argv = [
        "sequential", "--scenario", "normal", "--criterion", "A",
        "--budget", "5", "--window", "4", "--season", "30",
        *MH_FLAGS, "--seed", "6", "--json",
    ]
    code, text, _ = run(argv + ["--out-dir", str(tmp_path / "a")], capsys)
    assert code == 0
    payload = json.loads(text)
    cell_dir = tmp_path / "a" / "normal-A-sequential-seed6"
    assert payload["cell"] == "normal-A-sequential-seed6"
    for name in ("dataset.csv", "design.csv", "trace.jsonl", "band.csv", "curve.csv", "bundle.json"):
        assert (cell_dir / name).exists()
    assert (cell_dir / "design.csv").read_text().startswith("index,day\n")
    bundle = json.loads((cell_dir / "bundle.json").read_text())
    assert len(bundle["design"]) == 5

    code, _, _ = run(argv + ["--out-dir", str(tmp_path / "b")], capsys)
    assert code == 0
    other = tmp_path / "b" / "normal-A-sequential-seed6"
    for name in ("dataset.csv", "trace.jsonl", "band.csv", "bundle.json"):
        assert (cell_dir / name).read_bytes() == (other / name).read_bytes()


def test_sequential_grid_cells(tmp_path, capsys):
    argv = [
        "sequential", "--grid", "normal,slow:A",
        "--budget", "4", "--window", "3", "--season", "20",
        *MH_FLAGS, "--seed", "2", "--out-dir", str(tmp_path), "--json",
    ]
    code, text, _ = run(argv, capsys)
    assert code == 0
    cells = json.loads(text)["cells"]
    assert [c["cell"] for c in cells] == ["normal-A-sequential-seed2", "slow-A-sequential-seed2"]

    with pytest.raises(SystemExit) as exc:
        main(["sequential", "--grid", "normal-A", "--seed", "1", "--out-dir", str(tmp_path)])
    assert exc.value.code == 2


def test_sequential_unknown_scenario_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sequential", "--scenario", "wild", "--seed", "1", "--out-dir", str(tmp_path)])
    assert exc.value.code == 2


def test_anneal_with_oracle(tmp_path, capsys):
    out = tmp_path / "anneal.json"
    argv = [
        "anneal", "--scenario", "normal", "--space", "12", "--size", "3",
        "--iterations", "25", "--criterion", "A", "--oracle",
        "--kept", "400", "--burn-in", "150", "--seed", "5",
        "--out", str(out), "--json",
    ]
    code, text, _ = run(argv, capsys)
    assert code == 0
    payload = json.loads(text)
    assert text == canonical_dumps(payload) + "\n"
    assert len(payload["best_design"]) == 3
    assert payload["best_energy"] >= payload["exhaustive_energy"]
    assert payload["relative_gap"] >= 0.0
    assert payload["energy_evaluations"] >= 1
    assert out.read_text() == canonical_dumps(payload) + "\n"

    code, repeat, _ = run(argv, capsys)
    assert repeat == text


def test_frequencies_table(tmp_path, capsys):
    out = tmp_path / "freq.csv"
    argv = [
        "frequencies", "--scenario", "normal", "--kind", "A",
        "--window", "5", "--season", "30", *MH_FLAGS,
        "--seed", "8", "--out", str(out), "--json",
    ]
    code, text, _ = run(argv, capsys)
    assert code == 0
    payload = json.loads(text)
    assert payload["window"] == [4, 5, 6, 7, 8]
    assert sum(row["probability"] for row in payload["rows"]) == 1.0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "day,score,probability"
    assert len(lines) == 6

    first = out.read_bytes()
    code, repeat, _ = run(argv, capsys)
    assert repeat == text
    assert out.read_bytes() == first


def test_frequencies_utility_kind(tmp_path, capsys):
    argv = [
        "frequencies", "--scenario", "normal", "--kind", "UI",
        "--replicates", "8", "--draws", "10", "--window", "4",
        "--season", "30", *MH_FLAGS, "--seed", "3", "--json",
    ]
    code, text, _ = run(argv, capsys)
    assert code == 0
    rows = json.loads(text)["rows"]
    assert len(rows) == 4
    assert sum(row["probability"] for row in rows) == 1.0


def test_replay_prints_snapshot(tmp_path, capsys):
    store = SessionStore(tmp_path / "data")
    cfg = SeqConfig(
        initial_days=(1, 2, 3), budget=5, window=4, season=30,
        mh=MHConfig(kept=500, burn_in=150),
    )
    state = create_session(store, cfg, seed=2, initial_observations=[(1, 9), (2, 12), (3, 15)])
    state = recommend_next(store, state.session_id)

    out = tmp_path / "snapshot.json"
    code, text, _ = run(
        ["replay", "--log", str(store.log_path(state.session_id)), "--out", str(out)], capsys
    )
    assert code == 0
    assert text.encode() == state.snapshot_bytes()
    assert out.read_bytes() == state.snapshot_bytes()


def test_replay_missing_log(tmp_path, capsys):
    code, out, err = run(["replay", "--log", str(tmp_path / "gone.jsonl")], capsys)
    assert code == 1
    envelope = json.loads(err)
    assert envelope["code"] == "io-error"
