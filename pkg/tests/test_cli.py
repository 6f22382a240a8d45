import json

import pandas as pd
import pytest

from crossvote.cli import main

TINY_CONFIG = """\
# two short training episodes on a small fleet
n_ns = 5
n_we = 3
horizon_steps = 20
hidden_dims = 8, 8
batch_size = 4
target_sync_every = 4
sample_demands = false
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "tiny.cfg"
    cfg.write_text(TINY_CONFIG, encoding="utf-8")
    ckpt = root / "checkpoints"
    for reward in ("stops", "wait"):
        code = main(["train", "--reward", reward, "--config", str(cfg), "--checkpoints", str(ckpt),
                     "--seed", "5", "--episodes", "2"])
        assert code == 0
    return root, cfg, ckpt


def test_unknown_reward_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["train", "--reward", "bogus"])
    assert exc.value.code == 1
    assert "invalid choice" in capsys.readouterr().err


def test_train_writes_checkpoint_curve_and_config(workspace):
    _, _, ckpt = workspace
    assert (ckpt / "stops.ckpt").is_file()
    curve = pd.read_csv(ckpt / "stops_curve.csv")
    assert list(curve["episode"]) == [0, 1]
    assert set(curve["demand"]) == {"ns5_we3"}
    effective = json.loads((ckpt / "stops_config.json").read_text())
    assert effective["hyperparams"]["seed"] == 5
    assert effective["scenario"]["seed"] == 5
    assert effective["hyperparams"]["hidden_dims"] == [8, 8]


def test_training_twice_gives_identical_bytes(workspace, tmp_path):
    _, cfg, ckpt = workspace
    again = tmp_path / "again"
    assert main(["train", "--reward", "stops", "--config", str(cfg), "--checkpoints", str(again),
                 "--seed", "5", "--episodes", "2"]) == 0
    assert (again / "stops.ckpt").read_bytes() == (ckpt / "stops.ckpt").read_bytes()


def test_zero_episodes(workspace, tmp_path):
    _, cfg, _ = workspace
    assert main(["train", "--reward", "cobb", "--config", str(cfg), "--checkpoints", str(tmp_path),
                 "--episodes", "0"]) == 0
    assert (tmp_path / "cobb.ckpt").stat().st_size > 0


def test_set_overrides_the_config_file(workspace, tmp_path, capsys):
    _, cfg, _ = workspace
    assert main(["train", "--reward", "wait", "--config", str(cfg), "--checkpoints", str(tmp_path),
                 "--episodes", "0", "--set", "gamma=0.5"]) == 0
    assert json.loads((tmp_path / "wait_config.json").read_text())["hyperparams"]["gamma"] == 0.5
    assert "effective config" in capsys.readouterr().out


def test_unknown_set_key_exits_1(tmp_path, capsys):
    code = main(["train", "--reward", "stops", "--checkpoints", str(tmp_path), "--set", "colour=red"])
    assert code == 1
    assert "unknown config key" in capsys.readouterr().err


def test_missing_checkpoint_exits_2(workspace, tmp_path, capsys):
    _, cfg, _ = workspace
    empty = tmp_path / "none"
    code = main(["run", "--policy", "stops", "--config", str(cfg), "--checkpoints", str(empty),
                 "--run-dir", str(tmp_path / "run")])
    assert code == 2
    assert str(empty / "stops.ckpt") in capsys.readouterr().err


def test_run_writes_trace_and_decisions(workspace, tmp_path):
    _, cfg, ckpt = workspace
    run_dir = tmp_path / "run"
    assert main(["run", "--policy", "multi", "--vote-rule", "majority", "--demands", "low_balanced",
                 "--config", str(cfg), "--checkpoints", str(ckpt), "--run-dir", str(run_dir)]) == 0
    assert len(pd.read_csv(run_dir / "trace.csv")) == 20
    decisions = pd.read_csv(run_dir / "decisions.csv")
    assert len(decisions) == 4
    assert set(decisions["scenario"]) == {"low_balanced"}
    metrics = pd.read_csv(run_dir / "metrics.csv")
    assert metrics.loc[0, "vote_rule"] == "majority"
    assert json.loads((run_dir / "effective_config.json").read_text())["scenario"]["n_ns"] == 11


def test_multi_without_vote_rule_exits_1(workspace, tmp_path):
    _, cfg, ckpt = workspace
    assert main(["run", "--policy", "multi", "--config", str(cfg), "--checkpoints", str(ckpt),
                 "--run-dir", str(tmp_path)]) == 1


def test_bad_sweep_arguments_exit_1(capsys):
    for argv in (["sweep", "--policies", "stops,fastest"],
                 ["sweep", "--vote-rule", "borda"],
                 ["sweep", "--seeds", "0"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1


def test_align_needs_input():
    assert main(["align"]) == 1
    assert main(["report"]) == 1


def test_sweep_align_report(workspace, tmp_path):
    _, cfg, ckpt = workspace
    run_dir = tmp_path / "sweep"
    common = ["--config", str(cfg), "--checkpoints", str(ckpt)]
    assert main(["sweep", "--policies", "stops,wait,multi", "--vote-rule", "proportional,majority",
                 "--seeds", "2", "--demands", "low_unbalanced,medium_balanced",
                 "--run-dir", str(run_dir)] + common) == 0

    per_seed = pd.read_csv(run_dir / "per_seed.csv")
    aggregate = pd.read_csv(run_dir / "aggregate.csv")
    assert len(per_seed) == 2 * 4 * 2
    assert len(aggregate) == 2 * 4
    radar = json.loads((run_dir / "radar.json").read_text())
    assert set(radar["low_unbalanced"]) == {"stops", "wait", "multi-proportional", "multi-majority"}
    decisions = pd.read_csv(run_dir / "decisions.csv")
    assert set(decisions["policy"]) == {"multi"}
    assert len(decisions) == 2 * 2 * 2 * 4

    assert main(["align", "--run-dir", str(run_dir)] + common) == 0
    agreement = pd.read_csv(run_dir / "agreement.csv")
    assert len(agreement) == 2 * 2 * 9
    assert set(agreement["bucket"]) == {"low", "medium"}

    assert main(["report", "--run-dir", str(run_dir)] + common) == 0
    markdown = (run_dir / "acceptance.md").read_text()
    assert markdown.startswith("# Acceptance Summary")
    assert "### Verdict" in markdown
    assert set(pd.read_csv(run_dir / "vote_rules.csv")["scenario"]) == {"low_unbalanced", "medium_balanced"}
