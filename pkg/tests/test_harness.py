"""Experiment harness: metrics, episodes, suite outputs, replay."""
import json
from dataclasses import replace

import pytest

import goma.harness as H
import goma.world as W
from goma import load_bundled_scenario


def test_speedup_formula():
    assert H.speedup(30, 20) == pytest.approx(0.5)
    assert H.speedup(20, 20) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        H.speedup(30, 0)
    with pytest.raises(ValueError):
        H.speedup(0, 20)


def test_total_cost_formula():
    assert H.total_cost(10, 2, []) == 12
    assert H.total_cost(12, 2, [8, 10]) == 20
    with pytest.raises(ValueError):
        H.total_cost(10, 0, [12])


def test_total_cost_lower_bound():
    # total cost >= L, equality iff no utterances and no hot items
    assert H.total_cost(15, 0, []) == 15
    assert H.total_cost(15, 1, []) > 15
    assert H.total_cost(15, 0, [10]) > 15


def test_episode_log_round_trip(fast_cfg, tiny_household):
    log = H.run_episode(tiny_household, "goma", 3, fast_cfg, t_max=25)
    lines = log.to_json_lines()
    back = H.EpisodeLog.from_json_lines(lines)
    assert back.to_json_lines() == lines
    assert back.terminal_digest == log.terminal_digest


def test_replay_fidelity(fast_cfg, tiny_household):
    for condition in ("single", "goma"):
        log = H.run_episode(tiny_household, condition, 1, fast_cfg, t_max=25)
        terminal = H.replay(tiny_household, log)
        assert terminal.digest() == log.terminal_digest


def test_seed_determinism_byte_identical(fast_cfg, tiny_household):
    a = H.run_episode(tiny_household, "goma", 5, fast_cfg, t_max=25)
    b = H.run_episode(tiny_household, "goma", 5, fast_cfg, t_max=25)
    assert a.to_json_lines() == b.to_json_lines()


def test_unknown_condition_rejected(fast_cfg, tiny_household):
    with pytest.raises(ValueError):
        H.run_episode(tiny_household, "telepathy", 0, fast_cfg)


def test_suite_cardinality_and_outputs(fast_cfg, tiny_household, tmp_path):
    out = H.run_suite([tiny_household], [0, 1, 2], fast_cfg,
                      conditions={"tiny_household": ["single", "nocomm"]},
                      out_dir=tmp_path, t_max=25)
    rows = out["rows"]
    assert len(rows) == 6  # 1 scenario x 2 conditions x 3 seeds
    metrics = (tmp_path / "metrics.csv").read_text().splitlines()
    assert metrics[0] == H.METRICS_HEADER
    assert len(metrics) == 7
    assert (tmp_path / "report.md").exists()
    logs = sorted(p.name for p in (tmp_path / "episodes").iterdir())
    assert len(logs) == 6


def test_suite_report_byte_identical(fast_cfg, tiny_household, tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        H.run_suite([tiny_household], [0, 1], fast_cfg,
                    conditions={"tiny_household": ["single", "goma"]},
                    out_dir=d, t_max=25)
    for name in ("metrics.csv", "report.md"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_metrics_match_episode_logs(fast_cfg, tiny_household, tmp_path):
    out = H.run_suite([tiny_household], [0], fast_cfg,
                      conditions={"tiny_household": ["single", "goma"]},
                      out_dir=tmp_path, t_max=25)
    by_cond = {r.condition: r for r in out["rows"]}
    log = next(e for e in out["logs"] if e.condition == "goma")
    row = by_cond["goma"]
    utter = log.utterance_count()
    hot = [t for t in log.hot_completions.values()]
    steps = row.steps
    assert row.utterances == utter
    assert row.total_cost == H.total_cost(steps, utter, hot)
    assert row.speedup == pytest.approx(
        H.speedup(by_cond["single"].steps, steps))


def test_sign_test_extremes():
    assert H.sign_test([(1, 2)] * 8) < 0.05
    assert H.sign_test([(2, 1)] * 8) > 0.5
    assert H.sign_test([(1, 1), (1, 1)]) == 1.0
