"""Command-line entry points: run experiments, replay logs, compare runs,
and serve human-in-the-loop sessions."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import bundled_scenario_names, load_bundled_scenario
from . import agents as A
from . import harness as H
from . import world as W
from .config import AssistConfig, suite_config
from .planner import PlannerConfig

ASSISTANTS = ("goma", "nocomm", "heur", "goalag", "none")


def _apply_overrides(cfg: AssistConfig, args) -> AssistConfig:
    planner = cfg.planner
    pkw = {}
    if args.budget is not None:
        pkw["budget"] = args.budget
    if args.tau is not None:
        pkw["tau"] = args.tau
    if args.particles_k is not None:
        pkw["samples"] = args.particles_k
    if args.horizon is not None:
        pkw["horizon"] = args.horizon
    if pkw:
        planner = replace(planner, **pkw)
    kw = {"planner": planner}
    if args.comm_cost is not None:
        kw["comm_cost"] = args.comm_cost
    if args.hmax is not None:
        kw["h_max"] = args.hmax
    return replace(cfg, **kw)


def _load_scenario(name_or_path: str) -> H.Scenario:
    p = Path(name_or_path)
    if p.exists():
        return H.Scenario.from_file(p)
    if name_or_path in bundled_scenario_names():
        return load_bundled_scenario(name_or_path)
    raise SystemExit(f"unknown scenario {name_or_path!r}; bundled: "
                     + ", ".join(bundled_scenario_names()))


def _load_suite(path: str | None):
    """A suite file lists scenario names/paths, seeds, and config overrides."""
    if path is None or path == "default":
        names = [n for n in bundled_scenario_names()
                 if not n.startswith("tiny_")]
        return [load_bundled_scenario(n) for n in names], list(range(10)), \
            suite_config()
    with open(path) as fh:
        spec = json.load(fh)
    scenarios = [_load_scenario(s) for s in spec["scenarios"]]
    seeds = list(spec.get("seeds", range(10)))
    cfg = suite_config()
    overrides = spec.get("config", {})
    planner = replace(cfg.planner, **overrides.pop("planner", {}))
    cfg = replace(cfg, planner=planner, **overrides)
    return scenarios, seeds, cfg


def cmd_run(args) -> int:
    if args.scenario:
        scenario = _load_scenario(args.scenario)
        cfg = _apply_overrides(suite_config(), args)
        cond = H.SINGLE if args.assistant == "none" else args.assistant
        episode = H.run_episode(scenario, cond, args.seed, cfg)
        out = Path(args.out) if args.out else None
        line = (f"{scenario.name} {cond} seed={args.seed}: "
                f"{episode.outcome} in {episode.terminal_clock} steps, "
                f"{episode.utterance_count()} utterances")
        print(line)
        if out:
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"{scenario.name}__{cond}__{args.seed}.jsonl"
            path.write_text("\n".join(episode.to_json_lines()) + "\n")
            print(f"wrote {path}")
        return 0 if episode.outcome == "goal" else 1

    scenarios, seeds, cfg = _load_suite(args.suite)
    cfg = _apply_overrides(cfg, args)
    if args.seeds is not None:
        seeds = list(range(args.seeds))
    out = Path(args.out) if args.out else Path("suite_out")
    result = H.run_suite(scenarios, seeds, cfg, out_dir=out)
    print((out / "report.md").read_text())
    print(f"outputs in {out}/")
    return 0


def cmd_replay(args) -> int:
    lines = Path(args.log).read_text().splitlines()
    episode = H.EpisodeLog.from_json_lines(lines)
    scenario = _load_scenario(args.scenario or episode.scenario)
    terminal = H.replay(scenario, episode)
    ok = terminal.digest() == episode.terminal_digest
    print(f"{episode.scenario} {episode.condition} seed={episode.seed}: "
          f"{len(episode.records)} steps, outcome={episode.outcome}, "
          f"terminal digest {'matches' if ok else 'MISMATCH'}")
    return 0 if ok else 1


def cmd_compare(args) -> int:
    path = Path(args.dir) / "metrics.csv"
    if not path.exists():
        raise SystemExit(f"no metrics.csv under {args.dir}")
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    byfam: dict[tuple, list[float]] = {}
    for r in rows:
        fam = r["scenario"].split("_", 1)[0]
        byfam.setdefault((fam, r["condition"]), []).append(
            float(r["total_cost"]))
    print(f"{'family':<12}{'condition':<10}{'n':>4}{'mean total cost':>18}")
    for (fam, cond), costs in sorted(byfam.items()):
        print(f"{fam:<12}{cond:<10}{len(costs):>4}"
              f"{sum(costs) / len(costs):>18.2f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from .service import build_app
    scenarios = None
    if args.scenarios:
        paths = sorted(Path(args.scenarios).glob("*.json"))
        scenarios = [H.Scenario.from_file(p) for p in paths]
    app = build_app(scenarios=scenarios, out_dir=Path(args.out or "sessions"))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="goma")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one episode or a whole suite")
    run.add_argument("--suite", default=None,
                     help="suite JSON path, or 'default' for the bundled one")
    run.add_argument("--scenario", default=None,
                     help="single scenario name or path (overrides --suite)")
    run.add_argument("--assistant", choices=ASSISTANTS, default="goma")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--seeds", type=int, default=None,
                     help="number of suite seeds (default: suite file)")
    run.add_argument("--out", default=None)
    for flags in (run,):
        flags.add_argument("--budget", type=int, default=None)
        flags.add_argument("--tau", type=float, default=None)
        flags.add_argument("--particles-k", type=int, default=None)
        flags.add_argument("--horizon", type=int, default=None)
        flags.add_argument("--comm-cost", type=float, default=None)
        flags.add_argument("--hmax", type=float, default=None)
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("replay", help="re-simulate a logged episode")
    rep.add_argument("log")
    rep.add_argument("--scenario", default=None,
                     help="scenario name/path if not bundled")
    rep.set_defaults(func=cmd_replay)

    cmp_ = sub.add_parser("compare", help="summarize a suite output dir")
    cmp_.add_argument("dir")
    cmp_.set_defaults(func=cmd_compare)

    srv = sub.add_parser("serve", help="human-in-the-loop session server")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--scenarios", default=None,
                     help="directory of scenario JSON files")
    srv.add_argument("--out", default=None)
    srv.set_defaults(func=cmd_serve)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
