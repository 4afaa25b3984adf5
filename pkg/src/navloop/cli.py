"""Command line entry points.

    navloop simulate --scenario <file> --agents <file> --out <dir> --seed <n>
    navloop analyze  --in <dir> --out <dir> [--grid 0:30:0.1] [--min-trial-duration 0.5]
    navloop serve    --settings-dir <dir> --listen <addr:port> --out <dir> [--autopilot <file>]
    navloop demo-settings --out <dir>

simulate reads a scenario bundle (one JSON object holding environment,
locomotion, and scenario sections) plus an agents file, runs every agent
through a full session, and writes one archive per agent under --out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agents import (
    agent_spec_from_dict,
    cohort_specs,
    run_cohort,
)
from .analysis import DEFAULT_GRID, DEFAULT_MIN_TRIAL_DURATION, run_analysis
from .persistence import canonical_json, parse_settings
from .scoring import LeaderboardMode
from .service import OperatorService, load_autopilot_plan
from .settings import (
    ACCURACY_GROUP_CONSTANTS,
    TIME_GROUP_CONSTANTS,
    demo_environment,
    demo_locomotion,
    demo_scenario,
    validate_settings,
)


def _parse_grid(spec: str) -> tuple[float, float, float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like start:end:step, got '{spec}'")
    try:
        start, end, step = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid values must be numbers: {exc}") from exc
    if step <= 0 or end < start:
        raise argparse.ArgumentTypeError(f"bad grid range '{spec}'")
    return start, end, step


def _parse_listen(spec: str) -> tuple[str, int]:
    host, sep, port = spec.rpartition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"listen must look like addr:port, got '{spec}'")
    try:
        return host or "127.0.0.1", int(port)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad port in '{spec}'") from exc


def load_bundle(path: Path):
    """A bundle file holds the three settings sections in one document."""
    data = json.loads(path.read_text(encoding="utf-8"))
    env = parse_settings(json.dumps(data.get("environment", {})), "environment").value
    loco = parse_settings(json.dumps(data.get("locomotion", {})), "locomotion").value
    scen = parse_settings(json.dumps(data.get("scenario", {})), "scenario").value
    return env, loco, scen


def cmd_simulate(args: argparse.Namespace) -> int:
    env, loco, scen = load_bundle(Path(args.scenario))
    report = validate_settings(env, loco, scen)
    if report:
        for line in report:
            print(f"invalid settings: {line}", file=sys.stderr)
        return 2
    agents_data = json.loads(Path(args.agents).read_text(encoding="utf-8"))
    specs = [agent_spec_from_dict(a) for a in agents_data["agents"]]
    mode = LeaderboardMode(agents_data.get("leaderboard_mode", "Fake"))
    dirs = run_cohort(specs, env, loco, scen, args.out, seed=args.seed, leaderboard_mode=mode)
    print(f"wrote {len(dirs)} session archives under {args.out}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    outputs = run_analysis(
        args.in_dir,
        args.out,
        grid_spec=args.grid,
        min_trial_duration=args.min_trial_duration,
    )
    for name, path in outputs.items():
        print(f"{name}: {path}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    host, port = args.listen
    plan = load_autopilot_plan(args.autopilot) if args.autopilot else None
    service = OperatorService(
        settings_dir=args.settings_dir,
        out_dir=args.out,
        host=host,
        port=port,
        autopilot=plan,
        realtime=not args.no_realtime,
    )
    service.start()
    print(f"listening on {service.host}:{service.port}", flush=True)
    try:
        while True:
            import time

            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        service.stop()
    return 0


def write_demo_settings(out_dir: Path) -> list[Path]:
    """Write the demo settings triplet, a simulate bundle, and an agents file."""
    out_dir.mkdir(parents=True, exist_ok=True)
    env = demo_environment()
    loco = demo_locomotion()
    scen = demo_scenario()
    written = []
    for name, payload in (
        ("demo.environment.json", env.to_dict()),
        ("demo.locomotion.json", loco.to_dict()),
        ("demo.scenario.json", scen.to_dict()),
        (
            "demo_bundle.json",
            {
                "environment": env.to_dict(),
                "locomotion": loco.to_dict(),
                "scenario": scen.to_dict(),
            },
        ),
        (
            "demo_agents.json",
            {
                "leaderboard_mode": "Fake",
                "agents": [
                    {
                        "id": spec.participant.id,
                        "group": spec.participant.group,
                        "kind": spec.policy.kind,
                        "policy": {
                            "observation_noise": spec.policy.observation_noise,
                            "stop_radius": spec.policy.stop_radius,
                            "observe_ticks": spec.policy.observe_ticks,
                            "speed_preference": spec.policy.speed_preference,
                        },
                        "score": spec.score.to_dict() if spec.score else None,
                    }
                    for spec in cohort_specs(
                        10,
                        [
                            ("time", TIME_GROUP_CONSTANTS),
                            ("accuracy", ACCURACY_GROUP_CONSTANTS),
                        ],
                    )
                ],
            },
        ),
    ):
        path = out_dir / name
        path.write_text(canonical_json(payload), encoding="utf-8")
        written.append(path)
    return written


def cmd_demo_settings(args: argparse.Namespace) -> int:
    for path in write_demo_settings(Path(args.out)):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="navloop")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run simulated participants through sessions")
    sim.add_argument("--scenario", required=True, help="bundle file with the three settings sections")
    sim.add_argument("--agents", required=True, help="agents file")
    sim.add_argument("--out", required=True, help="output directory for session archives")
    sim.add_argument("--seed", required=True, type=int, help="base seed for the whole run")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="aggregate archives into tables")
    ana.add_argument("--in", dest="in_dir", required=True, help="directory of session archives")
    ana.add_argument("--out", required=True, help="output directory for tables")
    ana.add_argument("--grid", type=_parse_grid, default=DEFAULT_GRID, help="time grid start:end:step")
    ana.add_argument(
        "--min-trial-duration",
        type=float,
        default=DEFAULT_MIN_TRIAL_DURATION,
        help="trials shorter than this count as accidental presses (seconds)",
    )
    ana.set_defaults(func=cmd_analyze)

    srv = sub.add_parser("serve", help="run the live operator service")
    srv.add_argument("--settings-dir", required=True, help="directory of named settings files")
    srv.add_argument("--listen", required=True, type=_parse_listen, help="addr:port to bind")
    srv.add_argument("--out", required=True, help="output directory for session archives")
    srv.add_argument("--autopilot", help="autopilot plan file")
    srv.add_argument(
        "--no-realtime",
        action="store_true",
        help="run ticks as fast as possible instead of pacing to real time",
    )
    srv.set_defaults(func=cmd_serve)

    demo = sub.add_parser("demo-settings", help="write the bundled demo settings files")
    demo.add_argument("--out", required=True, help="directory to write into")
    demo.set_defaults(func=cmd_demo_settings)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
