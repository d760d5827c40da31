"""Command-line entry point.

Verbs: validate, run, sweep, serve, replay. Exit codes: 0 success, 2 config
violations, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import SwarmAmpError
from .harness import run_experiment, run_sweep, validate_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmamp",
        description="Human-swarm joint-agent simulator and competence evaluation harness.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_validate = sub.add_parser("validate", help="check a config file, listing every violation")
    p_validate.add_argument("--config", required=True)

    p_run = sub.add_parser("run", help="run the three-arm experiment from a config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, help="override the config root seed")
    p_run.add_argument("--out", help="override the output directory")
    p_run.add_argument("--workers", type=int, help="worker processes (default from config)")
    p_run.add_argument("--episodes", type=int, help="override episodes per arm")

    p_sweep = sub.add_parser("sweep", help="brittleness sweep over one situation variable")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--axis", required=True)
    p_sweep.add_argument("--arm", default="joint")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--workers", type=int)
    p_sweep.add_argument("--episodes", type=int, help="episodes per sweep cell")

    p_serve = sub.add_parser("serve", help="serve a live session over WebSocket")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--port", type=int, default=None, help="default: SWARM_BRIDGE_PORT or 8765")
    p_serve.add_argument("--tick-rate", type=float, default=20.0)
    p_serve.add_argument("--seed", type=int, default=None)
    p_serve.add_argument("--ui-dir", default=None, help="also serve this static UI directory over HTTP")
    p_serve.add_argument("--ui-port", type=int, default=None, help="default: bridge port + 1")

    p_replay = sub.add_parser("replay", help="re-run a trace file and verify determinism")
    p_replay.add_argument("trace")
    p_replay.add_argument("--config", required=True)
    p_replay.add_argument("--arm", default=None, help="default: inferred from the file name")

    return parser


def _load(path: str):
    config, violations = validate_config(Path(path).read_text())
    if violations:
        for v in violations:
            print(f"violation: {v}", file=sys.stderr)
    return config, violations


def cmd_validate(args) -> int:
    config, violations = _load(args.config)
    if violations:
        return 2
    print(f"config ok: scenario={config.scenario} episodes={config.episodes} space={config.space_id}")
    return 0


def cmd_run(args) -> int:
    config, violations = _load(args.config)
    if violations:
        return 2
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.episodes is not None:
        config = replace(config, episodes=args.episodes)
    result = run_experiment(config, workers=args.workers, out_dir=args.out)
    for arm in ("nat", "arti", "joint"):
        rp = result.reports[arm]
        print(
            f"{arm:>5}: p_hat={rp.p_hat:.4f} ci=[{rp.ci[0]:.4f},{rp.ci[1]:.4f}] "
            f"r={rp.r:.4f} c_hat={rp.c_hat:.4f} aborted={rp.aborted}"
        )
    print(f"verdict: {result.verdict.verdict}")
    for path in result.files:
        print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    config, violations = _load(args.config)
    if violations:
        return 2
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    bmap, files = run_sweep(
        config,
        args.axis,
        arm=args.arm,
        per_cell_n=args.episodes,
        out_dir=args.out,
        workers=args.workers,
    )
    for value, rp in bmap.cells:
        print(f"{args.axis}={value}: c_hat={rp.c_hat:.4f} ci=[{rp.c_ci[0]:.4f},{rp.c_ci[1]:.4f}]")
    for cliff in bmap.cliffs:
        print(
            f"cliff between cells {cliff.left_index + 1} and {cliff.right_index + 1}: "
            f"delta={cliff.delta:.3f}"
        )
    for path in files:
        print(f"wrote {path}")
    return 0


def cmd_serve(args) -> int:
    config, violations = _load(args.config)
    if violations:
        return 2
    from .server import serve_forever

    serve_forever(
        config,
        port=args.port,
        tick_rate=args.tick_rate,
        seed=args.seed,
        ui_dir=args.ui_dir,
        ui_port=args.ui_port,
    )
    return 0


def cmd_replay(args) -> int:
    config, violations = _load(args.config)
    if violations:
        return 2
    from .replay import replay_trace

    arm = args.arm
    if arm is None:
        stem = Path(args.trace).stem
        arm = stem.split("_")[0]
    ok, message = replay_trace(config, args.trace, arm)
    print(message)
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "run": cmd_run,
        "sweep": cmd_sweep,
        "serve": cmd_serve,
        "replay": cmd_replay,
    }
    try:
        return handlers[args.verb](args)
    except SwarmAmpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
