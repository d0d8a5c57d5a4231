"""Command-line entry point: validation suites, capture episodes, bridge.

Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
configuration error.  All emitted files land under ``--out``.  The
NETSIM_THREADS environment variable caps the numeric libraries' internal
parallelism (set before heavy imports).
"""
import os

_threads = os.environ.get("NETSIM_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse
import json
import sys

import numpy as np

from .config import ScenarioConfig, load_config
from .errors import ConfigError, NetsimError


def _parser():
    p = argparse.ArgumentParser(
        prog="netsim",
        description="Multi-UAV tethered-net capture simulator")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="run a module validation suite")
    v.add_argument("--suite", required=True,
                   choices=("rope", "contact", "uav", "perception"))
    v.add_argument("--out", default="netsim-out", help="output directory")
    v.add_argument("--json", action="store_true",
                   help="machine-readable report on stdout")

    c = sub.add_parser("capture", help="run one capture episode")
    c.add_argument("--config", default=None, help="YAML scenario config")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--policy", default="scripted",
                   choices=("scripted", "replay"))
    c.add_argument("--actions", default=None,
                   help="recorded action stream (JSON) for --policy replay")
    c.add_argument("--out", default="netsim-out")
    c.add_argument("--export-rate", type=float, default=50.0,
                   help="animation export rate, Hz")
    c.add_argument("--json", action="store_true")

    sub.add_parser("bridge",
                   help="serve the line-delimited JSON environment bridge")
    return p


def _report_out(report, as_json):
    if as_json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for line in report.lines():
            print(line)
        for path in report.files:
            print(f"wrote {path}")
    return 0 if report.passed else 1


def cmd_validate(args):
    from .validate import SUITES, suite_rope_dynamics
    os.makedirs(args.out, exist_ok=True)
    report = SUITES[args.suite](out_dir=args.out)
    if args.suite == "rope":
        dyn = suite_rope_dynamics(out_dir=args.out)
        report.checks.extend(dyn.checks)
        report.files.extend(dyn.files)
    return _report_out(report, args.json)


class _ReplayPolicy:
    """Feed a recorded per-step action stream back into the episode."""

    def __init__(self, path):
        with open(path) as fh:
            self.stream = json.load(fh)
        self.k = 0

    def __call__(self, observations):
        if self.k >= len(self.stream):
            raise NetsimError("action stream exhausted before episode end")
        acts = np.asarray(self.stream[self.k], dtype=float)
        self.k += 1
        return acts


def cmd_capture(args):
    from .capture import run_episode
    from .export import write_table

    cfg = load_config(args.config) if args.config else ScenarioConfig()
    os.makedirs(args.out, exist_ok=True)
    policy = None
    if args.policy == "replay":
        if not args.actions:
            raise ConfigError("--policy replay requires --actions")
        policy = _ReplayPolicy(args.actions)

    decision_hz = 1.0 / cfg.episode.decision_interval
    stride = max(1, int(round(decision_hz / args.export_rate)))
    animation = os.path.join(args.out, "animation.csv")
    distances = []

    def on_step(env, obs, rewards, info):
        tpos = env.world.bodies["target"].position
        row = [env.time]
        for name in env.scene["uav_names"]:
            row.append(float(np.linalg.norm(
                env.world.bodies[name].position - tpos)))
        distances.append(row)

    result, env = run_episode(cfg, seed=args.seed, policy=policy,
                              animation=animation, export_stride=stride,
                              on_step=on_step)
    reward_path = os.path.join(args.out, "rewards.csv")
    write_table(reward_path,
                ["step"] + [f"uav{i}" for i in range(env.n_agents)],
                [[k, *row] for k, row in enumerate(env.reward_log)])
    dist_path = os.path.join(args.out, "distances.csv")
    write_table(dist_path,
                ["time"] + [f"uav{i}" for i in range(env.n_agents)],
                distances)
    summary = {
        "outcome": result.outcome,
        "capture_time": (result.capture_time
                         if result.outcome == "captured" else None),
        "steps": result.steps,
        "seed": args.seed,
        "policy": args.policy,
        "cumulative_reward": result.cumulative_reward.tolist(),
        "reward_sum": float(np.sum(result.cumulative_reward)),
        "files": [animation, reward_path, dist_path],
    }
    summary_path = os.path.join(args.out, "summary.json")
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(f"outcome: {result.outcome} "
              f"(t={result.capture_time:.2f} s, {result.steps} steps)")
        for path in summary["files"] + [summary_path]:
            print(f"wrote {path}")
    return 0 if result.outcome == "captured" else 1


def cmd_bridge(_args):
    from .bridge import serve
    serve()
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "capture":
            return cmd_capture(args)
        return cmd_bridge(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
