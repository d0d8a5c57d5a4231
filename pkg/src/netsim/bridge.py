"""Line-delimited JSON bridge exposing the capture environment.

One request per line on stdin, one response per line on stdout.  Ops:

- ``{"op": "manifest"}`` -> array-layout manifest for the current config
- ``{"op": "reset", "seed": 0, "config": {...}?}`` -> observations
- ``{"op": "step", "actions": [[...], ...]}`` -> observations, rewards,
  done, info (with per-term reward breakdowns)
- ``{"op": "close"}`` -> acknowledges and exits

Responses carry ``"ok": true`` or ``"ok": false`` with the error type
and message.  Numbers are emitted with full float precision so an
out-of-process consumer sees bit-identical values.
"""
from __future__ import annotations

import json
import sys

import numpy as np

from . import __version__
from .capture import CaptureEnv
from .config import load_config
from .errors import NetsimError


def layout_manifest(env):
    """Array layouts an out-of-process consumer must agree on."""
    return {
        "version": __version__,
        "n_agents": env.n_agents,
        "observation_dim": env.observation_dim,
        "action_dim": env.action_dim,
        "observation_layout": [[name, width]
                               for name, width in env.observation_layout()],
        "action_layout": [["velocity_setpoint", 3], ["yaw_rate", 1]],
        "reward_weights": env.cfg.rewards.weights(),
    }


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value)!r}")


def _dumps(payload):
    return json.dumps(payload, default=_json_default)


class BridgeServer:
    """Stateful request handler; one environment per server."""

    def __init__(self):
        self.env = None

    def handle(self, request):
        op = request.get("op")
        if op == "manifest":
            env = self.env or CaptureEnv()
            return {"ok": True, "manifest": layout_manifest(env)}
        if op == "reset":
            cfg = load_config(request["config"]) if "config" in request else None
            self.env = CaptureEnv(cfg, seed=int(request.get("seed", 0)))
            return {"ok": True,
                    "observations": [o.tolist() for o in self.env.observe()]}
        if op == "step":
            if self.env is None:
                raise NetsimError("step before reset")
            actions = np.asarray(request["actions"], dtype=float)
            if not np.all(np.isfinite(actions)):
                raise NetsimError("actions must be finite")
            obs, rewards, done, info = self.env.step(actions)
            return {"ok": True,
                    "observations": [o.tolist() for o in obs],
                    "rewards": [r.weighted_sum for r in rewards],
                    "done": bool(done),
                    "info": {**info,
                             "reward_terms": [r.terms for r in rewards]}}
        if op == "close":
            return {"ok": True, "closed": True}
        raise NetsimError(f"unknown op {op!r}")


def serve(stdin=None, stdout=None):
    """Run the request loop until EOF or a close op."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    server = BridgeServer()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            response = server.handle(json.loads(line))
        except Exception as exc:              # report, never crash the pipe
            response = {"ok": False, "error": str(exc),
                        "type": type(exc).__name__}
        stdout.write(_dumps(response) + "\n")
        stdout.flush()
        if response.get("closed"):
            break


def main():
    serve()


if __name__ == "__main__":
    main()
