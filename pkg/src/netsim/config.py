"""Scenario configuration: YAML-backed, fully defaulted, strictly validated.

Every field of every section has a default, so an empty file (or dict) is
a runnable scenario; unknown keys are rejected by name so typos surface
immediately instead of silently running the defaults.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import yaml

from .contact import ContactParams
from .control import PidGains
from .errors import ConfigError
from .rope import NetSpec
from .uav import UavSpec


@dataclass
class TargetConfig:
    mass: float = 0.5                   # kg
    radius: float = 0.25                # m
    inertia_scale: float = 0.4          # solid-sphere factor 2/5
    initial_position: tuple = (0.0, 0.0, 12.0)
    initial_velocity: tuple = (0.0, 0.0, 0.0)
    motion: str = "free_fall"           # free_fall | maneuvering
    accel_max: float = 3.0              # m/s^2, maneuvering bound
    accel_hold: float = 0.5             # s between acceleration resamples

    def __post_init__(self):
        if self.mass <= 0 or self.radius <= 0:
            raise ConfigError("target mass and radius must be positive")
        if self.motion not in ("free_fall", "maneuvering"):
            raise ConfigError(f"unknown target motion {self.motion!r}")
        if self.accel_max < 0 or self.accel_hold <= 0:
            raise ConfigError("accel_max >= 0 and accel_hold > 0 required")


@dataclass
class PerceptionConfig:
    position_sigma: float = 0.0         # m, own-pose noise
    orientation_sigma: float = 0.0      # rad
    pixel_jitter: float = 0.0           # px
    miss_probability: float = 0.0
    target_radius_prior: float = 0.25   # m
    use_fused_target: bool = False      # else: truth passthrough w/ noise off

    def __post_init__(self):
        if not 0.0 <= self.miss_probability <= 1.0:
            raise ConfigError("miss_probability must be in [0, 1]")


@dataclass
class RewardConfig:
    """Table of shaping weights and reference scales.

    Weights multiply bounded unit terms; the weighted sum is exactly
    linear in these numbers.
    """
    w_distance: float = 1.2
    w_alignment: float = 0.6
    w_spin: float = 0.8
    w_effort: float = 0.1
    w_swing: float = 0.8
    w_safe: float = 0.5
    w_collision: float = 2.8
    w_stability: float = 4.5
    standoff: float = 1.5               # m, desired UAV-target distance
    spin_ref: float = 2.0               # rad/s full-penalty body rate
    swing_ref: float = 1.0              # m/s full-penalty attachment sway
    d_safe: float = 0.8                 # m, minimum inter-UAV separation

    def weights(self):
        return {name: getattr(self, name)
                for name in ("w_distance", "w_alignment", "w_spin", "w_effort",
                             "w_swing", "w_safe", "w_collision", "w_stability")}


@dataclass
class EpisodeConfig:
    dt: float = 1e-3                    # physics step, s
    decision_interval: float = 0.05     # s between env_step actions
    horizon: float = 30.0               # s
    capture_contacts: int = 8           # distinct net nodes touching
    capture_speed: float = 0.5          # m/s relative speed threshold
    capture_dwell: float = 1.0          # s predicate must hold
    escape_radius: float = 30.0         # m from formation centroid
    action_v_max: float = 3.0           # m/s setpoint bound
    action_yaw_rate_max: float = 1.0    # rad/s

    def __post_init__(self):
        if self.dt <= 0 or self.decision_interval < self.dt:
            raise ConfigError("need dt > 0 and decision_interval >= dt")
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")

    @property
    def steps_per_decision(self):
        return max(1, int(round(self.decision_interval / self.dt)))


@dataclass
class FormationConfig:
    n: int = 4
    radius: float = 1.6                 # m, circumradius of the square
    altitude: float = 10.0              # m
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError("at least 3 UAVs required (target fusion "
                              "needs 3 camera baselines)")


@dataclass
class ScenarioConfig:
    uavs: FormationConfig = field(default_factory=FormationConfig)
    uav_spec: UavSpec = field(default_factory=UavSpec)
    control: PidGains = field(default_factory=lambda: flyable_gains())
    net: NetSpec = None
    target: TargetConfig = field(default_factory=TargetConfig)
    contact: ContactParams = None
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    rewards: RewardConfig = field(default_factory=RewardConfig)
    episode: EpisodeConfig = field(default_factory=EpisodeConfig)
    seed: int = 0

    def __post_init__(self):
        if self.net is None:
            self.net = _default_net()
        if self.contact is None:
            self.contact = _default_contact()


def flyable_gains():
    """Softer cascade gains for the multi-body capture scene.

    The benchmark attitude gains saturate the rotors and relay-hunt at
    1 ms control steps; this set keeps the inner loop linear (about
    30 rad/s bandwidth, explicitly stable at dt = 1e-3) and adds enough
    position authority to haul the shared net.
    """
    return PidGains(kp_pos=(2.4, 2.4, 4.0), ki_pos=(0.4, 0.4, 0.8),
                    kd_pos=(1.6, 1.6, 2.4),
                    kp_att=(0.126, 0.126, 0.195), ki_att=(0.02, 0.02, 0.01),
                    kd_att=(0.0067, 0.0067, 0.0104))


def _default_net():
    """Flyable net: much lighter and softer than the crane-scale rig so
    four 280 g quadrotors can carry it and 1 ms steps stay stable."""
    from .rope import RopeSpec
    # stability at dt = 1e-3: a junction joins 4 segments, so it needs
    # sum(c) dt / m < 2 and omega dt < 1 with c = damping/s0, k = EA/s0
    cell = RopeSpec(total_length=0.8, segment_count=3, axial_stiffness=120.0,
                    linear_damping=0.5, total_mass=0.012, tension_only=True)
    return NetSpec(rows=4, cols=4, cell=cell)


def _default_contact():
    """Soft capture-scene contact (the stiff benchmark values need
    sub-microsecond steps; these stay stable at dt/5 substeps even on
    the lightest net nodes)."""
    return ContactParams(stiffness=1.0e3, max_penetration=1e-2, damping=10.0,
                         mu_s=0.8, mu_d=0.6, v_s=0.05, v_d=0.5)


_SECTION_TYPES = {
    "uavs": FormationConfig,
    "uav_spec": UavSpec,
    "control": PidGains,
    "net": None,                # nested: handled specially
    "target": TargetConfig,
    "contact": ContactParams,
    "perception": PerceptionConfig,
    "rewards": RewardConfig,
    "episode": EpisodeConfig,
}


def _build_section(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")
    try:
        return cls(**{k: tuple(v) if isinstance(v, list) else v
                      for k, v in data.items()})
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _build_net(data, path):
    from .rope import RopeSpec
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping")
    data = dict(data)
    cell_data = data.pop("cell", None)
    base = _default_net()
    cell = (_build_section(RopeSpec, cell_data, f"{path}.cell")
            if cell_data is not None else base.cell)
    names = {f.name for f in dataclasses.fields(NetSpec)} - {"cell"}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")
    merged = {name: getattr(base, name) for name in names}
    merged.update(data)
    try:
        return NetSpec(cell=cell, **merged)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_config(source):
    """Build a ScenarioConfig from a YAML path, YAML text, or dict."""
    if isinstance(source, ScenarioConfig):
        return source
    if isinstance(source, dict):
        data = source
    else:
        text = source
        try:
            import os
            if os.path.exists(str(source)):
                with open(source) as fh:
                    text = fh.read()
        except (OSError, ValueError):
            pass
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"config parse error: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be a mapping")
    unknown = set(data) - set(_SECTION_TYPES) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key == "seed":
            kwargs["seed"] = int(value)
        elif key == "net":
            kwargs["net"] = _build_net(value, "net")
        else:
            kwargs[key] = _build_section(_SECTION_TYPES[key], value, key)
    return ScenarioConfig(**kwargs)
