"""Cascaded position/attitude PID control with rotor allocation.

The outer loop turns position error (plus optional velocity/acceleration
feedforward from the reference) into a desired thrust vector; the tilt
construction points the body z-axis along it while honoring the yaw
reference.  The inner loop is a PID on the quaternion attitude error with
rate damping.  Allocation inverts the 4x4 map between squared rotor
speeds and the (thrust, torque) wrench, then saturates torque with
thrust priority.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import SingularAllocation
from .uav import GRAVITY, RotorCommand, thrust_and_torque


@dataclass
class PidGains:
    kp_pos: tuple = (0.4, 0.4, 1.25)            # N/m
    ki_pos: tuple = (0.05, 0.025, 0.05)         # N/(m*s)
    kd_pos: tuple = (0.2, 0.12, 0.5)            # N*s/m
    kp_att: tuple = (7.0e4, 7.0e4, 6.0e4)       # N*m/rad
    ki_att: tuple = (0.0, 0.0, 5.0e2)           # N*m/(rad*s)
    kd_att: tuple = (2.0e4, 2.0e4, 1.2e4)       # N*m*s/rad
    pos_integral_clamp: float = None            # N, defaults to 2 * hover thrust
    att_integral_clamp: float = 0.5             # N*m

    def __post_init__(self):
        for name in ("kp_pos", "ki_pos", "kd_pos",
                     "kp_att", "ki_att", "kd_att"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be three finite per-axis gains")
            setattr(self, name, arr)


@dataclass
class TrajectoryRef:
    """Position-and-yaw reference with optional derivatives.

    position(t) -> Vec3; yaw(t) -> rad.  velocity/acceleration default to
    finite differences of position so sampled references work unchanged.
    """
    position: callable
    yaw: callable = lambda t: 0.0
    velocity: callable = None
    acceleration: callable = None
    _fd_eps: float = 1e-4

    def vel(self, t):
        if self.velocity is not None:
            return np.asarray(self.velocity(t), dtype=float)
        e = self._fd_eps
        return (np.asarray(self.position(t + e)) - np.asarray(self.position(t - e))) / (2 * e)

    def acc(self, t):
        if self.acceleration is not None:
            return np.asarray(self.acceleration(t), dtype=float)
        e = self._fd_eps
        return (np.asarray(self.position(t + e)) - 2 * np.asarray(self.position(t))
                + np.asarray(self.position(t - e))) / (e * e)

    @staticmethod
    def hover(point, yaw=0.0):
        p = np.asarray(point, dtype=float)
        return TrajectoryRef(position=lambda t: p, yaw=lambda t: yaw,
                             velocity=lambda t: np.zeros(3),
                             acceleration=lambda t: np.zeros(3))

    @staticmethod
    def circle(center, radius, period, z=None, yaw=0.0):
        c = np.asarray(center, dtype=float)
        w = 2 * np.pi / period
        zz = c[2] if z is None else z

        def pos(t):
            return np.array([c[0] + radius * np.cos(w * t),
                             c[1] + radius * np.sin(w * t), zz])

        def vel(t):
            return np.array([-radius * w * np.sin(w * t),
                             radius * w * np.cos(w * t), 0.0])

        def acc(t):
            return np.array([-radius * w * w * np.cos(w * t),
                             -radius * w * w * np.sin(w * t), 0.0])

        return TrajectoryRef(position=pos, yaw=lambda t: yaw,
                             velocity=vel, acceleration=acc)


def allocation_matrix(spec):
    """4x4 map from squared rotor speeds to [T, tau_x, tau_y, tau_z]."""
    m = np.zeros((4, 4))
    d = spec.rotor_positions()
    z = np.array([0.0, 0.0, 1.0])
    for i in range(4):
        c = spec.lift_coeff[i]
        m[0, i] = c
        m[1:4, i] = np.cross(d[i], c * z)
        m[3, i] += spec.spin[i] * spec.torque_coeff[i]
    return m


class Allocator:
    """Thrust-priority allocation: exact wrench when feasible, otherwise
    the torque demand is scaled down uniformly to keep every squared
    speed within [0, omega_max^2] while preserving total thrust."""

    def __init__(self, spec):
        self.spec = spec
        self.matrix = allocation_matrix(spec)
        try:
            self.inverse = np.linalg.inv(self.matrix)
        except np.linalg.LinAlgError as exc:
            raise SingularAllocation("degenerate rotor geometry") from exc
        if np.linalg.cond(self.matrix) > 1e12:
            raise SingularAllocation("allocation matrix badly conditioned")
        self._w2_max = spec.omega_max ** 2
        self._thrust_cap = float(np.sum(spec.lift_coeff)) * self._w2_max

    def __call__(self, thrust, torque):
        w2_max = self._w2_max
        thrust = min(max(float(thrust), 0.0), self._thrust_cap)
        base = self.inverse[:, 0] * thrust
        delta = self.inverse[:, 1:] @ torque
        # largest s in [0, 1] with base + s*delta inside the box
        s = 1.0
        for b, d in zip(base.tolist(), delta.tolist()):
            if d > 1e-300:
                s = min(s, (w2_max - b) / d)
            elif d < -1e-300:
                s = min(s, -b / d)
        s = max(s, 0.0)
        w2 = np.clip(base + s * delta, 0.0, w2_max)
        cmd = RotorCommand.__new__(RotorCommand)
        cmd.omega = np.sqrt(w2)
        return cmd


def allocate(thrust, torque, spec):
    return Allocator(spec)(thrust, np.asarray(torque, dtype=float))


def desired_attitude(accel_des, yaw_des):
    """Tilt construction: body z along the required thrust direction,
    body x as close to the yaw heading as the tilt allows."""
    t = np.asarray(accel_des, dtype=float) + np.array([0.0, 0.0, GRAVITY])
    norm = np.sqrt(t @ t)
    zb = t / norm if norm > 1e-9 else np.array([0.0, 0.0, 1.0])
    xc = np.array([np.cos(yaw_des), np.sin(yaw_des), 0.0])
    yb = geo.cross3(zb, xc)
    n = np.sqrt(yb @ yb)
    if n < 1e-9:        # thrust parallel to heading; fall back to world y
        yb = geo.cross3(zb, np.array([0.0, 1.0, 0.0]))
        n = np.sqrt(yb @ yb)
    yb /= n
    xb = geo.cross3(yb, zb)
    return geo.mat_to_quat(np.column_stack([xb, yb, zb]))


class PositionLoop:
    """Outer PID: position error -> thrust magnitude + desired attitude."""

    def __init__(self, spec, gains):
        self.spec = spec
        self.gains = gains
        self.integral = np.zeros(3)
        clamp = gains.pos_integral_clamp
        self.integral_clamp = clamp if clamp is not None else 2.0 * spec.weight

    def reset(self):
        self.integral[:] = 0.0

    def update(self, position, velocity, ref_pos, ref_yaw, dt,
               ref_vel=None, ref_acc=None):
        g = self.gains
        err = np.asarray(ref_pos, dtype=float) - np.asarray(position, dtype=float)
        verr = (np.zeros(3) if ref_vel is None else np.asarray(ref_vel)) \
            - np.asarray(velocity, dtype=float)
        self.integral = np.clip(self.integral + err * dt,
                                -self.integral_clamp, self.integral_clamp)
        force = g.kp_pos * err + g.ki_pos * self.integral + g.kd_pos * verr
        accel_des = force / self.spec.mass
        if ref_acc is not None:
            accel_des = accel_des + np.asarray(ref_acc, dtype=float)
        thrust_vec = self.spec.mass * (accel_des + np.array([0.0, 0.0, GRAVITY]))
        thrust = float(np.sqrt(thrust_vec @ thrust_vec))
        return thrust, desired_attitude(accel_des, ref_yaw)


class AttitudeLoop:
    """Inner PID on the quaternion-error rotation vector, body frame."""

    def __init__(self, gains):
        self.gains = gains
        self.integral = np.zeros(3)
        self._last_err = None

    def reset(self):
        self.integral[:] = 0.0
        self._last_err = None

    def update(self, orientation, angular_rate, q_des, dt, rate_ff=None):
        g = self.gains
        q_err = geo.quat_mul(geo.quat_conj(orientation), q_des)
        if q_err[0] < 0:
            q_err = -q_err
        err = 2.0 * q_err[1:]
        self.integral = np.clip(self.integral + err * dt,
                                -g.att_integral_clamp, g.att_integral_clamp)
        w_err = (np.zeros(3) if rate_ff is None else np.asarray(rate_ff)) \
            - np.asarray(angular_rate, dtype=float)
        return g.kp_att * err + g.ki_att * self.integral + g.kd_att * w_err


class CascadeController:
    """Position + attitude loops + allocation for one UAV.

    update() consumes a (possibly estimated) body state and the reference
    at time t and returns a RotorCommand; the desired-attitude stream is
    finite-differenced for a body-rate feedforward into the inner loop.
    """

    def __init__(self, spec, gains=None, thrust_headroom=0.08):
        self.spec = spec
        self.gains = gains or PidGains()
        self.position_loop = PositionLoop(spec, self.gains)
        self.attitude_loop = AttitudeLoop(self.gains)
        self.allocator = Allocator(spec)
        # never command the full collective: a fully saturated rotor set
        # has zero differential torque left and the vehicle tips over
        self.thrust_limit = (1.0 - thrust_headroom) * self.allocator._thrust_cap
        self._q_des_prev = None

    def reset(self):
        self.position_loop.reset()
        self.attitude_loop.reset()
        self._q_des_prev = None

    def update(self, position, velocity, orientation, angular_rate,
               ref, t, dt):
        thrust, q_des = self.position_loop.update(
            position, velocity, ref.position(t), ref.yaw(t), dt,
            ref_vel=ref.vel(t), ref_acc=ref.acc(t))
        thrust = min(thrust, self.thrust_limit)
        rate_ff = np.zeros(3)
        if self._q_des_prev is not None:
            dq = geo.quat_mul(geo.quat_conj(self._q_des_prev), q_des)
            if dq[0] < 0:
                dq = -dq
            rate_ff = 2.0 * dq[1:] / dt
        self._q_des_prev = q_des
        torque = self.attitude_loop.update(orientation, angular_rate,
                                           q_des, dt, rate_ff=rate_ff)
        return self.allocator(thrust, torque)


@dataclass
class TrackingLog:
    time: list = field(default_factory=list)
    reference: list = field(default_factory=list)
    actual: list = field(default_factory=list)
    error: list = field(default_factory=list)
    reached: list = field(default_factory=list)

    def rms_error(self, t_min=0.0):
        t = np.asarray(self.time)
        e = np.asarray(self.error)
        sel = t >= t_min
        return float(np.sqrt(np.mean(e[sel] ** 2)))


def track(world, uav_name, rotor_element, ref, gains=None, duration=10.0,
          control_rate=None, reach_pos_tol=0.05, reach_yaw_tol=0.05,
          log_rate=1000.0):
    """Run the cascade on one UAV in a world for a duration; returns a log.

    The controller runs at control_rate (default: every physics step)
    with zero-order hold between ticks; the log flags steps where
    position and yaw errors are inside the reached/hovering thresholds.
    The saturated inner loop holds attitude only to ~tau_max*dt_c*kd/
    (2*J*kp) rad, so a coarse control period costs tracking accuracy.
    """
    body = world.bodies[uav_name]
    ctl = CascadeController(rotor_element.spec, gains)
    dt = world.config.dt
    every = 1 if control_rate is None else max(1, int(round(1.0 / (control_rate * dt))))
    dt_c = every * dt
    log_every = max(1, int(round(1.0 / (log_rate * dt))))
    n = int(round(duration / dt))
    log = TrackingLog()
    for i in range(n):
        if i % every == 0:
            cmd = ctl.update(body.position, body.velocity, body.orientation,
                             body.angular_rate, ref, world.time, dt_c)
            rotor_element.set_command(cmd)
        world.step()
        if (i + 1) % log_every:
            continue
        r_d = np.asarray(ref.position(world.time))
        err = float(np.linalg.norm(body.position - r_d))
        yaw_act = np.arctan2(body.rotation()[1, 0], body.rotation()[0, 0])
        yaw_err = abs(((ref.yaw(world.time) - yaw_act + np.pi) % (2 * np.pi)) - np.pi)
        log.time.append(world.time)
        log.reference.append(r_d)
        log.actual.append(body.position.copy())
        log.error.append(err)
        log.reached.append(err <= reach_pos_tol and yaw_err <= reach_yaw_tol)
    return log
