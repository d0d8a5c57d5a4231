"""Quadrotor force/torque model, rotor geometry, and camera mounts.

Rotor axes are body +z; rotor i sits at l_i * [sin(theta_i), cos(theta_i), 0]
in the body frame and contributes lift c_i * w_i^2 and counter-torque
spin_i * k_i * w_i^2 about body z.  Cameras mount either rigidly (fixed
joint) or on a two-axis gimbal (universal joint plus a PD servo); the
boresight is the camera body +x axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import cross3

from . import geometry as geo
from .errors import DanglingReference
from .world import FIXED, UNIVERSAL, Constraint, ForceElement, Marker, RigidBody

GRAVITY = 9.81


@dataclass
class UavSpec:
    mass: float = 0.28                                  # kg
    inertia: tuple = (1.40e-4, 1.40e-4, 2.17e-4)        # kg*m^2, diagonal
    arm_length: tuple = (0.096,) * 4                    # m
    rotor_angle: tuple = (np.pi / 4, 3 * np.pi / 4,
                          5 * np.pi / 4, 7 * np.pi / 4)  # rad from body +y
    lift_coeff: tuple = (2.88e-7,) * 4                  # N*s^2/rad^2
    torque_coeff: tuple = (7.24e-9,) * 4                # N*m*s^2/rad^2
    spin: tuple = (1, -1, 1, -1)
    omega_max: float = 2500.0                           # rad/s

    def __post_init__(self):
        if len(self.arm_length) != 4 or len(self.rotor_angle) != 4:
            raise ValueError("exactly four rotors are supported")
        if sorted(self.spin) != [-1, -1, 1, 1]:
            raise ValueError("spin directions must alternate for yaw authority")

    def rotor_positions(self):
        """Body-frame rotor centers d_i = l_i [sin t_i, cos t_i, 0]."""
        t = np.asarray(self.rotor_angle)
        return np.asarray(self.arm_length)[:, None] * np.column_stack(
            [np.sin(t), np.cos(t), np.zeros(4)])

    def wrench_map(self):
        """Cached 4x4 map from squared rotor speeds to [T, tau] (body z
        thrust, body torque)."""
        m = getattr(self, "_wrench_map", None)
        if m is None:
            m = np.zeros((4, 4))
            d = self.rotor_positions()
            for i in range(4):
                c = self.lift_coeff[i]
                m[0, i] = c
                m[1, i] = d[i, 1] * c
                m[2, i] = -d[i, 0] * c
                m[3, i] = self.spin[i] * self.torque_coeff[i]
            object.__setattr__(self, "_wrench_map", m)
        return m

    @property
    def hover_speed(self):
        """Rotor speed where 4 c w^2 = m g."""
        return float(np.sqrt(self.mass * GRAVITY / np.sum(self.lift_coeff)))

    @property
    def weight(self):
        return self.mass * GRAVITY


class RotorCommand:
    """Four rotor speeds clamped to [0, omega_max] at construction."""

    def __init__(self, omega, omega_max):
        self.omega = np.clip(np.asarray(omega, dtype=float), 0.0, omega_max)

    def __iter__(self):
        return iter(self.omega)


def thrust_and_torque(spec, cmd):
    """Body-frame thrust vector and torque for a rotor command.

    sigma = sum_i c_i w_i^2 along body z; tau combines the thrust moment
    arms d_i x (c_i w_i^2 z) with the signed counter-torques about z.
    """
    w2 = np.asarray(getattr(cmd, "omega", cmd), dtype=float) ** 2
    wrench = spec.wrench_map() @ w2
    sigma = np.array([0.0, 0.0, wrench[0]])
    return sigma, wrench[1:]


def rigid_derivative(state, sigma, tau, f_ext, spec):
    """Continuous-time derivative of (r, v, quat, omega) for the UAV.

    a = (A sigma + f_ext)/m, quat rate from the body rate, angular
    acceleration with the gyroscopic term.
    """
    r, v, q, w = state
    a_mat = geo.quat_to_mat(q)
    accel = (a_mat @ np.asarray(sigma) + np.asarray(f_ext)) / spec.mass
    qdot = 0.5 * geo.quat_mul(q, np.concatenate(([0.0], w)))
    inertia = np.diag(spec.inertia)
    wdot = np.linalg.solve(inertia, np.asarray(tau) - cross3(w, inertia @ w))
    return np.asarray(v, dtype=float), accel, qdot, wdot


class RotorElement(ForceElement):
    """Applies the current rotor command's wrench (plus optional linear
    drag) to a UAV body each substep."""

    def __init__(self, body_name, spec, drag_coeff=0.0):
        self.body_name = body_name
        self.spec = spec
        self.drag_coeff = drag_coeff
        self.command = RotorCommand(np.zeros(4), spec.omega_max)

    def set_command(self, cmd):
        self.command = cmd if isinstance(cmd, RotorCommand) else \
            RotorCommand(cmd, self.spec.omega_max)

    def apply(self, world):
        body = world.bodies[self.body_name]
        wrench = self.spec.wrench_map() @ (self.command.omega ** 2)
        body.force += geo.quat_to_mat(body.orientation)[:, 2] * wrench[0]
        body.torque += wrench[1:]
        if self.drag_coeff:
            body.force += -self.drag_coeff * body.velocity


@dataclass
class CameraBodyParams:
    mass: float = 0.02
    inertia: tuple = (2.17e-6, 4.83e-6, 5.67e-6)
    offset: tuple = (0.03, 0.0, -0.03)      # d_c, body frame of the UAV


class GimbalServo(ForceElement):
    """PD servo torque driving the camera about the gimbal's two free axes.

    Yaw rotates about the mount z-axis, pitch about the camera y-axis
    (boresight = camera +x; positive pitch tilts the boresight down).
    Setpoints are rate limited before tracking.
    """

    def __init__(self, uav_name, camera_name, kp=0.02, kd=6e-4,
                 rate_limit=3.0, pitch_range=(-np.pi / 2, np.pi / 2)):
        self.uav_name = uav_name
        self.camera_name = camera_name
        self.kp = kp
        self.kd = kd
        self.rate_limit = rate_limit
        self.pitch_range = pitch_range
        self.pitch = 0.0
        self.yaw = 0.0
        self.pitch_target = 0.0
        self.yaw_target = 0.0

    def set_target(self, pitch, yaw):
        self.pitch_target = float(np.clip(pitch, *self.pitch_range))
        self.yaw_target = float(((yaw + np.pi) % (2 * np.pi)) - np.pi)

    def advance_setpoint(self, dt):
        """Slew the commanded angles toward the targets at the rate limit."""
        step = self.rate_limit * dt
        self.pitch += np.clip(self.pitch_target - self.pitch, -step, step)
        err = ((self.yaw_target - self.yaw + np.pi) % (2 * np.pi)) - np.pi
        self.yaw += np.clip(err, -step, step)

    def angles_from_state(self, world):
        """Current (pitch, yaw) recovered from the relative orientation."""
        uav = world.bodies[self.uav_name]
        cam = world.bodies[self.camera_name]
        rel = uav.rotation().T @ cam.rotation()
        bore = rel[:, 0]
        return float(-np.arcsin(np.clip(bore[2], -1, 1))), \
            float(np.arctan2(bore[1], bore[0]))

    def desired_orientation(self, uav_rot):
        return uav_rot @ geo.rot_z(self.yaw) @ geo.rot_y(self.pitch)

    def apply(self, world):
        uav = world.bodies[self.uav_name]
        cam = world.bodies[self.camera_name]
        r_des = self.desired_orientation(uav.rotation())
        q_err = geo.quat_mul(geo.quat_conj(cam.orientation),
                             geo.mat_to_quat(r_des))
        if q_err[0] < 0:
            q_err = -q_err
        err_vec = 2.0 * q_err[1:]           # small-angle rotation vector
        w_rel = cam.angular_rate - cam.rotation().T @ (
            uav.rotation() @ uav.angular_rate)
        tau = self.kp * err_vec - self.kd * w_rel
        cam.torque += tau
        uav.torque += -(uav.rotation().T @ (cam.rotation() @ tau))


def mount_camera(world, uav_name, kind="fixed", params=None, servo_kwargs=None):
    """Add a camera body to a UAV via a fixed joint or a two-axis gimbal.

    Returns (camera_body, constraint, servo_or_None).  The camera frame
    coincides with the UAV body frame at zero gimbal angles, so the
    boresight starts parallel to the UAV body x-axis.
    """
    if uav_name not in world.bodies:
        raise DanglingReference(f"unknown UAV body {uav_name!r}")
    params = params or CameraBodyParams()
    uav = world.bodies[uav_name]
    cam_name = f"{uav_name}_cam"
    cam_pos = uav.position + uav.rotation() @ np.asarray(params.offset)
    cam = RigidBody(cam_name, params.mass, params.inertia,
                    position=cam_pos, velocity=uav.velocity.copy(),
                    orientation=uav.orientation.copy(),
                    angular_rate=uav.angular_rate.copy())
    world.add_body(cam)
    world.add_marker(Marker(f"{cam_name}_mnt_uav", uav_name,
                            local_offset=np.asarray(params.offset)))
    if kind == "fixed":
        world.add_marker(Marker(f"{cam_name}_mnt_cam", cam_name))
        c = world.add_constraint(Constraint(FIXED, f"{cam_name}_mnt_uav",
                                            f"{cam_name}_mnt_cam"))
        return cam, c, None
    if kind != "gimbal":
        raise ValueError(f"unknown camera mount kind {kind!r}")
    # universal joint: mount-marker z = UAV body z, camera-marker z = camera
    # body y, perpendicular for every (pitch, yaw) combination
    cam_marker_rot = np.column_stack([np.array([0.0, 0.0, 1.0]),
                                      np.array([1.0, 0.0, 0.0]),
                                      np.array([0.0, 1.0, 0.0])])
    world.add_marker(Marker(f"{cam_name}_mnt_cam", cam_name,
                            local_orientation=geo.mat_to_quat(cam_marker_rot)))
    c = world.add_constraint(Constraint(UNIVERSAL, f"{cam_name}_mnt_uav",
                                        f"{cam_name}_mnt_cam"))
    servo = GimbalServo(uav_name, cam_name, **(servo_kwargs or {}))
    world.add_force_element(servo)
    return cam, c, servo
