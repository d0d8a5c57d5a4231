"""Simulated sensing: IMU, noisy-pose estimates, geometric target
detection, gimbal tracking, size-based ranging, and multi-view fusion.

No pixels are rendered; detections come from projecting the target's
bounding sphere through a pinhole camera whose boresight is the camera
body +x axis.  All stochastic pieces draw from caller-provided numpy
Generators so streams replay bit-identically from seeds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import (DegenerateBox, DegenerateGeometry,
                     InsufficientObservations)


# ------------------------------------------------------------------- IMU

@dataclass
class ImuSpec:
    accel_noise_density: float = 2.0e-3     # m s^-2 Hz^-0.5
    gyro_noise_density: float = 1.0e-4      # rad s^-1 Hz^-0.5
    accel_bias_drift: float = 1.0e-4        # random-walk intensity
    gyro_bias_drift: float = 1.0e-6
    sample_rate: float = 200.0              # Hz

    def __post_init__(self):
        if min(self.accel_noise_density, self.gyro_noise_density,
               self.accel_bias_drift, self.gyro_bias_drift) < 0:
            raise ValueError("noise parameters must be non-negative")


@dataclass
class ImuSample:
    specific_force: np.ndarray
    angular_rate: np.ndarray
    timestamp: float


class ImuModel:
    """Additive white noise (density * sqrt(rate)) plus bias random walks."""

    def __init__(self, spec, rng):
        self.spec = spec
        self.rng = rng
        self.accel_bias = np.zeros(3)
        self.gyro_bias = np.zeros(3)
        self._t = 0.0

    def sample(self, true_specific_force, true_angular_rate):
        s = self.spec
        dt = 1.0 / s.sample_rate
        sqrt_dt = np.sqrt(dt)
        self.accel_bias = self.accel_bias + s.accel_bias_drift * sqrt_dt * self.rng.standard_normal(3)
        self.gyro_bias = self.gyro_bias + s.gyro_bias_drift * sqrt_dt * self.rng.standard_normal(3)
        accel = (np.asarray(true_specific_force, dtype=float)
                 + s.accel_noise_density * np.sqrt(s.sample_rate) * self.rng.standard_normal(3)
                 + self.accel_bias)
        gyro = (np.asarray(true_angular_rate, dtype=float)
                + s.gyro_noise_density * np.sqrt(s.sample_rate) * self.rng.standard_normal(3)
                + self.gyro_bias)
        self._t += dt
        return ImuSample(accel, gyro, self._t)


def imu_sample(true_specific_force, true_angular_rate, spec, rng):
    """One-shot sampling helper (stateless bias: starts at zero)."""
    return ImuModel(spec, rng).sample(true_specific_force, true_angular_rate)


# --------------------------------------------------------- pose estimation

@dataclass
class VioNoiseConfig:
    position_sigma: float = 0.0         # m, white
    orientation_sigma: float = 0.0      # rad, small-angle white
    drift_rate: float = 0.0             # m / sqrt(s), position bias walk


@dataclass
class PoseEstimate:
    position: np.ndarray
    orientation: np.ndarray
    covariance: np.ndarray
    timestamp: float


class PoseEstimator:
    """Noisy-pose stand-in for visual-inertial odometry."""

    def __init__(self, config, rng, dt=0.05):
        self.config = config
        self.rng = rng
        self.dt = dt
        self.bias = np.zeros(3)

    def estimate(self, true_position, true_orientation, timestamp=0.0):
        c = self.config
        if c.drift_rate > 0:
            self.bias = self.bias + c.drift_rate * np.sqrt(self.dt) * self.rng.standard_normal(3)
        pos = np.asarray(true_position, dtype=float) + self.bias
        if c.position_sigma > 0:
            pos = pos + c.position_sigma * self.rng.standard_normal(3)
        q = np.asarray(true_orientation, dtype=float)
        if c.orientation_sigma > 0:
            q = geo.quat_mul(q, geo.quat_exp_map(
                c.orientation_sigma * self.rng.standard_normal(3)))
        cov = np.eye(3) * (c.position_sigma ** 2 + self.bias @ self.bias / 3.0)
        return PoseEstimate(pos, geo.quat_normalize(q), cov, timestamp)


def estimate_pose(true_position, true_orientation, config, rng):
    return PoseEstimator(config, rng).estimate(true_position, true_orientation)


# --------------------------------------------------------------- detection

@dataclass
class CameraSpec:
    focal_length: float = 50.0          # mm
    sensor_size: tuple = (36.0, 24.0)   # mm
    resolution: tuple = (1920, 1080)    # px
    principal_point: tuple = (960.0, 540.0)
    distortion: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.focal_length <= 0:
            raise ValueError("focal length must be positive")

    @property
    def f_px(self):
        """Horizontal focal length in pixels, f * W / s_x."""
        return self.focal_length * self.resolution[0] / self.sensor_size[0]

    @property
    def f_px_y(self):
        return self.focal_length * self.resolution[1] / self.sensor_size[1]


@dataclass
class Detection:
    center: tuple               # (u, v) px
    size: tuple                 # (w, h) px
    confidence: float
    timestamp: float


@dataclass
class DetectionNoise:
    pixel_jitter: float = 0.0   # px, gaussian on the box center
    miss_probability: float = 0.0


def project_target(camera_position, camera_rotation, spec, target_center,
                   target_radius, timestamp=0.0, noise=None, rng=None):
    """Geometric detection stand-in: project the target's bounding sphere.

    Returns None when the target is behind the camera or outside the
    frustum.  Image u grows to the camera's right (-y body), v grows
    downward (-z body); box width and height both use the horizontal
    pixel focal length so the box of a sphere stays square.
    """
    if target_radius <= 0:
        raise ValueError("target radius must be positive")
    p = np.asarray(camera_rotation).T @ (np.asarray(target_center, dtype=float)
                                         - np.asarray(camera_position, dtype=float))
    depth = p[0]
    if depth <= target_radius:
        return None
    w_img, h_img = spec.resolution
    u = spec.principal_point[0] + spec.f_px * (-p[1] / depth)
    v = spec.principal_point[1] + spec.f_px_y * (-p[2] / depth)
    if noise is not None and rng is not None:
        if noise.miss_probability > 0 and rng.random() < noise.miss_probability:
            return None
        if noise.pixel_jitter > 0:
            u += noise.pixel_jitter * rng.standard_normal()
            v += noise.pixel_jitter * rng.standard_normal()
    if not (0 <= u < w_img and 0 <= v < h_img):
        return None
    size = 2.0 * spec.f_px * target_radius / depth
    w_box = min(size, w_img)
    h_box = min(size, h_img)
    return Detection(center=(float(u), float(v)), size=(float(w_box), float(h_box)),
                     confidence=1.0, timestamp=timestamp)


# ----------------------------------------------------------------- gimbal

@dataclass
class GimbalTracker:
    """Pixel-error proportional tracker for a two-axis gimbal.

    While the target is lost the last command is held for a timeout,
    then the yaw axis sweeps at a fixed rate until reacquisition.
    """
    gain: float = 2.0               # rad/s per unit normalized pixel error
    rate_limit: float = 3.0         # rad/s
    lost_timeout: float = 1.0       # s before the sweep starts
    sweep_rate: float = 0.5         # rad/s
    lost_time: float = 0.0
    last_rates: tuple = (0.0, 0.0)
    frames_lost: int = 0

    def update(self, detection, spec, dt):
        """Returns (pitch_rate, yaw_rate) commands."""
        if detection is None:
            self.frames_lost += 1
            self.lost_time += dt
            if self.lost_time > self.lost_timeout:
                return 0.0, self.sweep_rate
            return self.last_rates
        self.frames_lost = 0
        self.lost_time = 0.0
        u, v = detection.center
        cx, cy = spec.principal_point
        # u right of center: target toward camera -y, so yaw negative
        yaw_rate = -self.gain * (u - cx) / spec.f_px
        pitch_rate = self.gain * (v - cy) / spec.f_px_y
        lim = self.rate_limit
        self.last_rates = (float(np.clip(pitch_rate, -lim, lim)),
                           float(np.clip(yaw_rate, -lim, lim)))
        return self.last_rates


def gimbal_track(detection, tracker, spec, dt):
    return tracker.update(detection, spec, dt)


# ---------------------------------------------------------------- ranging

def range_estimate(detection, spec, target_radius_prior, camera_position,
                   camera_rotation):
    """Size-based range plus the world-frame ray through the detection.

    Range beta = 2 * f_px * radius / sqrt(w*h) inverts the projection of
    the bounding sphere; alpha is the box's area fraction of the image.
    """
    w_box, h_box = detection.size
    if w_box * h_box <= 0:
        raise DegenerateBox("detection box has zero area")
    w_img, h_img = spec.resolution
    alpha = (w_box * h_box) / (w_img * h_img)
    beta = 2.0 * spec.f_px * target_radius_prior / np.sqrt(w_box * h_box)
    u, v = detection.center
    ray_cam = np.array([1.0,
                        -(u - spec.principal_point[0]) / spec.f_px,
                        -(v - spec.principal_point[1]) / spec.f_px_y])
    ray = np.asarray(camera_rotation) @ (ray_cam / np.linalg.norm(ray_cam))
    return alpha, float(beta), np.asarray(camera_position, dtype=float), ray


def range_estimate_inverse_area(detection, spec, target_radius_prior,
                                reference_range=10.0):
    """The cruder area-reciprocal range model, kept for comparison runs:
    beta proportional to 1/alpha, calibrated against the exact model at
    a reference range (where both agree by construction)."""
    w_box, h_box = detection.size
    if w_box * h_box <= 0:
        raise DegenerateBox("detection box has zero area")
    w_img, h_img = spec.resolution
    alpha = (w_box * h_box) / (w_img * h_img)
    side_ref = 2.0 * spec.f_px * target_radius_prior / reference_range
    alpha_ref = side_ref * side_ref / (w_img * h_img)
    return reference_range * alpha_ref / alpha


# ----------------------------------------------------------------- fusion

@dataclass
class TargetEstimate:
    position: np.ndarray
    velocity: np.ndarray
    triple_count: int
    residual: float
    timestamp: float = 0.0


def _ray_midpoint_seed(origins, rays):
    """Least-squares point closest to all rays (linear triangulation)."""
    a = np.zeros((3, 3))
    b = np.zeros(3)
    for o, d in zip(origins, rays):
        p = np.eye(3) - np.outer(d, d)
        a += p
        b += p @ o
    return np.linalg.lstsq(a, b, rcond=None)[0]


def _trilaterate(origins, betas, seed):
    """Gauss-Newton on sum(||p - o_j|| - beta_j)^2."""
    p = seed.copy()
    for _ in range(25):
        d = p - origins
        dist = np.linalg.norm(d, axis=1)
        dist = np.maximum(dist, 1e-12)
        res = dist - betas
        jac = d / dist[:, None]
        g = jac.T @ res
        h = jac.T @ jac + 1e-12 * np.eye(3)
        step = np.linalg.solve(h, g)
        p = p - step
        if np.linalg.norm(step) < 1e-12:
            break
    d = np.linalg.norm(p - origins, axis=1) - betas
    return p, float(np.sqrt(np.mean(d * d)))


def fuse_target(observations, collinear_tol=1e-6, timestamp=0.0,
                prev_estimate=None, dt=None):
    """Fuse (origin, ray, beta) observations from >= 3 cameras.

    Every 3-subset is solved independently (ray-midpoint seed, then
    range trilateration); the final position averages the subset
    solutions with inverse-residual weights.  Velocity comes from finite
    differencing against prev_estimate when dt is given.
    """
    if len(observations) < 3:
        raise InsufficientObservations(
            f"need >= 3 observations, got {len(observations)}")
    origins = np.asarray([o[0] for o in observations], dtype=float)
    spread = origins - origins.mean(axis=0)
    sv = np.linalg.svd(spread, compute_uv=False)
    if sv[1] < collinear_tol:
        raise DegenerateGeometry("camera centers are collinear (no baseline)")
    solutions = []
    weights = []
    for subset in itertools.combinations(range(len(observations)), 3):
        sub_o = origins[list(subset)]
        sub_sv = np.linalg.svd(sub_o - sub_o.mean(axis=0), compute_uv=False)
        if sub_sv[1] < collinear_tol:
            continue
        rays = np.asarray([observations[i][1] for i in subset])
        betas = np.asarray([observations[i][2] for i in subset])
        seed = _ray_midpoint_seed(sub_o, rays)
        p, res = _trilaterate(sub_o, betas, seed)
        solutions.append(p)
        weights.append(1.0 / (res + 1e-9))
    if not solutions:
        raise DegenerateGeometry("all camera triples are collinear")
    weights = np.asarray(weights)
    weights = weights / weights.sum()
    position = np.einsum("i,ij->j", weights, np.asarray(solutions))
    range_err = (np.linalg.norm(position - origins, axis=1)
                 - np.asarray([o[2] for o in observations]))
    residual = float(np.sqrt(np.mean(range_err * range_err)))
    velocity = np.zeros(3)
    if prev_estimate is not None and dt:
        velocity = (position - prev_estimate.position) / dt
    return TargetEstimate(position=position, velocity=velocity,
                          triple_count=len(solutions), residual=residual,
                          timestamp=timestamp)
