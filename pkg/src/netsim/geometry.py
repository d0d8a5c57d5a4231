"""Small 3-D math toolbox: vectors, unit quaternions, rotations.

Quaternions are stored as [w, x, y, z] numpy arrays and kept at unit norm.
Angular rates are expressed in the body frame throughout.
"""
from __future__ import annotations

import numpy as np

QUAT_NORM_TOL = 1e-9


def vec3(x=0.0, y=0.0, z=0.0):
    return np.array([x, y, z], dtype=float)


def cross3(a, b):
    """3-vector cross product without np.cross's shape dispatch."""
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def skew(v):
    """Cross-product matrix: skew(v) @ u == cross(v, u)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def quat_identity():
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q):
    n = np.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if n == 0.0:
        raise ValueError("zero quaternion cannot be normalized")
    return q / n


def quat_mul(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q, v):
    """Rotate vector v by quaternion q (body -> world for body quats)."""
    return quat_to_mat(q) @ v


def cross3(a, b):
    """Cross product of two 3-vectors without the ndim dispatch of
    np.cross; identical operations, so results match bit for bit."""
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def quat_to_mat(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def mat_to_quat(m):
    t = np.trace(m)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        q = np.array([0.25 * s,
                      (m[2, 1] - m[1, 2]) / s,
                      (m[0, 2] - m[2, 0]) / s,
                      (m[1, 0] - m[0, 1]) / s])
    else:
        i = int(np.argmax(np.diag(m)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(1.0 + m[i, i] - m[j, j] - m[k, k]) * 2
        q = np.empty(4)
        q[0] = (m[k, j] - m[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (m[j, i] + m[i, j]) / s
        q[1 + k] = (m[k, i] + m[i, k]) / s
    return quat_normalize(q)


def quat_from_axis_angle(axis, angle):
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        return quat_identity()
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis / n))


def quat_exp_map(rot_vec):
    """Unit quaternion for a rotation vector (axis * angle)."""
    angle = np.sqrt(rot_vec[0] ** 2 + rot_vec[1] ** 2 + rot_vec[2] ** 2)
    if angle < 1e-12:
        # second-order series keeps this smooth at zero rotation
        q = np.empty(4)
        q[0] = 1.0 - angle * angle / 8.0
        q[1:] = 0.5 * rot_vec
        return quat_normalize(q)
    half = 0.5 * angle
    s = np.sin(half) / angle
    q = np.empty(4)
    q[0] = np.cos(half)
    q[1:] = s * rot_vec
    return q


def quat_integrate(q, omega_body, dt):
    """Advance orientation by body rate over dt (exact for constant rate).

    Integrates dq/dt = 0.5 * q (x) omega via the exponential map and
    renormalizes, keeping the norm within QUAT_NORM_TOL of one.
    """
    return quat_normalize(quat_mul(q, quat_exp_map(omega_body * dt)))


def rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
