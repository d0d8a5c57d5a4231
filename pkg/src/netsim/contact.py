"""Sphere-sphere penalty contact with smoothed damping and velocity-
dependent friction.

The normal force is a one-sided stiff spring on penetration depth with a
damping term that ramps in over the first ``max_penetration`` of overlap
through a cubic Hermite smoothstep, so the force is zero at first touch
and continuous everywhere.  The friction coefficient is an odd, C1 curve
with a static peak at v_s and a dynamic plateau beyond v_d.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadKnots, CoincidentCenters
from .geometry import cross3


@dataclass
class ContactParams:
    stiffness: float = 1e8          # N/m^n
    stiffness_exponent: float = 1.0
    max_penetration: float = 1e-4   # m
    damping: float = 1e4            # N*s/m
    mu_s: float = 4e-2
    mu_d: float = 3e-2
    v_s: float = 1e-2               # m/s
    v_d: float = 1e-1               # m/s

    def __post_init__(self):
        if self.stiffness <= 0 or self.max_penetration <= 0:
            raise ValueError("stiffness and max_penetration must be positive")
        if self.stiffness_exponent < 1:
            raise ValueError("stiffness exponent must be >= 1")
        if self.damping < 0:
            raise ValueError("damping must be non-negative")
        if not (0 < self.v_s < self.v_d):
            raise ValueError("need 0 < v_s < v_d")
        if not (0 < self.mu_d <= self.mu_s):
            raise ValueError("need 0 < mu_d <= mu_s")


@dataclass
class Contact:
    pair: tuple
    penetration: float          # m
    penetration_rate: float     # m/s, > 0 while approaching
    normal: np.ndarray          # unit, from J center toward I center
    v_tangent: np.ndarray       # tangential relative velocity of I wrt J
    normal_force: float = 0.0
    friction_force: float = 0.0


def step_fn(x, x0, h0, x1, h1):
    """Cubic Hermite smoothstep: h0 below x0, h1 above x1, C1 at both knots."""
    if x0 >= x1:
        raise BadKnots(f"step_fn knots must satisfy x0 < x1, got {x0} >= {x1}")
    u = np.clip((np.asarray(x, dtype=float) - x0) / (x1 - x0), 0.0, 1.0)
    out = h0 + (h1 - h0) * u * u * (3.0 - 2.0 * u)
    return out if out.ndim else float(out)


def normal_force(penetration, penetration_rate, params):
    """Penalty normal force, unilateral (never adhesive).

    Stiffness term k * delta^n plus damping that ramps 0 -> d over the
    first max_penetration of overlap, acting along the penetration rate
    (approaching adds force); the whole expression is clamped at zero.
    """
    delta = np.asarray(penetration, dtype=float)
    coeff = step_fn(delta, 0.0, 0.0, params.max_penetration, params.damping)
    f = params.stiffness * delta ** params.stiffness_exponent \
        + coeff * np.asarray(penetration_rate, dtype=float)
    out = np.maximum(0.0, f)
    return out if out.ndim else float(out)


def friction_coeff(v_t, params):
    """Signed friction coefficient as a function of tangential speed.

    Odd in v_t, zero at rest, peaks at +-mu_s at |v_t| = v_s, decays
    smoothly to the dynamic plateau +-mu_d for |v_t| >= v_d.
    """
    v = np.asarray(v_t, dtype=float)
    av = np.abs(v)
    rise = step_fn(av, 0.0, 0.0, params.v_s, params.mu_s)
    decay = step_fn(av, params.v_s, params.mu_s, params.v_d, params.mu_d)
    out = np.sign(v) * np.where(av <= params.v_s, rise, decay)
    return out if out.ndim else float(out)


def friction_force(f_normal, v_t, params):
    """Friction force opposing the tangential relative motion of I with
    respect to J: magnitude mu(|v_t|) * f_normal, sign opposite v_t."""
    v = np.asarray(v_t, dtype=float)
    out = -np.abs(friction_coeff(v, params)) * np.asarray(f_normal, dtype=float) * np.sign(v)
    return out if np.ndim(out) else float(out)


def detect(center_i, center_j, radius_i, radius_j, vel_i=None, vel_j=None,
           omega_i=None, omega_j=None):
    """Detect sphere-sphere contact; returns a Contact or None.

    The normal points from J's center toward I's center; penetration rate
    is positive while the spheres approach.
    """
    center_i = np.asarray(center_i, dtype=float)
    center_j = np.asarray(center_j, dtype=float)
    d = center_i - center_j
    x = np.linalg.norm(d)
    if x > radius_i + radius_j:
        return None
    if x == 0.0:
        raise CoincidentCenters("sphere centers coincide; normal undefined")
    n = d / x
    vel_i = np.zeros(3) if vel_i is None else np.asarray(vel_i, dtype=float)
    vel_j = np.zeros(3) if vel_j is None else np.asarray(vel_j, dtype=float)
    # surface velocities at the contact point
    p = center_j + n * (x - radius_i + (radius_i + radius_j - x) / 2.0)
    v_surf_i = vel_i.copy()
    v_surf_j = vel_j.copy()
    if omega_i is not None:
        v_surf_i += cross3(omega_i, p - center_i)
    if omega_j is not None:
        v_surf_j += cross3(omega_j, p - center_j)
    v_rel = v_surf_i - v_surf_j
    rate = -(vel_i - vel_j) @ n
    v_t = v_rel - (v_rel @ n) * n
    return Contact(pair=None, penetration=radius_i + radius_j - x,
                   penetration_rate=rate, normal=n, v_tangent=v_t)


def contact_wrench(contact, params):
    """Fill the force fields of a Contact; returns (force_on_I_world)."""
    fc = normal_force(contact.penetration, contact.penetration_rate, params)
    vt_mag = np.linalg.norm(contact.v_tangent)
    mu = abs(friction_coeff(vt_mag, params))
    ff = mu * fc
    contact.normal_force = fc
    contact.friction_force = ff
    force = fc * contact.normal
    if vt_mag > 1e-12:
        force = force - ff * contact.v_tangent / vt_mag
    return force


# --------------------------------------------------------------- world glue

_TRIU_CACHE = {}


def candidate_pairs(pos, radii, groups, margin=0.0):
    """Indices of sphere pairs within touching distance (+margin).

    Spheres sharing a group never collide (rope/net self-contact is out of
    scope).  All-pairs vectorized below 256 spheres, uniform hash grid above.
    """
    n = len(radii)
    if n < 2:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    if n <= 256:
        if n not in _TRIU_CACHE:
            _TRIU_CACHE[n] = np.triu_indices(n, k=1)
        ii, jj = _TRIU_CACHE[n]
    else:
        cell = 2.0 * radii.max() + margin
        keys = np.floor(pos / cell).astype(np.int64)
        buckets = {}
        for i, key in enumerate(map(tuple, keys)):
            buckets.setdefault(key, []).append(i)
        cand = set()
        offsets = [(dx, dy, dz) for dx in (-1, 0, 1)
                   for dy in (-1, 0, 1) for dz in (-1, 0, 1)]
        for key, members in buckets.items():
            for off in offsets:
                nb = (key[0] + off[0], key[1] + off[1], key[2] + off[2])
                for a in members:
                    for b in buckets.get(nb, ()):
                        if a < b:
                            cand.add((a, b))
        if not cand:
            return np.empty(0, dtype=int), np.empty(0, dtype=int)
        arr = np.array(sorted(cand))
        ii, jj = arr[:, 0], arr[:, 1]
    d = pos[ii] - pos[jj]
    dist = np.linalg.norm(d, axis=1)
    hit = (dist <= radii[ii] + radii[jj] + margin) & (groups[ii] != groups[jj])
    return ii[hit], jj[hit]


def evaluate_sphere_contacts(world):
    """Detect and apply penalty contact forces for all registered spheres."""
    params = world.contact_params
    pos, vel, radii, groups = world._sphere_states()
    ii, jj = candidate_pairs(pos, radii, groups)
    for a, b in zip(ii, jj):
        ka, pa, ra, oa, _ = world.spheres[a]
        kb, pb, rb, ob, _ = world.spheres[b]
        wa = world.bodies[pa].angular_rate if ka == "body" else None
        wb = world.bodies[pb].angular_rate if kb == "body" else None
        c = detect(pos[a], pos[b], ra, rb, vel[a], vel[b], wa, wb)
        if c is None or c.penetration < 0:
            continue
        c.pair = (a, b)
        force_on_a = contact_wrench(c, params)
        point = pos[b] + c.normal * (rb - c.penetration / 2.0)
        _apply_sphere_force(world, a, force_on_a, point)
        _apply_sphere_force(world, b, -force_on_a, point)
        world.active_contacts.append(c)


def _apply_sphere_force(world, sphere_idx, force, point):
    kind, parent, _, _, _ = world.spheres[sphere_idx]
    if kind == "pm":
        world.pm_force[parent] += force
    elif kind == "body":
        world.bodies[parent].apply_force_at(force, point)
    # fixed spheres absorb force
