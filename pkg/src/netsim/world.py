"""Multibody world: rigid bodies, point masses, markers, joint constraints.

Bodies carry 6-DOF state (world position/velocity, unit quaternion, body
angular rate); point masses carry 3-DOF state packed in flat numpy arrays
so that rope and contact forces can be evaluated vectorized.

Joint constraints (Fixed: 6 rows, Universal: 4 rows) are enforced at the
acceleration level through an augmented KKT solve with Baumgarte
stabilization.  Time stepping is fixed-step semi-implicit Euler; when any
contact is active (or imminent within one step of travel) the step is
subdivided by ``contact_substep_factor``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import (DanglingReference, InitialViolation, NonFinite,
                     OverConstrained, SolverSingular)

FIXED = "fixed"
UNIVERSAL = "universal"
_ROWS = {FIXED: 6, UNIVERSAL: 4}


@dataclass
class StepConfig:
    dt: float = 1e-3
    contact_substep_factor: int = 100
    baumgarte_alpha: float = 10.0
    baumgarte_beta: float = 10.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.contact_substep_factor < 1:
            raise ValueError("contact_substep_factor must be >= 1")


class RigidBody:
    """6-DOF rigid body with body-frame inertia and accumulators."""

    def __init__(self, name, mass, inertia, position=None, velocity=None,
                 orientation=None, angular_rate=None):
        if mass <= 0:
            raise ValueError(f"body {name!r}: mass must be positive")
        inertia = np.asarray(inertia, dtype=float)
        if inertia.shape == (3,):
            inertia = np.diag(inertia)
        if np.any(np.linalg.eigvalsh(inertia) <= 0):
            raise ValueError(f"body {name!r}: inertia must be positive definite")
        self.name = name
        self.mass = float(mass)
        self.inertia = inertia
        self.inertia_inv = np.linalg.inv(inertia)
        self.position = np.array(position if position is not None else (0, 0, 0), dtype=float)
        self.velocity = np.array(velocity if velocity is not None else (0, 0, 0), dtype=float)
        self.orientation = geo.quat_normalize(np.array(
            orientation if orientation is not None else (1, 0, 0, 0), dtype=float))
        self.angular_rate = np.array(angular_rate if angular_rate is not None else (0, 0, 0), dtype=float)
        self.force = np.zeros(3)    # world frame
        self.torque = np.zeros(3)   # body frame
        self._rot_q = None
        self._rot = None

    def rotation(self):
        # the orientation array is replaced (never mutated) on update,
        # so an identity check is a sound cache key
        if self._rot_q is not self.orientation:
            self._rot = geo.quat_to_mat(self.orientation)
            self._rot_q = self.orientation
        return self._rot

    def apply_force_at(self, force_world, point_world):
        """Accumulate a world force acting at a world point."""
        self.force += force_world
        arm = point_world - self.position
        self.torque += self.rotation().T @ geo.cross3(arm, force_world)


class PointMass:
    """Handle into the world's packed point-mass arrays."""

    __slots__ = ("world", "index", "name")

    def __init__(self, world, index, name):
        self.world = world
        self.index = index
        self.name = name

    @property
    def mass(self):
        return self.world.pm_mass[self.index]

    @property
    def position(self):
        return self.world.pm_pos[self.index]

    @position.setter
    def position(self, value):
        self.world.pm_pos[self.index] = value

    @property
    def velocity(self):
        return self.world.pm_vel[self.index]

    @velocity.setter
    def velocity(self, value):
        self.world.pm_vel[self.index] = value

    @property
    def force(self):
        return self.world.pm_force[self.index]


@dataclass
class Marker:
    """Local frame attached to a body or point mass."""
    name: str
    parent: str
    local_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    local_orientation: np.ndarray = field(default_factory=geo.quat_identity)

    def __post_init__(self):
        self.local_offset = np.asarray(self.local_offset, dtype=float)
        self.local_orientation = geo.quat_normalize(
            np.asarray(self.local_orientation, dtype=float))
        self.local_rotation = geo.quat_to_mat(self.local_orientation)


@dataclass
class Constraint:
    kind: str
    marker_i: str
    marker_j: str

    def __post_init__(self):
        if self.kind not in _ROWS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")

    @property
    def rows(self):
        return _ROWS[self.kind]


class ForceElement:
    """Base for force producers; apply() adds into world accumulators."""

    def apply(self, world):
        raise NotImplementedError


# segment endpoint kinds
EP_POINT_MASS = 0
EP_MARKER = 1
EP_FIXED = 2


class World:
    """Container and stepper for a multibody assembly."""

    def __init__(self, step_config=None, gravity=(0.0, 0.0, -9.81)):
        self.config = step_config or StepConfig()
        self.gravity = np.asarray(gravity, dtype=float)
        self.time = 0.0
        self.bodies = {}
        self.markers = {}
        self.constraints = []
        self.force_elements = []
        # packed point-mass state
        self._pm_names = []
        self.pm_mass = np.zeros(0)
        self.pm_pos = np.zeros((0, 3))
        self.pm_vel = np.zeros((0, 3))
        self.pm_force = np.zeros((0, 3))
        # spring-damper segment registry (filled by rope builders)
        self._seg_end = []      # [(typeA, refA, typeB, refB)]
        self._seg_k = []
        self._seg_c = []
        self._seg_s0 = []
        self._seg_tension_only = []
        # collision sphere registry (filled by contact module)
        self.spheres = []
        self.contact_params = None
        self.active_contacts = []
        self.multipliers = {}
        self._assembled = False
        self._contact_log = None

    # ---------------------------------------------------------------- build

    def add_body(self, body):
        if body.name in self.bodies or body.name in self._pm_names:
            raise ValueError(f"duplicate id {body.name!r}")
        self.bodies[body.name] = body
        self._assembled = False
        return body

    def add_point_mass(self, name, mass, position, velocity=(0, 0, 0)):
        if name in self.bodies or name in self._pm_names:
            raise ValueError(f"duplicate id {name!r}")
        if mass <= 0:
            raise ValueError(f"point mass {name!r}: mass must be positive")
        idx = len(self._pm_names)
        self._pm_names.append(name)
        self.pm_mass = np.append(self.pm_mass, float(mass))
        self.pm_pos = np.vstack([self.pm_pos, np.asarray(position, dtype=float)])
        self.pm_vel = np.vstack([self.pm_vel, np.asarray(velocity, dtype=float)])
        self.pm_force = np.vstack([self.pm_force, np.zeros(3)])
        self._assembled = False
        return PointMass(self, idx, name)

    def point_mass(self, name):
        try:
            return PointMass(self, self._pm_names.index(name), name)
        except ValueError:
            raise DanglingReference(f"unknown point mass {name!r}") from None

    @property
    def n_point_masses(self):
        return len(self._pm_names)

    def add_marker(self, marker):
        if marker.name in self.markers:
            raise ValueError(f"duplicate marker id {marker.name!r}")
        self.markers[marker.name] = marker
        self._assembled = False
        return marker

    def add_constraint(self, constraint):
        self.constraints.append(constraint)
        self._assembled = False
        return constraint

    def add_force_element(self, element):
        self.force_elements.append(element)
        return element

    def add_segment(self, end_a, end_b, stiffness, damping, natural_length,
                    tension_only=False):
        """Register one spring-damper segment.

        Each end is (kind, ref): (EP_POINT_MASS, index), (EP_MARKER, name)
        or (EP_FIXED, world point).
        """
        self._seg_end.append((end_a, end_b))
        self._seg_k.append(float(stiffness))
        self._seg_c.append(float(damping))
        self._seg_s0.append(float(natural_length))
        self._seg_tension_only.append(bool(tension_only))
        self._assembled = False
        return len(self._seg_k) - 1

    @property
    def segments(self):
        """Registered segments as (end_a, end_b, k, c, s0, tension_only)."""
        return [(a, b, k, c, s0, to)
                for (a, b), k, c, s0, to in zip(self._seg_end, self._seg_k,
                                                self._seg_c, self._seg_s0,
                                                self._seg_tension_only)]

    def add_sphere(self, parent_kind, parent, radius, offset=(0, 0, 0),
                   group=None):
        """Register a collision sphere on a body ('body'), point mass
        ('pm', by index) or fixed in the world ('fixed', offset = center)."""
        if radius <= 0:
            raise ValueError("sphere radius must be positive")
        self.spheres.append((parent_kind, parent, float(radius),
                             np.asarray(offset, dtype=float),
                             group if group is not None else len(self.spheres)))
        return len(self.spheres) - 1

    # ------------------------------------------------------------- assembly

    def assemble(self, residual_tol=1e-6):
        """Validate references, index constraint rows, check initial residual."""
        for m in self.markers.values():
            if m.parent not in self.bodies and m.parent not in self._pm_names:
                raise DanglingReference(
                    f"marker {m.name!r}: unknown parent {m.parent!r}")
        for c in self.constraints:
            for mid in (c.marker_i, c.marker_j):
                if mid not in self.markers:
                    raise DanglingReference(f"constraint: unknown marker {mid!r}")
                if self.markers[mid].parent not in self.bodies:
                    raise DanglingReference(
                        f"constraint marker {mid!r} must sit on a rigid body")
        for (ea, eb) in self._seg_end:
            for (kind, ref) in (ea, eb):
                if kind == EP_POINT_MASS and not (0 <= ref < self.n_point_masses):
                    raise DanglingReference(f"segment: bad point-mass index {ref}")
                if kind == EP_MARKER and ref not in self.markers:
                    raise DanglingReference(f"segment: unknown marker {ref!r}")

        self._index_constraints()
        self._pack_segments()
        if self.constraints:
            res = self.evaluate_constraints()
            if np.max(np.abs(res)) > residual_tol:
                raise InitialViolation(
                    f"initial constraint residual {np.max(np.abs(res)):.3e} "
                    f"exceeds {residual_tol:.1e}")
        self._assembled = True
        return self

    def _index_constraints(self):
        """Group constraints into connected components over bodies."""
        names = list(self.bodies)
        parent = {n: n for n in names}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for c in self.constraints:
            a = find(self.markers[c.marker_i].parent)
            b = find(self.markers[c.marker_j].parent)
            if a != b:
                parent[a] = b

        groups = {}
        for c in self.constraints:
            groups.setdefault(find(self.markers[c.marker_i].parent), []).append(c)
        self._components = []
        for root, cons in groups.items():
            comp_bodies = sorted({self.markers[m].parent
                                  for c in cons for m in (c.marker_i, c.marker_j)})
            rows = sum(c.rows for c in cons)
            if rows > 6 * len(comp_bodies):
                raise OverConstrained(
                    f"component {comp_bodies}: {rows} constraint rows exceed "
                    f"{6 * len(comp_bodies)} DOF")
            self._components.append((comp_bodies, cons))

    def _pack_segments(self):
        # unique anchor slots for non-point-mass endpoints
        self._anchors = []          # [(kind, ref)]
        anchor_slot = {}
        n_pm = self.n_point_masses

        def endpoint_index(end):
            kind, ref = end
            if kind == EP_POINT_MASS:
                return ref
            key = (kind, ref if kind == EP_MARKER else tuple(np.asarray(ref)))
            if key not in anchor_slot:
                anchor_slot[key] = len(self._anchors)
                self._anchors.append((kind, ref))
            return n_pm + anchor_slot[key]

        self._seg_ia = np.array([endpoint_index(a) for a, _ in self._seg_end], dtype=int)
        self._seg_ib = np.array([endpoint_index(b) for _, b in self._seg_end], dtype=int)
        self._seg_k_arr = np.asarray(self._seg_k)
        self._seg_c_arr = np.asarray(self._seg_c)
        self._seg_s0_arr = np.asarray(self._seg_s0)
        self._seg_to_arr = np.asarray(self._seg_tension_only, dtype=bool)
        self.segment_tension = np.zeros(len(self._seg_k))

    # ------------------------------------------------------------ kinematics

    def marker_world(self, name):
        """World (position, rotation matrix) of a marker frame."""
        m = self.markers[name]
        r_loc = m.local_rotation
        if m.parent in self.bodies:
            b = self.bodies[m.parent]
            a = b.rotation()
            return b.position + a @ m.local_offset, a @ r_loc
        pm = self.point_mass(m.parent)
        return pm.position + m.local_offset, r_loc

    def marker_world_velocity(self, name):
        m = self.markers[name]
        if m.parent in self.bodies:
            b = self.bodies[m.parent]
            a = b.rotation()
            return b.velocity + a @ geo.cross3(b.angular_rate, m.local_offset)
        return self.point_mass(m.parent).velocity.copy()

    def apply_marker_force(self, name, force_world):
        """Accumulate a world-frame force at a marker's world position."""
        m = self.markers[name]
        if m.parent in self.bodies:
            b = self.bodies[m.parent]
            pos, _ = self.marker_world(name)
            b.apply_force_at(force_world, pos)
        else:
            self.pm_force[self.point_mass(m.parent).index] += force_world

    # ------------------------------------------------------------ constraints

    def evaluate_constraints(self):
        """Stacked residual vector over all constraints.

        Fixed:     [r_I - r_J (3); x_I.y_J; x_I.z_J; y_I.z_J]
        Universal: [r_I - r_J (3); z_I.z_J]
        """
        out = []
        for c in self.constraints:
            p_i, a_i = self.marker_world(c.marker_i)
            p_j, a_j = self.marker_world(c.marker_j)
            out.extend(p_i - p_j)
            if c.kind == FIXED:
                out.append(a_i[:, 0] @ a_j[:, 1])
                out.append(a_i[:, 0] @ a_j[:, 2])
                out.append(a_i[:, 1] @ a_j[:, 2])
            else:
                out.append(a_i[:, 2] @ a_j[:, 2])
        return np.asarray(out)

    def _constraint_blocks(self, cons, body_slot):
        """Jacobian, bias (the velocity-product acceleration term), residual
        and residual rate for one component's constraints."""
        rows = sum(c.rows for c in cons)
        nb = len(body_slot)
        jac = np.zeros((rows, 6 * nb))
        bias = np.zeros(rows)
        g = np.zeros(rows)
        gdot = np.zeros(rows)
        r = 0
        for c in cons:
            mi, mj = self.markers[c.marker_i], self.markers[c.marker_j]
            bi, bj = self.bodies[mi.parent], self.bodies[mj.parent]
            si, sj = body_slot[mi.parent] * 6, body_slot[mj.parent] * 6
            a_i, a_j = bi.rotation(), bj.rotation()
            ri_loc = mi.local_rotation
            rj_loc = mj.local_rotation
            wi, wj = bi.angular_rate, bj.angular_rate

            # position rows: r_I - r_J
            ci, cj = mi.local_offset, mj.local_offset
            jac[r:r + 3, si:si + 3] = np.eye(3)
            jac[r:r + 3, si + 3:si + 6] = -a_i @ geo.skew(ci)
            jac[r:r + 3, sj:sj + 3] -= np.eye(3)
            jac[r:r + 3, sj + 3:sj + 6] -= -a_j @ geo.skew(cj)
            bias[r:r + 3] = (a_i @ np.cross(wi, np.cross(wi, ci))
                             - a_j @ np.cross(wj, np.cross(wj, cj)))
            p_i = bi.position + a_i @ ci
            p_j = bj.position + a_j @ cj
            g[r:r + 3] = p_i - p_j
            v_i = bi.velocity + a_i @ np.cross(wi, ci)
            v_j = bj.velocity + a_j @ np.cross(wj, cj)
            gdot[r:r + 3] = v_i - v_j
            r += 3

            if c.kind == FIXED:
                axis_pairs = [(0, 1), (0, 2), (1, 2)]
            else:
                axis_pairs = [(2, 2)]
            for (ka, kb) in axis_pairs:
                ahat = ri_loc[:, ka]          # axis of marker I, body-i frame
                bhat = rj_loc[:, kb]          # axis of marker J, body-j frame
                aw = a_i @ ahat
                bw = a_j @ bhat
                jac[r, si + 3:si + 6] = np.cross(ahat, a_i.T @ bw)
                jac[r, sj + 3:sj + 6] = np.cross(bhat, a_j.T @ aw)
                adot = a_i @ np.cross(wi, ahat)
                bdot = a_j @ np.cross(wj, bhat)
                bias[r] = (bw @ (a_i @ np.cross(wi, np.cross(wi, ahat)))
                           + 2.0 * adot @ bdot
                           + aw @ (a_j @ np.cross(wj, np.cross(wj, bhat))))
                g[r] = aw @ bw
                gdot[r] = adot @ bw + aw @ bdot
                r += 1
        return jac, bias, g, gdot

    def _solve_component(self, comp_bodies, cons):
        nb = len(comp_bodies)
        slot = {n: i for i, n in enumerate(comp_bodies)}
        mass = np.zeros((6 * nb, 6 * nb))
        h = np.zeros(6 * nb)
        for n, i in slot.items():
            b = self.bodies[n]
            mass[6 * i:6 * i + 3, 6 * i:6 * i + 3] = b.mass * np.eye(3)
            mass[6 * i + 3:6 * i + 6, 6 * i + 3:6 * i + 6] = b.inertia
            h[6 * i:6 * i + 3] = b.force
            h[6 * i + 3:6 * i + 6] = b.torque - np.cross(
                b.angular_rate, b.inertia @ b.angular_rate)
        jac, bias, g, gdot = self._constraint_blocks(cons, slot)
        rows = jac.shape[0]
        alpha, beta = self.config.baumgarte_alpha, self.config.baumgarte_beta
        rhs = -bias - 2.0 * alpha * gdot - beta * beta * g
        kkt = np.zeros((6 * nb + rows, 6 * nb + rows))
        kkt[:6 * nb, :6 * nb] = mass
        kkt[:6 * nb, 6 * nb:] = jac.T
        kkt[6 * nb:, :6 * nb] = jac
        try:
            sol = np.linalg.solve(kkt, np.concatenate([h, rhs]))
        except np.linalg.LinAlgError as exc:
            raise SolverSingular(
                f"constraint Jacobian singular in component {comp_bodies}") from exc
        accel = sol[:6 * nb]
        lam = sol[6 * nb:]
        return slot, accel, lam

    # --------------------------------------------------------------- forces

    def _anchor_states(self):
        n = len(self._anchors)
        pos = np.zeros((n, 3))
        vel = np.zeros((n, 3))
        for i, (kind, ref) in enumerate(self._anchors):
            if kind == EP_MARKER:
                pos[i], _ = self.marker_world(ref)
                vel[i] = self.marker_world_velocity(ref)
            else:
                pos[i] = np.asarray(ref, dtype=float)
        return pos, vel

    def _apply_segments(self):
        if not self._seg_k:
            return
        a_pos, a_vel = self._anchor_states()
        pos = np.vstack([self.pm_pos, a_pos]) if len(a_pos) else self.pm_pos
        vel = np.vstack([self.pm_vel, a_vel]) if len(a_vel) else self.pm_vel
        ia, ib = self._seg_ia, self._seg_ib
        d = pos[ib] - pos[ia]
        s = np.linalg.norm(d, axis=1)
        s_safe = np.maximum(s, 1e-12)
        u = d / s_safe[:, None]
        s_rate = np.einsum("ij,ij->i", vel[ib] - vel[ia], u)
        tension = self._seg_k_arr * (s - self._seg_s0_arr) + self._seg_c_arr * s_rate
        tension = np.where(self._seg_to_arr, np.maximum(tension, 0.0), tension)
        self.segment_tension = tension
        f = tension[:, None] * u            # pulls endpoint a toward b
        n_pm = self.n_point_masses
        pm_a = ia < n_pm
        pm_b = ib < n_pm
        np.add.at(self.pm_force, ia[pm_a], f[pm_a])
        np.add.at(self.pm_force, ib[pm_b], -f[pm_b])
        # the (few) marker-backed endpoints push on their parent bodies
        for w in np.nonzero(~pm_a)[0]:
            kind, ref = self._anchors[ia[w] - n_pm]
            if kind == EP_MARKER:
                self.apply_marker_force(ref, f[w])
        for w in np.nonzero(~pm_b)[0]:
            kind, ref = self._anchors[ib[w] - n_pm]
            if kind == EP_MARKER:
                self.apply_marker_force(ref, -f[w])

    def _apply_contacts(self):
        from .contact import evaluate_sphere_contacts
        self.active_contacts = []
        if self.contact_params is None or len(self.spheres) < 2:
            return
        evaluate_sphere_contacts(self)

    def _sphere_index(self):
        """Static per-sphere indexing arrays, rebuilt when spheres change."""
        cache = getattr(self, "_sphere_cache", None)
        if cache is not None and cache["n"] == len(self.spheres):
            return cache
        n = len(self.spheres)
        radii = np.zeros(n)
        groups = np.empty(n, dtype=object)
        fixed_pos = np.zeros((n, 3))
        pm_rows, pm_idx, body_rows = [], [], []
        for i, (kind, parent, radius, offset, group) in enumerate(self.spheres):
            radii[i] = radius
            groups[i] = group
            if kind == "pm":
                pm_rows.append(i)
                pm_idx.append(parent)
                fixed_pos[i] = offset
            elif kind == "body":
                body_rows.append(i)
            else:
                fixed_pos[i] = offset
        cache = {"n": n, "radii": radii, "groups": groups,
                 "fixed_pos": fixed_pos,
                 "pm_rows": np.asarray(pm_rows, dtype=int),
                 "pm_idx": np.asarray(pm_idx, dtype=int),
                 "body_rows": body_rows}
        self._sphere_cache = cache
        return cache

    def _sphere_states(self):
        c = self._sphere_index()
        n = c["n"]
        pos = c["fixed_pos"].copy()
        vel = np.zeros((n, 3))
        rows, idx = c["pm_rows"], c["pm_idx"]
        if len(rows):
            pos[rows] += self.pm_pos[idx]
            vel[rows] = self.pm_vel[idx]
        for i in c["body_rows"]:
            _, parent, _, offset, _ = self.spheres[i]
            b = self.bodies[parent]
            a = b.rotation()
            pos[i] = b.position + a @ offset
            vel[i] = b.velocity + a @ geo.cross3(b.angular_rate, offset)
        return pos, vel, c["radii"], c["groups"]

    def _contact_imminent(self):
        """True if any sphere pair is within one dt of travel of touching."""
        if self.contact_params is None or len(self.spheres) < 2:
            return False
        from .contact import candidate_pairs
        pos, vel, radii, groups = self._sphere_states()
        speed = np.linalg.norm(vel, axis=1)
        margin = 2.0 * self.config.dt * (speed.max() if len(speed) else 0.0)
        ii, jj = candidate_pairs(pos, radii, groups, margin)
        return len(ii) > 0

    # ------------------------------------------------------------- stepping

    def step(self):
        """Advance the world by one dt (substepped while contact is active)."""
        if not self._assembled:
            self.assemble()
        n_sub = self.config.contact_substep_factor if (
            self.spheres and self._contact_imminent()) else 1
        h = self.config.dt / n_sub
        for _ in range(n_sub):
            self._substep(h)
        self.time += self.config.dt
        ok = not self.n_point_masses or np.all(np.isfinite(self.pm_pos))
        if ok:
            for b in self.bodies.values():
                if not (np.isfinite(b.position).all()
                        and np.isfinite(b.velocity).all()):
                    ok = False
                    break
        if not ok:
            raise NonFinite(
                "non-finite state detected; dt is likely too large for the "
                "active contact stiffness")

    def _substep(self, h):
        # zero accumulators, gravity first
        if self.n_point_masses:
            np.multiply(self.pm_mass[:, None], self.gravity, out=self.pm_force)
        for b in self.bodies.values():
            b.force = b.mass * self.gravity
            b.torque = np.zeros(3)
        if self._seg_k:
            self._apply_segments()
        if self.spheres:
            self._apply_contacts()
        for fe in self.force_elements:
            fe.apply(self)

        constrained = set()
        self.multipliers = {}
        for comp_bodies, cons in getattr(self, "_components", []):
            slot, accel, lam = self._solve_component(comp_bodies, cons)
            r = 0
            for c in cons:
                self.multipliers[id(c)] = lam[r:r + c.rows]
                r += c.rows
            for n, i in slot.items():
                b = self.bodies[n]
                b.velocity = b.velocity + accel[6 * i:6 * i + 3] * h
                b.angular_rate = b.angular_rate + accel[6 * i + 3:6 * i + 6] * h
                constrained.add(n)
        for n, b in self.bodies.items():
            if n not in constrained:
                b.velocity = b.velocity + (b.force / b.mass) * h
                wdot = b.inertia_inv @ (b.torque - geo.cross3(
                    b.angular_rate, b.inertia @ b.angular_rate))
                b.angular_rate = b.angular_rate + wdot * h
            b.position = b.position + b.velocity * h
            b.orientation = geo.quat_integrate(b.orientation, b.angular_rate, h)
        if self.n_point_masses:
            self.pm_vel += (self.pm_force / self.pm_mass[:, None]) * h
            self.pm_pos += self.pm_vel * h


def assemble(bodies=(), point_masses=(), markers=(), constraints=(),
             force_elements=(), step_config=None, gravity=(0.0, 0.0, -9.81)):
    """Build and validate a World from parts.

    point_masses entries are (name, mass, position[, velocity]) tuples.
    """
    w = World(step_config=step_config, gravity=gravity)
    for b in bodies:
        w.add_body(b)
    for pm in point_masses:
        w.add_point_mass(*pm)
    for m in markers:
        w.add_marker(m)
    for c in constraints:
        w.add_constraint(c)
    for fe in force_elements:
        w.add_force_element(fe)
    return w.assemble()
