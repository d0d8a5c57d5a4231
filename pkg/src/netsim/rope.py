"""Lumped-mass spring-damper ropes and rectangular nets.

A rope of total length L is discretized into N segments joined at N-1
interior point masses; the two end segments have half the interior
natural length so that ropes chain onto markers cleanly.  Segment tension
is affine in stretch and stretch rate with slopes EA/s0 and d/s0 (natural
length in the denominator; see the stiffness definition below).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateChord, NonPositiveLength
from .world import EP_FIXED, EP_MARKER, EP_POINT_MASS


@dataclass
class RopeSpec:
    total_length: float = 1.0       # m
    segment_count: int = 5          # N, number of concentrated masses
    axial_stiffness: float = 1e5    # EA, N
    linear_damping: float = 50.0    # d, N*s/m
    total_mass: float = 0.8         # kg, spread over interior masses
    tension_only: bool = False

    def __post_init__(self):
        if self.total_length <= 0:
            raise ValueError("total_length must be positive")
        if self.segment_count < 2:
            raise ValueError("segment_count must be >= 2")
        if self.axial_stiffness <= 0 or self.total_mass <= 0:
            raise ValueError("axial_stiffness and total_mass must be positive")
        if self.linear_damping < 0:
            raise ValueError("linear_damping must be non-negative")

    @property
    def natural_length(self):
        """Interior segment natural length s0 = L/N."""
        return self.total_length / self.segment_count

    @property
    def node_mass(self):
        """Each of the N-1 interior masses."""
        return self.total_mass / (self.segment_count - 1)

    def stiffness(self, natural_length):
        return self.axial_stiffness / natural_length

    def damping(self, natural_length):
        return self.linear_damping / natural_length


def segment_force(spec, s, s_rate, natural_length=None):
    """Scalar segment tension F = k*(s - s0) + c*s_rate, positive pulling
    the endpoints together.  Clamped at zero when the spec is tension-only."""
    s0 = spec.natural_length if natural_length is None else natural_length
    if np.any(np.asarray(s) <= 0):
        raise NonPositiveLength(f"segment length must be positive, got {s}")
    f = spec.stiffness(s0) * (np.asarray(s, dtype=float) - s0) \
        + spec.damping(s0) * np.asarray(s_rate, dtype=float)
    if spec.tension_only:
        f = np.maximum(f, 0.0)
    return f if np.ndim(f) else float(f)


@dataclass
class RopeInstance:
    spec: RopeSpec
    node_indices: list          # interior point-mass indices, end a -> end b
    segment_ids: list           # world segment ids, end a -> end b
    end_a: tuple                # world endpoint descriptors
    end_b: tuple

    def tensions(self, world):
        return world.segment_tension[self.segment_ids]


def _endpoint_state(world, end):
    kind, ref = end
    if kind == EP_MARKER:
        pos, _ = world.marker_world(ref)
        return pos
    if kind == EP_POINT_MASS:
        return world.pm_pos[ref].copy()
    return np.asarray(ref, dtype=float)


def marker_end(name):
    return (EP_MARKER, name)


def fixed_end(point):
    return (EP_FIXED, np.asarray(point, dtype=float))


def point_mass_end(pm):
    return (EP_POINT_MASS, pm.index if hasattr(pm, "index") else pm)


def build_rope(spec, world, end_a, end_b, name=None):
    """Create a rope between two endpoints laid out on the straight chord.

    The N-1 interior masses sit at uniform fractions k/N of the chord, so
    a chord longer than the natural length builds the rope pre-tensioned
    and a shorter chord leaves proportional slack in every segment.
    """
    name = name or f"rope{len(world._seg_k)}"
    pa = _endpoint_state(world, end_a)
    pb = _endpoint_state(world, end_b)
    chord = pb - pa
    chord_len = np.linalg.norm(chord)
    if chord_len < 1e-12:
        raise DegenerateChord(f"rope {name!r}: end markers coincide")
    n = spec.segment_count
    s0 = spec.natural_length
    nodes = []
    for k in range(1, n):
        pm = world.add_point_mass(f"{name}_n{k - 1}", spec.node_mass,
                                  pa + chord * (k / n))
        nodes.append(pm.index)
    ends = [end_a] + [(EP_POINT_MASS, i) for i in nodes] + [end_b]
    seg_ids = []
    for ea, eb in zip(ends[:-1], ends[1:]):
        seg_ids.append(world.add_segment(
            ea, eb, spec.stiffness(s0), spec.damping(s0), s0,
            tension_only=spec.tension_only))
    return RopeInstance(spec=spec, node_indices=nodes, segment_ids=seg_ids,
                        end_a=end_a, end_b=end_b)


@dataclass
class NetSpec:
    rows: int = 2
    cols: int = 2
    cell: RopeSpec = field(default_factory=RopeSpec)
    junction_mass: float = None     # defaults to the cell's interior node mass

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("mesh counts must be >= 1")
        if self.junction_mass is None:
            self.junction_mass = self.cell.node_mass


@dataclass
class NetInstance:
    spec: NetSpec
    junction_grid: np.ndarray   # (rows+1, cols+1) of point-mass index or -1
    ropes: list                 # RopeInstance per mesh edge
    anchors: dict               # (i, j) -> endpoint descriptor for attached nodes

    def node_indices(self, world):
        """All point-mass indices belonging to the net (junction + rope)."""
        idx = [i for i in self.junction_grid.ravel() if i >= 0]
        for r in self.ropes:
            idx.extend(r.node_indices)
        return idx


def build_net(net_spec, world, attachments=None, origin=(0, 0, 0),
              x_axis=(1, 0, 0), y_axis=(0, 1, 0), name="net"):
    """Build a rows x cols net of rope modules on shared junction masses.

    ``attachments`` maps boundary grid coordinates (i, j) to an endpoint
    descriptor (marker_end / fixed_end); attached junctions become that
    endpoint instead of a free point mass, so net corners can hang from
    UAV-body markers or be pinned in space.
    """
    attachments = attachments or {}
    origin = np.asarray(origin, dtype=float)
    ex = np.asarray(x_axis, dtype=float)
    ey = np.asarray(y_axis, dtype=float)
    cell_len = net_spec.cell.total_length
    rows, cols = net_spec.rows, net_spec.cols
    grid = np.full((rows + 1, cols + 1), -1, dtype=int)
    endpoint = {}
    for i in range(rows + 1):
        for j in range(cols + 1):
            pos = origin + ex * (j * cell_len) + ey * (i * cell_len)
            if (i, j) in attachments:
                endpoint[(i, j)] = attachments[(i, j)]
            else:
                pm = world.add_point_mass(f"{name}_j{i}_{j}",
                                          net_spec.junction_mass, pos)
                grid[i, j] = pm.index
                endpoint[(i, j)] = (EP_POINT_MASS, pm.index)
    ropes = []
    k = 0
    for i in range(rows + 1):
        for j in range(cols + 1):
            if j < cols:
                ropes.append(build_rope(net_spec.cell, world,
                                        endpoint[(i, j)], endpoint[(i, j + 1)],
                                        name=f"{name}_h{k}"))
                k += 1
            if i < rows:
                ropes.append(build_rope(net_spec.cell, world,
                                        endpoint[(i, j)], endpoint[(i + 1, j)],
                                        name=f"{name}_v{k}"))
                k += 1
    return NetInstance(spec=net_spec, junction_grid=grid, ropes=ropes,
                       anchors={k: v for k, v in attachments.items()})


def attach_payload(world, net, mass, name="payload"):
    """Add payload mass onto the net's center junction (Fig-style rig)."""
    i, j = net.spec.rows // 2, net.spec.cols // 2
    idx = net.junction_grid[i, j]
    if idx < 0:
        raise ValueError("net center junction is not a free point mass")
    world.pm_mass[idx] += mass
    return idx
