"""Animation CSV export: one row per sample, 7 pose columns per object.

Header is `timestamp` followed by `<obj>_px,_py,_pz,_qw,_qx,_qy,_qz` for
every object in declaration order; values are decimal text with 9
significant digits, so files round-trip exactly through float parsing at
that precision.
"""
from __future__ import annotations

import csv

import numpy as np

POSE_FIELDS = ("px", "py", "pz", "qw", "qx", "qy", "qz")


class AnimationLog:
    """Accumulates timed pose samples for a fixed set of objects."""

    def __init__(self, object_names):
        if len(set(object_names)) != len(tuple(object_names)):
            raise ValueError("object names must be unique")
        self.object_names = tuple(object_names)
        self.rows = []

    def append(self, timestamp, poses):
        """poses: mapping name -> (position(3), quaternion(4))."""
        row = [float(timestamp)]
        for name in self.object_names:
            p, q = poses[name]
            row.extend(float(v) for v in p)
            row.extend(float(v) for v in q)
        self.rows.append(row)


def header_for(object_names):
    cols = ["timestamp"]
    for name in object_names:
        cols.extend(f"{name}_{f}" for f in POSE_FIELDS)
    return cols


def export_csv(log, path):
    """Write an AnimationLog; returns the path."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header_for(log.object_names))
        for row in log.rows:
            w.writerow(f"{v:.9g}" for v in row)
    return path


def read_csv(path):
    """Parse an exported file back into (object_names, times, poses).

    poses[name] is an (n_rows, 7) array in POSE_FIELDS order.
    """
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(v) for v in row] for row in r])
    if header[0] != "timestamp" or (len(header) - 1) % 7:
        raise ValueError("not an animation CSV")
    names = []
    for i in range(1, len(header), 7):
        base = header[i]
        if not base.endswith("_px"):
            raise ValueError(f"bad column {base!r}")
        names.append(base[:-3])
    if data.size == 0:
        data = data.reshape(0, 1 + 7 * len(names))
    return names, data[:, 0], {
        n: data[:, 1 + 7 * i:8 + 7 * i] for i, n in enumerate(names)}


def write_table(path, columns, rows):
    """Tidy metrics CSV: plain header + %.9g values."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow(f"{float(v):.9g}" for v in row)
    return path
