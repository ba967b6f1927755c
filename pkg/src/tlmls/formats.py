"""Plain-text grid formats: CSV for lifts and frames, OBJ for chart meshes.

Floats are written with 17 significant digits so that a round trip is exact.
"""
import csv
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.17g"
LIFT_HEADER = ["u", "v", "re_f1", "im_f1", "re_f2", "im_f2", "re_f3", "im_f3"]
CHART_HEADER = ["u", "v", "re_w1", "im_w1", "re_w2", "im_w2"]
FRAME_HEADER = ["u", "v"] + [
    f"{part}_F{i + 1}{j + 1}" for i in range(3) for j in range(3) for part in ("re", "im")
]


def _fmt(x):
    return FLOAT_FMT % x


def _interleave(z):
    """(..., k) complex -> (..., 2k) real as re, im pairs."""
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def write_grid_csv(path, header, u, v, values, mask=None):
    """One row per node, u-major; ``values`` has shape (nu, nv, k) complex."""
    nu, nv = values.shape[:2]
    flat = _interleave(values.reshape(nu, nv, -1))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(nu):
            for j in range(nv):
                if mask is not None and not mask[i, j]:
                    continue
                w.writerow([_fmt(u[i]), _fmt(v[j])] + [_fmt(x) for x in flat[i, j]])


def read_grid_csv(path):
    """Parse a grid CSV back into ``(header, u, v, complex values)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    u = np.unique(body[:, 0])
    v = np.unique(body[:, 1])
    if body.shape[0] != u.size * v.size:
        raise ValueError("CSV does not cover a full tensor grid")
    vals = body[:, 2::2] + 1j * body[:, 3::2]
    return header, u, v, vals.reshape(u.size, v.size, -1)


def write_lift_csv(path, u, v, f):
    write_grid_csv(path, LIFT_HEADER, u, v, f)


def read_lift_csv(path):
    header, u, v, vals = read_grid_csv(path)
    if header != LIFT_HEADER:
        raise ValueError(f"unexpected lift header {header}")
    return u, v, vals


def write_frame_csv(path, u, v, F):
    write_grid_csv(path, FRAME_HEADER, u, v, F.reshape(F.shape[:2] + (9,)))


def read_frame_csv(path):
    header, u, v, vals = read_grid_csv(path)
    if header != FRAME_HEADER:
        raise ValueError(f"unexpected frame header {header}")
    return u, v, vals.reshape(u.size, v.size, 3, 3)


def write_obj(path, vertices, valid):
    """Quad mesh over the grid; faces touching an invalid node are dropped."""
    nu, nv = valid.shape
    index = np.zeros((nu, nv), dtype=int)
    index[valid] = np.arange(1, int(valid.sum()) + 1)
    lines = [f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in vertices[valid]]
    for i in range(nu - 1):
        for j in range(nv - 1):
            quad = index[i, j], index[i + 1, j], index[i + 1, j + 1], index[i, j + 1]
            if all(quad):
                lines.append("f %d %d %d %d" % quad)
    Path(path).write_text("\n".join(lines) + "\n")
