"""Static artifacts: CSV dumps of sampled moments and SVG plots for k = 2."""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .hull import Polytope


def samples_csv(vs: np.ndarray, mus: np.ndarray) -> str:
    """Columns v_1..v_k, mu_1..mu_k, one row per sampled group element."""
    k = vs.shape[1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"v_{i + 1}" for i in range(k)] + [f"mu_{i + 1}" for i in range(k)])
    for v, mu in zip(vs, mus):
        w.writerow([repr(float(a)) for a in v] + [repr(float(a)) for a in mu])
    return buf.getvalue()


def _polygon_order(P: Polytope) -> list[tuple[float, float]]:
    pts = [(float(v[0]), float(v[1])) for v in P.vertices]
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


def polytope_svg(P: Polytope, cloud: np.ndarray | None = None, size: int = 400) -> str:
    if P.ambient_dim != 2:
        raise ValueError("SVG rendering needs a two-dimensional polytope")
    pts = [(float(v[0]), float(v[1])) for v in P.vertices]
    if cloud is not None and len(cloud):
        pts += [(float(a), float(b)) for a, b in cloud]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    pad = 0.1 * span
    s = (size - 2) / (span + 2 * pad)

    def tr(p):
        return (round((p[0] - lo_x + pad) * s + 1, 3), round(size - ((p[1] - lo_y + pad) * s + 1), 3))

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    if cloud is not None:
        for p in cloud:
            x, y = tr(p)
            lines.append(f'<circle cx="{x}" cy="{y}" r="1.5" fill="#4a7ab5" fill-opacity="0.5"/>')
    ring = _polygon_order(P)
    if len(ring) >= 2:
        path = " ".join(f"{x},{y}" for x, y in map(tr, ring))
        lines.append(f'<polygon points="{path}" fill="none" stroke="black" stroke-width="1.5"/>')
    for p in ring:
        x, y = tr(p)
        lines.append(f'<circle cx="{x}" cy="{y}" r="3.5" fill="#c0392b"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
