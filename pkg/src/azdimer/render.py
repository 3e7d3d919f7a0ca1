"""Deterministic SVG/PNG/CSV emitters.

SVG is written as plain text with fixed formatting so identical inputs
produce byte-identical files; PNG rasters go through matplotlib's Agg
backend and are reserved for tilings and heatmaps.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


def _fmt(x: float) -> str:
    return f"{x:.6f}"


class SVG:
    def __init__(self, width: float, height: float, viewbox: Tuple[float, float, float, float]):
        self.parts: List[str] = []
        vb = " ".join(_fmt(v) for v in viewbox)
        self.parts.append(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
            f'height="{_fmt(height)}" viewBox="{vb}">'
        )

    def polyline(self, pts: Sequence[Tuple[float, float]], stroke: str = "black",
                 width: float = 0.01, closed: bool = False, fill: str = "none"):
        data = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        tag = "polygon" if closed else "polyline"
        self.parts.append(
            f'<{tag} points="{data}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{_fmt(width)}"/>'
        )

    def segment(self, a, b, stroke: str = "black", width: float = 0.01):
        self.parts.append(
            f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" x2="{_fmt(b[0])}" '
            f'y2="{_fmt(b[1])}" stroke="{stroke}" stroke-width="{_fmt(width)}"/>'
        )

    def circle(self, c, r: float, fill: str = "black", stroke: str = "none"):
        self.parts.append(
            f'<circle cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" r="{_fmt(r)}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def write(self, path: str):
        with open(path, "w") as fh:
            fh.write("\n".join(self.parts) + "\n</svg>\n")


def render_az_graph(az, path: str):
    """The finite graph with its boundary strands highlighted."""
    pts = [tuple(map(float, az.vertex_pos(v))) for v in az.whites + az.blacks]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    pad = 0.7
    vb = (min(xs) - pad, min(ys) - pad, max(xs) - min(xs) + 2 * pad,
          max(ys) - min(ys) + 2 * pad)
    svg = SVG(640, 640 * vb[3] / vb[2], vb)
    for le in az.edges:
        vw, vb_ = az.edge_pair(le)
        svg.segment(
            tuple(map(float, az.vertex_pos(vw))),
            tuple(map(float, az.vertex_pos(vb_))),
            stroke="#888888",
            width=0.015,
        )
    cyc = [tuple(map(float, p)) for p in az.medial_cycle]
    svg.polyline(cyc + [cyc[0]], stroke="#cc3333", width=0.03)
    for v in az.whites:
        svg.circle(tuple(map(float, az.vertex_pos(v))), 0.05, fill="white",
                   stroke="black")
    for v in az.blacks:
        svg.circle(tuple(map(float, az.vertex_pos(v))), 0.05, fill="black")
    svg.write(path)


def render_arctic_curve(samples, domain, path: str):
    """Arctic-curve polyline inside the astroidal domain boundary."""
    dom_pts = [tuple(map(float, p)) for p in domain.boundary_cycle()]
    xs = [p[0] for p in dom_pts]
    ys = [p[1] for p in dom_pts]
    pad = 0.1 * max(max(xs) - min(xs), max(ys) - min(ys))
    vb = (min(xs) - pad, min(ys) - pad, max(xs) - min(xs) + 2 * pad,
          max(ys) - min(ys) + 2 * pad)
    svg = SVG(640, 640 * vb[3] / vb[2], vb)
    svg.polyline(dom_pts, stroke="#333333", width=vb[2] / 300, closed=True)
    curve = [(s.x, s.y) for s in samples]
    svg.polyline(curve + [curve[0]], stroke="#2255cc", width=vb[2] / 250)
    for s in samples:
        if s.is_turning_point:
            svg.circle((s.x, s.y), vb[2] / 120, fill="#cc3333")
        elif s.cusp:
            svg.circle((s.x, s.y), vb[2] / 160, fill="#22aa55")
    svg.write(path)


def curve_csv(samples, path: str):
    with open(path, "w") as fh:
        fh.write("parameter,x,y,tangent_slope,cusp_flag\n")
        for s in samples:
            slope = s.tangent_slope
            slope_str = "inf" if math.isinf(slope) else f"{slope:.17g}"
            fh.write(
                f"{s.parameter:.17g},{s.x:.17g},{s.y:.17g},{slope_str},"
                f"{1 if s.cusp else 0}\n"
            )


def render_heightmap(data, u0: int, grid: int, path: str):
    """Grayscale limit-shape raster with the phase regions overlaid."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    from .asymptotics import classify_phase, limit_shape

    dom = data.domain()
    pts = dom.boundary_cycle()
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    pad = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys))
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    H = np.full((grid, grid), np.nan)
    P = np.zeros((grid, grid))
    for i, y in enumerate(np.linspace(y0, y1, grid)):
        for j, x in enumerate(np.linspace(x0, x1, grid)):
            if not dom.contains(x, y):
                continue
            try:
                ph = classify_phase(data, x, y)
            except Exception:
                continue
            if ph.kind == "Rough":
                P[i, j] = 1.0
            elif ph.kind in ("Frozen", "QuasiFrozen"):
                P[i, j] = 0.5
            try:
                H[i, j] = limit_shape(data, x, y, u0)
            except Exception:
                pass
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(H, origin="lower", extent=(x0, x1, y0, y1), cmap="gray")
    ax.contour(P, levels=[0.75], origin="lower", extent=(x0, x1, y0, y1),
               colors="red", linewidths=1.0)
    ax.plot([p[0] for p in pts] + [pts[0][0]],
            [p[1] for p in pts] + [pts[0][1]], "k-", lw=1)
    ax.set_aspect("equal")
    fig.savefig(path, dpi=120)
    plt.close(fig)


DOMINO_COLORS = {0: "#d62728", 1: "#1f77b4", 2: "#2ca02c", 3: "#ff7f0e"}


def render_shuffle(matching, n: int, path: str,
                   overlay: Optional[Sequence[Tuple[float, float]]] = None,
                   overlay_transform: Tuple[float, float, float, float] = (1, 0, 1, 0)):
    """Domino tiling raster in the classical coordinates, colored by the
    four domino types, with an optional affine-transformed curve overlay."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    fig, ax = plt.subplots(figsize=(8, 8))
    for (d, a, b) in matching:
        # white cell (i,j) with i = a+b, j = b-a; black neighbor per type
        i, j = a + b, b - a
        off = [(1, 0), (0, 1), (0, -1), (-1, 0)][d]
        # union of the two unit cells
        x0 = min(i, i + off[0])
        y0 = min(j, j + off[1])
        w = 2 if off[0] else 1
        h = 2 if off[1] else 1
        ax.add_patch(
            Rectangle((x0, y0), w, h, facecolor=DOMINO_COLORS[d],
                      edgecolor="white", linewidth=0.2)
        )
    if overlay is not None:
        sx, tx, sy, ty = overlay_transform
        ax.plot(
            [sx * p[0] + tx for p in overlay],
            [sy * p[1] + ty for p in overlay],
            "k-", lw=1.5,
        )
    ax.set_xlim(-n - 1, n + 1)
    ax.set_ylim(-n - 1, n + 1)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
