"""Tropical limit machinery: the max-plus characteristic polynomial from
torus dimer covers, its spectral curve and dual subdivision, harmonic
1-forms with prescribed outflows, and the piecewise-linear inverse of the
rough-region parametrization.

Everything here is exact rational arithmetic; the acceptance values (the
interior harmonic weights of the doubly periodic square-lattice example)
are reproduced as fractions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .errors import InconsistentOutflows, OverdeterminedInconsistent, TooLarge
from .lattice import TorusGraph

Point = Tuple[Fraction, Fraction]


# ---------------------------------------------------------------------------
# torus dimer covers and height-change classes


def torus_covers(g: TorusGraph, max_edges: int = 26) -> List[Tuple[int, ...]]:
    """All dimer covers of the torus graph, as tuples of edge indices."""
    if len(g.edges) > max_edges:
        raise TooLarge(f"{len(g.edges)} edges exceeds the enumeration limit")
    nw = len(g.whites)
    adj: List[List[Tuple[int, int]]] = [[] for _ in range(nw)]
    for k, (w, b, off) in enumerate(g.edges):
        adj[w].append((k, b))
    covers: List[Tuple[int, ...]] = []

    def rec(i: int, used: int, chosen: Tuple[int, ...]):
        if i == nw:
            covers.append(chosen)
            return
        for (k, b) in adj[i]:
            if not used & (1 << b):
                rec(i + 1, used | (1 << b), chosen + (k,))

    rec(0, 0, ())
    return covers


def _edge_crossings(g: TorusGraph, k: int) -> Tuple[Fraction, Fraction]:
    """Signed crossings of edge k (traversed white to black) with the two
    fundamental seams x = x0 + Z and y = y0 + Z, for a generic anchor."""
    w, b, off = g.edges[k]
    p = g.vpos(("w", w, (0, 0)))
    q = g.vpos(("b", b, off))
    x0 = Fraction(13, 1000)
    y0 = Fraction(17, 1000)
    cx = math.floor(q[0] - x0) - math.floor(p[0] - x0)
    cy = math.floor(q[1] - y0) - math.floor(p[1] - y0)
    return (cx, cy)


def height_class(g: TorusGraph, cover: Sequence[int],
                 reference: Sequence[int]) -> Tuple[int, int]:
    """Height-change class (j, k) = (h^y, -h^x) of a torus cover relative
    to the reference cover, from signed seam crossings of the unit flow."""
    hx = 0
    hy = 0
    for k in cover:
        cx, cy = _edge_crossings(g, k)
        hx += cy  # crossings of the horizontal dual cycle count y-seams
        hy += cx
    for k in reference:
        cx, cy = _edge_crossings(g, k)
        hx -= cy
        hy -= cx
    # sign of the second component calibrated against the doubly periodic
    # square-lattice example (the dual subdivision's pentagonal cell)
    return (int(hy), int(hx))


@dataclass
class TropicalPolynomial:
    """Finite support (j, k) -> coefficient E_max(j, k), exact rationals."""

    coeffs: Dict[Tuple[int, int], Fraction]

    def support(self) -> List[Tuple[int, int]]:
        return sorted(self.coeffs)

    def value(self, x: Fraction, y: Fraction) -> Fraction:
        return max(E + j * x + k * y for (j, k), E in self.coeffs.items())

    def argmax(self, x: Fraction, y: Fraction) -> List[Tuple[int, int]]:
        best = self.value(x, y)
        return sorted(
            (j, k) for (j, k), E in self.coeffs.items()
            if E + j * x + k * y == best
        )


def tropical_char_poly(g: TorusGraph, energies: Dict[int, Fraction]
                       ) -> TropicalPolynomial:
    """Tropical characteristic polynomial: per height-change class, the
    maximal total energy over torus dimer covers in the class; the support
    is translated so its minimum corner is the origin."""
    covers = torus_covers(g)
    if not covers:
        raise ValueError("torus graph has no dimer covers")
    ref = covers[0]
    raw: Dict[Tuple[int, int], Fraction] = {}
    for M in covers:
        cls = height_class(g, M, ref)
        val = sum((Fraction(energies.get(k, 0)) for k in M), Fraction(0))
        if cls not in raw or val > raw[cls]:
            raw[cls] = val
    jmin = min(j for j, _ in raw)
    kmin = min(k for _, k in raw)
    return TropicalPolynomial(
        {(j - jmin, k - kmin): v for (j, k), v in raw.items()}
    )


# ---------------------------------------------------------------------------
# the tropical curve and its dual subdivision


def _hull2d(points: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Convex hull, counterclockwise (Andrew's monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lo: List[Tuple[int, int]] = []
    for p in pts:
        while len(lo) >= 2 and cross(lo[-2], lo[-1], p) <= 0:
            lo.pop()
        lo.append(p)
    hi: List[Tuple[int, int]] = []
    for p in reversed(pts):
        while len(hi) >= 2 and cross(hi[-2], hi[-1], p) <= 0:
            hi.pop()
        hi.append(p)
    return lo[:-1] + hi[:-1]


@dataclass
class TropicalCurve:
    """Planar tropical curve with its dual regular subdivision."""

    vertices: List[Point]
    cells: List[List[Tuple[int, int]]]  # per vertex: subdivision cell hull, ccw
    edges: List[Tuple[int, int, Tuple[int, int], Fraction, int]]
    # (v1, v2, primitive direction v1->v2, segment lattice length, dual weight)
    rays: List[Tuple[int, Tuple[int, int], int]]
    # (vertex, primitive outward direction, dual weight)
    newton_hull: List[Tuple[int, int]]

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e[:2]) + sum(
            1 for r in self.rays if r[0] == v
        )

    def incident(self, v: int):
        """(primitive direction away from v, dual weight, edge-or-ray key)."""
        out = []
        for i, (v1, v2, prim, ln, wt) in enumerate(self.edges):
            if v1 == v:
                out.append((prim, wt, ("e", i, +1)))
            elif v2 == v:
                out.append(((-prim[0], -prim[1]), wt, ("e", i, -1)))
        for i, (vv, prim, wt) in enumerate(self.rays):
            if vv == v:
                out.append((prim, wt, ("r", i, +1)))
        return out


def _primitive(v: Tuple[int, int]) -> Tuple[Tuple[int, int], int]:
    g = math.gcd(abs(v[0]), abs(v[1]))
    return ((v[0] // g, v[1] // g), g)


def tropical_curve(P: TropicalPolynomial) -> TropicalCurve:
    """Corner locus of the tropical polynomial via its dual subdivision."""
    pts = P.support()
    # 2-cells: argmax sets at candidate dual vertices from point triples
    verts: List[Point] = []
    cells: List[List[Tuple[int, int]]] = []
    argmaxes: List[Set[Tuple[int, int]]] = []
    for (p1, p2, p3) in itertools.combinations(pts, 3):
        den = (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1])
        if den == 0:
            continue
        E1, E2, E3 = P.coeffs[p1], P.coeffs[p2], P.coeffs[p3]
        b1 = E1 - E2
        b2 = E1 - E3
        a11, a12 = p2[0] - p1[0], p2[1] - p1[1]
        a21, a22 = p3[0] - p1[0], p3[1] - p1[1]
        x = Fraction(b1 * a22 - b2 * a12, den)
        y = Fraction(a11 * b2 - a21 * b1, den)
        am = set(P.argmax(x, y))
        if not {p1, p2, p3} <= am:
            continue
        if (x, y) in verts:
            continue
        verts.append((x, y))
        cells.append(_hull2d(sorted(am)))
        argmaxes.append(am)
    # bounded edges: vertices whose argmax sets share a collinear pair
    edges = []
    for i, j in itertools.combinations(range(len(verts)), 2):
        common = sorted(argmaxes[i] & argmaxes[j])
        if len(common) < 2:
            continue
        d = (verts[j][0] - verts[i][0], verts[j][1] - verts[i][1])
        if d == (Fraction(0), Fraction(0)):
            continue
        # dual weight: lattice length of the shared subdivision edge
        lo, hi = common[0], common[-1]
        prim_dual, w = _primitive((hi[0] - lo[0], hi[1] - lo[1]))
        # tropical edge is perpendicular to the dual edge
        num = d[0] * prim_dual[0] + d[1] * prim_dual[1]
        if num != 0:
            continue
        dx, dy = d
        den = Fraction(1)
        from math import gcd

        q = dx.denominator * dy.denominator // math.gcd(
            dx.denominator, dy.denominator
        )
        ix, iy = int(dx * q), int(dy * q)
        prim, gg = _primitive((ix, iy))
        seg_len = (dx / prim[0]) if prim[0] else (dy / prim[1])
        edges.append((i, j, prim, seg_len, w))
    # rays: boundary edges of each cell lying on the Newton hull boundary
    hull = _hull2d(pts)
    nh = len(hull)
    hull_edges = []
    for a, b in zip(hull, hull[1:] + hull[:1]):
        hull_edges.append((a, b))

    def on_hull_boundary(a, b):
        for (h1, h2) in hull_edges:
            d = (h2[0] - h1[0], h2[1] - h1[1])
            c1 = (a[0] - h1[0]) * d[1] - (a[1] - h1[1]) * d[0]
            c2 = (b[0] - h1[0]) * d[1] - (b[1] - h1[1]) * d[0]
            if c1 == 0 and c2 == 0:
                t1 = (a[0] - h1[0]) * d[0] + (a[1] - h1[1]) * d[1]
                t2 = (b[0] - h1[0]) * d[0] + (b[1] - h1[1]) * d[1]
                L = d[0] * d[0] + d[1] * d[1]
                if 0 <= min(t1, t2) and max(t1, t2) <= L:
                    return d
        return None

    rays = []
    for i, cell in enumerate(cells):
        m = len(cell)
        for a, b in zip(cell, cell[1:] + cell[:1]):
            d = on_hull_boundary(a, b)
            if d is None:
                continue
            prim_dual, w = _primitive((b[0] - a[0], b[1] - a[1]))
            # outward normal of the hull edge (hull is ccw)
            nx, ny = d[1], -d[0]
            pn, _ = _primitive((nx, ny))
            rays.append((i, pn, w))
    return TropicalCurve(verts, cells, edges, rays, hull)


def check_balancing(curve: TropicalCurve) -> bool:
    for v in range(len(curve.vertices)):
        sx = sy = 0
        for (prim, wt, _key) in curve.incident(v):
            sx += wt * prim[0]
            sy += wt * prim[1]
        if (sx, sy) != (0, 0):
            return False
    return True


# ---------------------------------------------------------------------------
# harmonic 1-forms


@dataclass
class HarmonicOneForm:
    curve: TropicalCurve
    edge_values: List[Fraction]   # on bounded edges, oriented v1 -> v2
    ray_values: List[Fraction]    # outflows on rays

    def value(self, key) -> Fraction:
        kind, i, sgn = key
        if kind == "e":
            return sgn * self.edge_values[i]
        return sgn * self.ray_values[i]


def _exact_solve(rows: List[List[Fraction]], rhs: List[Fraction]
                 ) -> List[Fraction]:
    """Solve a (possibly overdetermined, consistent) rational linear system
    by Gaussian elimination; raises on inconsistency or underdeterminacy."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    A = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        fac = A[r][c]
        A[r] = [v / fac for v in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [vi - f * vr for vi, vr in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if A[i][n] != 0:
            raise OverdeterminedInconsistent("inconsistent linear system")
    if len(piv_cols) < n:
        raise InconsistentOutflows("harmonic system is underdetermined")
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = A[i][n]
    return x


def harmonic_form(curve: TropicalCurve, outflows: Sequence[Fraction]
                  ) -> HarmonicOneForm:
    """The unique 1-form with the given ray outflows that is co-closed at
    every vertex and closed around every bounded face."""
    outflows = [Fraction(o) for o in outflows]
    if len(outflows) != len(curve.rays):
        raise InconsistentOutflows(
            f"need {len(curve.rays)} outflow values, got {len(outflows)}"
        )
    if sum(outflows) != 0:
        raise InconsistentOutflows("outflows must sum to zero")
    ne = len(curve.edges)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    # co-closedness at vertices
    for v in range(len(curve.vertices)):
        row = [Fraction(0)] * ne
        b = Fraction(0)
        for (prim, wt, key) in curve.incident(v):
            kind, i, sgn = key
            if kind == "e":
                row[i] += sgn
            else:
                b -= sgn * outflows[i]
        rows.append(row)
        rhs.append(b)
    # closedness around independent cycles
    import networkx as nx

    G = nx.MultiGraph()
    G.add_nodes_from(range(len(curve.vertices)))
    for i, (v1, v2, prim, ln, wt) in enumerate(curve.edges):
        G.add_edge(v1, v2, key=i)
    try:
        cycles = nx.cycle_basis(nx.Graph(G))
    except Exception:
        cycles = []
    for cyc in cycles:
        row = [Fraction(0)] * ne
        m = len(cyc)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            # find an edge joining a and b
            for i, (v1, v2, prim, ln, wt) in enumerate(curve.edges):
                if (v1, v2) == (a, b):
                    row[i] += ln
                    break
                if (v1, v2) == (b, a):
                    row[i] -= ln
                    break
        rows.append(row)
        rhs.append(Fraction(0))
    vals = _exact_solve(rows, rhs)
    return HarmonicOneForm(curve, vals, outflows)


def check_harmonic(form: HarmonicOneForm) -> Tuple[Fraction, Fraction]:
    """(max vertex residual, max cycle residual), exact."""
    curve = form.curve
    vmax = Fraction(0)
    for v in range(len(curve.vertices)):
        s = Fraction(0)
        for (prim, wt, key) in curve.incident(v):
            s += form.value(key)
        vmax = max(vmax, abs(s))
    import networkx as nx

    G = nx.Graph()
    for i, (v1, v2, prim, ln, wt) in enumerate(curve.edges):
        G.add_edge(v1, v2, idx=i)
    cmax = Fraction(0)
    for cyc in nx.cycle_basis(G):
        s = Fraction(0)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            i = G.edges[a, b]["idx"]
            v1, v2, prim, ln, wt = curve.edges[i]
            s += ln * form.edge_values[i] * (1 if (v1, v2) == (a, b) else -1)
        cmax = max(cmax, abs(s))
    return vmax, cmax


# ---------------------------------------------------------------------------
# the tropical inverse map


@dataclass
class TropicalImageVertex:
    point: Optional[Point]  # None for high-degree vertices (cells)
    cell_primitives: Optional[List[Tuple[int, int]]] = None
    cell_lengths: Optional[List[int]] = None
    cell_c: Optional[List[Fraction]] = None


def tropical_image(curve: TropicalCurve, form: HarmonicOneForm
                   ) -> List[TropicalImageVertex]:
    """Image data of the piecewise-linear inverse parametrization.

    A vertex of the tropical curve imposes, per incident edge with primitive
    direction e and value omega, the line <(x, y), e> + omega = 0.  At
    trivalent vertices the lines are concurrent (by harmonicity) and the
    vertex maps to the common point; at vertices of degree >= 4 the lines
    bound an astroidal cell, returned via its Newton-polygon data: the
    side primitives are the incident-edge directions rotated by +90
    degrees, with c-values the negated omegas.
    """
    out: List[TropicalImageVertex] = []
    for v in range(len(curve.vertices)):
        inc = curve.incident(v)
        if len(inc) < 3:
            out.append(TropicalImageVertex(None))
            continue
        rows = []
        rhs = []
        for (prim, wt, key) in inc:
            rows.append([Fraction(prim[0]), Fraction(prim[1])])
            rhs.append(-form.value(key))
        if len(inc) == 3:
            try:
                x, y = _exact_solve(rows, rhs)
            except OverdeterminedInconsistent:
                raise OverdeterminedInconsistent(
                    f"lines at trivalent vertex {v} are not concurrent"
                )
            out.append(TropicalImageVertex((x, y)))
            continue
        # high-degree vertex: the lines bound an astroidal cell whose
        # Newton polygon has sides dual to the incident edges
        prims = []
        lens = []
        cs = []
        for (prim, wt, key) in inc:
            # side direction: rotate the incident direction by +90
            side = (-prim[1], prim[0])
            prims.append(side)
            lens.append(wt)
            cs.append(-form.value(key))
        # sort sides counterclockwise
        order = sorted(
            range(len(prims)),
            key=lambda i: math.atan2(prims[i][1], prims[i][0]) % (2 * math.pi),
        )
        out.append(
            TropicalImageVertex(
                None,
                [prims[i] for i in order],
                [lens[i] for i in order],
                [cs[i] for i in order],
            )
        )
    return out
