"""Astroidal zig-zag graphs.

Given a minimal periodic graph and one boundary strand per side of the
Newton polygon, this module cuts out the finite graph enclosed by the
boundary zig-zag paths, verifies the AZ conditions, and computes the
combinatorial data consumed by the inverse Kasteleyn formula: colors,
the boundary divisor, chambers and their sign functions, the flat
sections labeling sign changes by convex corners, and the pole intervals.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from . import geom
from .geom import QPoint, add, scale, sub
from .errors import (
    NonSimpleMedialCycle,
    NonConsecutiveRevisit,
    UnsupportedDegenerate,
)
from .lattice import (
    AbelMap,
    B2W,
    Cell,
    LiftedSystem,
    NewtonPolygon,
    SparseDivisor,
    Strand,
    TorusGraph,
    W2B,
    _cell_add,
    _cell_sub,
    newton_polygon,
    trace_strands,
)

LiftedEdge = Tuple[int, Cell]  # (torus edge index, cell of its white end)
LiftedVertex = Tuple[str, int, Cell]

BLACK = 1
WHITE = -1


@dataclass(frozen=True)
class IntervalOnN:
    """Closed cyclic vertex interval [l, r] on the Newton polygon boundary,
    counterclockwise; vertices are labeled by index i (corner v_i is the
    shared endpoint of sides e_i and e_{i+1})."""

    left: int
    right: int
    n: int

    def vertices(self) -> List[int]:
        out = [self.left]
        v = self.left
        while v != self.right:
            v = (v + 1) % self.n
            out.append(v)
        return out

    def edge_indices(self) -> List[int]:
        """Sides of N contained in the interval: side e_{i+1} joins v_i to
        v_{i+1} (0-based edge index i+1 mod n)."""
        out = []
        v = self.left
        while v != self.right:
            nxt = (v + 1) % self.n
            out.append(nxt)  # edge index joining v to v+1
            v = nxt
        return out

    def contains_vertex(self, v: int) -> bool:
        return v in self.vertices()

    def __repr__(self):
        return f"[v{self.left},v{self.right}]"


class SignFunction:
    """A +/- coloring of the sides of N with its four sign-change corners."""

    def __init__(self, signs: Dict[int, int], n: int):
        self.signs = dict(signs)
        self.n = n

    def sign(self, e: int) -> int:
        return self.signs[e]

    def sign_changes(self) -> List[int]:
        out = []
        for v in range(self.n):
            e_minus = v  # side e_v joins v_{v-1} to v_v -> index v
            e_plus = (v + 1) % self.n
            if self.signs[e_minus] != self.signs[e_plus]:
                out.append(v)
        return out

    def flipped(self, e: int) -> "SignFunction":
        s = dict(self.signs)
        s[e] = -s[e]
        return SignFunction(s, self.n)

    def runs(self) -> List[Tuple[int, IntervalOnN]]:
        """Maximal constant-sign runs as (sign, closed vertex interval).

        The run of sides strictly between consecutive sign changes l and r
        corresponds to the closed vertex interval [l, r]."""
        sc = self.sign_changes()
        out = []
        for a, b in zip(sc, sc[1:] + sc[:1]):
            iv = IntervalOnN(a, b, self.n)
            e = iv.edge_indices()[0]
            out.append((self.signs[e], iv))
        return out

    def __eq__(self, other):
        return isinstance(other, SignFunction) and self.signs == other.signs

    def __repr__(self):
        return "".join("+" if self.signs[e] > 0 else "-" for e in sorted(self.signs))


@dataclass
class AZGraph:
    """A finite astroidal zig-zag graph with its boundary metadata."""

    g: TorusGraph
    strands: List[Strand]
    polygon: NewtonPolygon
    system: LiftedSystem
    abel: AbelMap
    selection: Dict[int, Fraction]
    boundary: Dict[int, Tuple[int, Cell]]  # N side -> (strand id, class cell)
    medial_cycle: List[QPoint]
    corner_medial: Dict[int, LiftedEdge]  # N corner v -> medial vertex e_v
    colors: Dict[int, int]  # N side -> BLACK/WHITE
    edges: List[LiftedEdge]
    whites: List[LiftedVertex]
    blacks: List[LiftedVertex]
    outer_tags: Dict[LiftedVertex, List[int]]  # vertex -> N sides it is outer for
    piece_vertices: Dict[int, Set[LiftedVertex]]
    D_beta: SparseDivisor
    admissible: bool
    deg_D_beta: int

    _sign_cache: Dict[LiftedVertex, SignFunction] = field(default_factory=dict)
    _section_cache: Dict[Tuple, int] = field(default_factory=dict)

    # ------------------------------------------------------------------
    @property
    def n_sides(self) -> int:
        return self.polygon.n_sides

    def vertex_pos(self, v: LiftedVertex) -> QPoint:
        return self.g.vpos(v)

    def edge_pair(self, le: LiftedEdge) -> Tuple[LiftedVertex, LiftedVertex]:
        e, cell = le
        return self.g.edge_endpoints(e, cell)

    def edge_strand_pair(self, le: LiftedEdge):
        """((sid_a, idx_a), (sid_b, idx_b)) for the edge's two strand passes:
        the first traverses the edge white-to-black, the second black-to-white;
        the genus-zero Kasteleyn entry is angle(second) - angle(first)."""
        e, cell = le
        out = []
        for o in (W2B, B2W):
            sid, pos = self.abel.dart_strand((e, o))
            idx = self.system.lift_index(
                sid, _cell_sub(cell, self.strands[sid].cells[pos])
            )
            out.append((sid, idx))
        return tuple(out)

    def sign_beta(self) -> SignFunction:
        return SignFunction({e: self.colors[e] for e in self.colors}, self.n_sides)

    def convex_vertices(self) -> List[Tuple[int, int]]:
        """The four convex corners of N as (corner index, sign), where the
        sign is +1 when the color changes black-to-white (ccw) at the
        corner."""
        out = []
        n = self.n_sides
        for v in range(n):
            c_minus = self.colors[v]
            c_plus = self.colors[(v + 1) % n]
            if c_minus != c_plus:
                out.append((v, 1 if (c_minus, c_plus) == (BLACK, WHITE) else -1))
        return out

    # -- chambers ------------------------------------------------------

    def _boundary_lift_key(self, e: int) -> Tuple[int, Fraction]:
        sid, cls = self.boundary[e]
        return (sid, self.system.lift_index(sid, cls))

    def side_of_boundary(self, x: LiftedVertex, e: int) -> int:
        """+1 when x lies left of the boundary strand of side e, -1 right.

        Combinatorial rule read off the discrete Abel map: the coefficient
        of d(x) at a lift records whether a path from the reference face to
        x crosses it, and crossings towards positive lift indices carry +1.
        A vertex is left of a positively indexed lift iff the lift is not
        crossed, and left of a negatively indexed one iff it is.  (Vertices
        on the strand itself land on their color's side: whites left,
        blacks right.)
        """
        sid, idx = self._boundary_lift_key(e)
        coeff = self.abel.value((x[0], x[1], x[2])).coefficient((sid, idx))
        if idx > 0:
            return 1 if coeff == 0 else -1
        return 1 if coeff != 0 else -1

    def chamber_sign(self, x: LiftedVertex) -> SignFunction:
        """Sign function of the chamber containing x: + when x lies left of
        the boundary strand."""
        if x in self._sign_cache:
            return self._sign_cache[x]
        signs = {e: self.side_of_boundary(x, e) for e in self.boundary}
        sf = SignFunction(signs, self.n_sides)
        self._sign_cache[x] = sf
        return sf

    def point_sign(self, p: QPoint) -> SignFunction:
        signs = {}
        for e, (sid, cls) in self.boundary.items():
            signs[e] = self.system.side_of_lift(p, sid, cls)
        return SignFunction(signs, self.n_sides)

    def r_in(self, x: LiftedVertex, resolve: Optional[int] = None
             ) -> Tuple[SignFunction, Optional[int]]:
        """Sign function of the inner chamber R^in_x, plus the side used to
        resolve an outer vertex (None when x is inner)."""
        sf = self.chamber_sign(x)
        tags = self.outer_tags.get(x, [])
        if not tags:
            return sf, None
        e = min(tags) if resolve is None else resolve
        if e not in tags:
            raise ValueError(f"{x} is not outer for side {e}")
        return sf.flipped(e), e

    def is_outer(self, x: LiftedVertex) -> bool:
        return bool(self.outer_tags.get(x))

    # -- combinatorial chamber walk ---------------------------------------

    def _adjacency(self) -> Dict[LiftedVertex, List[Tuple[LiftedVertex, int]]]:
        if not hasattr(self, "_adj"):
            adj: Dict[LiftedVertex, List[Tuple[LiftedVertex, int]]] = {}
            for k, le in enumerate(self.edges):
                vw, vb = self.edge_pair(le)
                adj.setdefault(vw, []).append((vb, k))
                adj.setdefault(vb, []).append((vw, k))
            self._adj = adj
        return self._adj

    def _graph_path(self, src: LiftedVertex, dst: LiftedVertex,
                    rng: Optional[random.Random] = None) -> List[LiftedVertex]:
        """A path in the AZ graph between two vertices; randomized when a
        generator is supplied (for transport-consistency tests)."""
        adj = self._adjacency()
        from collections import deque

        prev: Dict[LiftedVertex, LiftedVertex] = {src: src}
        q = deque([src])
        while q:
            cur = q.popleft()
            if cur == dst:
                break
            nbrs = [v for v, _k in adj.get(cur, ())]
            if rng is not None:
                rng.shuffle(nbrs)
            for v in nbrs:
                if v not in prev:
                    prev[v] = cur
                    q.append(v)
        if dst not in prev:
            raise RuntimeError(f"no path {src} -> {dst}")
        path = [dst]
        while path[-1] != src:
            path.append(prev[path[-1]])
        path.reverse()
        return path

    def _step_mark(self, sf: SignFunction, mark: int, e: int
                   ) -> Tuple[SignFunction, int]:
        """Cross the boundary strand of side e: flip the sign at e and move
        the marked sign change accordingly."""
        new_sf = sf.flipped(e)
        old_sc = sf.sign_changes()
        new_sc = new_sf.sign_changes()
        if len(old_sc) != 4 or len(new_sc) != 4:
            raise RuntimeError("chamber walk left the inner region")
        gone = set(old_sc) - set(new_sc)
        born = set(new_sc) - set(old_sc)
        if len(gone) == 1 and len(born) == 1:
            if mark in gone:
                mark = born.pop()
        elif gone or born:
            raise RuntimeError("sign-change set moved by more than one step")
        return new_sf, mark

    def _move_between(self, sf: SignFunction, mark: int,
                      target: SignFunction) -> Tuple[SignFunction, int]:
        """Apply the flips taking sf to target (at most a few sides), in an
        order keeping four sign changes throughout."""
        diffs = [e for e in range(self.n_sides)
                 if sf.sign(e) != target.sign(e)]
        if not diffs:
            return sf, mark
        if len(diffs) > 4:
            raise RuntimeError("chamber step differs at too many sides")
        for order in itertools.permutations(diffs):
            cur_sf, cur_mark = sf, mark
            try:
                for e in order:
                    cur_sf, cur_mark = self._step_mark(cur_sf, cur_mark, e)
                return cur_sf, cur_mark
            except RuntimeError:
                continue
        raise RuntimeError("no valid flip order between chambers")

    # -- sections by combinatorial parallel transport ----------------------

    def section_value(self, x: LiftedVertex, v: int,
                      rng: Optional[random.Random] = None,
                      resolve: Optional[int] = None) -> int:
        """s_v(R^in_x): the sign change of R^in_x labeled by convex corner v.

        Anchored at the corner chamber R_v, which is the inner chamber
        R^in of either endpoint of the corner's medial edge, and transported
        along the R^in chambers of a vertex walk through the AZ graph.
        Every crossing moves exactly one of the four sign changes one step;
        the connection is flat, so the result is path independent.  Pass
        `rng` to take a randomized path (transport-consistency tests).
        """
        cache_key = (x, v, resolve)
        if rng is None and cache_key in self._section_cache:
            return self._section_cache[cache_key]
        target_sf, _e = self.r_in(x, resolve)
        if len(target_sf.sign_changes()) != 4:
            raise RuntimeError(f"R^in of {x} is not an inner chamber")
        e_minus, e_plus = v, (v + 1) % self.n_sides
        white_side = e_plus if self.colors[e_plus] == WHITE else e_minus
        black_side = e_minus if white_side == e_plus else e_plus
        w0, b0 = self.edge_pair(self.corner_medial[v])
        anchor = None
        if white_side in self.outer_tags.get(w0, []):
            anchor, anchor_sf = w0, self.r_in(w0, resolve=white_side)[0]
        elif black_side in self.outer_tags.get(b0, []):
            anchor, anchor_sf = b0, self.r_in(b0, resolve=black_side)[0]
        if anchor is None:
            raise RuntimeError(f"cannot anchor the corner chamber at v{v}")
        if (anchor_sf.sign(e_minus) != self.colors[e_minus]
                or anchor_sf.sign(e_plus) != self.colors[e_plus]
                or v not in anchor_sf.sign_changes()):
            raise RuntimeError(f"anchor chamber at v{v} is inconsistent")
        last_err: Optional[Exception] = None
        seeds = [rng] if rng is not None else [
            None, random.Random(11), random.Random(23), random.Random(37),
            random.Random(53), random.Random(71), random.Random(89),
            random.Random(101), random.Random(131), random.Random(151),
        ]

        def chamber_candidates(y: LiftedVertex) -> List[SignFunction]:
            tags = self.outer_tags.get(y, [])
            if not tags:
                return [self.chamber_sign(y)]
            return [self.chamber_sign(y).flipped(e) for e in tags]

        def walk(states: List[List[SignFunction]], sf: SignFunction,
                 mark: int, i: int) -> Optional[int]:
            if i == len(states):
                try:
                    _sf2, mark2 = self._move_between(sf, mark, target_sf)
                except RuntimeError:
                    return None
                return mark2
            for cand in states[i]:
                if cand == sf:
                    res = walk(states, sf, mark, i + 1)
                    if res is not None:
                        return res
                    continue
                try:
                    sf2, mark2 = self._move_between(sf, mark, cand)
                except RuntimeError:
                    continue
                res = walk(states, sf2, mark2, i + 1)
                if res is not None:
                    return res
            return None

        for r in seeds:
            try:
                path = self._graph_path(anchor, x, r)
            except RuntimeError as err:
                last_err = err
                continue
            states = [chamber_candidates(y) for y in path[1:]]
            res = walk(states, anchor_sf, v, 0)
            if res is not None:
                if rng is None:
                    self._section_cache[cache_key] = res
                return res
            last_err = RuntimeError("no chamber walk along path")
        raise RuntimeError(f"section transport failed: {last_err}")

    def _sc_pattern(self, sf: SignFunction, u: int) -> int:
        """Direction of the sign change at corner u: +1 for black-to-white
        (counterclockwise), -1 for white-to-black."""
        e_minus = u
        e_plus = (u + 1) % self.n_sides
        return 1 if (sf.sign(e_minus), sf.sign(e_plus)) == (BLACK, WHITE) else -1

    def complete_sections(self, sf: SignFunction, anchor_corner: int,
                          anchor_value: int) -> Dict[int, int]:
        """All four sections of the chamber `sf` from one anchored value.

        Sections preserve the cyclic order of the convex corners and the
        color-change direction of their sign changes, so a single anchor
        determines the rest.
        """
        corners = [v for v, _s in self.convex_vertices()]
        sc = sf.sign_changes()
        if len(sc) != 4 or len(corners) != 4:
            raise RuntimeError("sections need four sign changes and corners")
        ci = corners.index(anchor_corner)
        ui = sc.index(anchor_value)
        out = {}
        for k in range(4):
            c = corners[(ci + k) % 4]
            u = sc[(ui + k) % 4]
            sign_c = next(s for vv, s in self.convex_vertices() if vv == c)
            if self._sc_pattern(sf, u) != sign_c:
                raise RuntimeError("section completion breaks directions")
            out[c] = u
        return out

    # -- pole intervals ----------------------------------------------------

    def pole_interval(self, x: LiftedVertex, v: int) -> IntervalOnN:
        """I_x: the sign interval of R^in_x of color opposite to x, adjacent
        to the section s_v(R^in_x)."""
        sf_in, _ = self.r_in(x)
        color_x = BLACK if x[0] == "b" else WHITE
        s = self.section_value(x, v)
        candidates = [
            iv for sign, iv in sf_in.runs()
            if sign == -color_x and (iv.left == s or iv.right == s)
        ]
        if len(candidates) != 1:
            raise RuntimeError(
                f"expected one opposite-color interval at section {s}; "
                f"got {candidates}"
            )
        return candidates[0]


# ---------------------------------------------------------------------------
# construction


def _strand_pass_positions(system: LiftedSystem, sid: int, cls: Cell,
                           kmax: int) -> Dict[LiftedEdge, int]:
    """Linear positions of the lifted strand's passes: lifted edge ->
    integer position along the strand (one period has len(darts) steps)."""
    s = system.strands[sid]
    out: Dict[LiftedEdge, int] = {}
    n = len(s.darts)
    for k in range(-kmax, kmax + 1):
        for i, (d, c) in enumerate(zip(s.darts, s.cells)):
            cc = (
                cls[0] + c[0] + k * s.homology[0],
                cls[1] + c[1] + k * s.homology[1],
            )
            out[(d[0], cc)] = k * n + i
    return out


def construct_az_graph(g: TorusGraph, selection: Dict[int, Fraction],
                       radius: Optional[int] = None) -> AZGraph:
    """Build the AZ graph for a boundary selection c_beta.

    `selection` maps Newton-polygon side index (0-based, sides ordered
    counterclockwise starting from the side of smallest direction angle) to
    the half-integer lift index of the chosen boundary strand.

    Raises NonSimpleMedialCycle / NonConsecutiveRevisit when the AZ
    conditions 1-2 fail; admissibility (condition 3) is reported on the
    result, not raised.
    """
    strands = trace_strands(g)
    polygon = newton_polygon(g, strands)
    n = polygon.n_sides
    if set(selection) != set(range(n)):
        raise ValueError(f"selection must cover sides 0..{n - 1}")
    cmax = max(abs(Fraction(c)) for c in selection.values())
    if radius is None:
        radius = int(cmax + Fraction(7, 2))
    system = LiftedSystem(g, strands, polygon, radius=radius)
    abel = AbelMap(system)

    boundary: Dict[int, Tuple[int, Cell]] = {}
    for e in range(n):
        boundary[e] = system.family_lift(e, Fraction(selection[e]))

    # pass positions along each boundary strand
    positions = {
        e: _strand_pass_positions(system, sid, cls, radius + 2)
        for e, (sid, cls) in boundary.items()
    }

    # corner medial vertices e_v: common lifted edge of the two boundary
    # strands at corner v (sides e_v and e_{v+1})
    corner_medial: Dict[int, LiftedEdge] = {}
    for v in range(n):
        e_minus, e_plus = v, (v + 1) % n
        common = set(positions[e_minus]) & set(positions[e_plus])
        if not common:
            raise NonSimpleMedialCycle(
                f"boundary strands of sides {e_minus},{e_plus} do not cross "
                f"in the window"
            )
        corner_medial[v] = min(
            common, key=lambda le: (le[1][0] ** 2 + le[1][1] ** 2, le)
        )

    # assemble the medial cycle: corners in clockwise cyclic order of v,
    # joined along the boundary strands
    pieces: Dict[int, List[LiftedEdge]] = {}
    colors: Dict[int, int] = {}
    for e in range(n):
        v_plus = e  # side e joins corner v_{e-1} to corner v_e
        v_minus = (e - 1) % n
        sid, cls = boundary[e]
        pos = positions[e]
        t1 = pos[corner_medial[v_plus]]
        t0 = pos[corner_medial[v_minus]]
        inv = {t: le for le, t in pos.items()}
        if t0 >= t1:
            piece = [inv[t] for t in range(t1, t0 + 1)]
            colors[e] = BLACK
        else:
            piece = [inv[t] for t in range(t1, t0 - 1, -1)]
            colors[e] = WHITE
        pieces[e] = piece

    cycle_edges: List[LiftedEdge] = []
    for e in range(n - 1, -1, -1):
        piece = pieces[e]
        if cycle_edges and cycle_edges[-1] == piece[0]:
            cycle_edges.extend(piece[1:])
        else:
            cycle_edges.extend(piece)
    if cycle_edges and cycle_edges[0] == cycle_edges[-1]:
        cycle_edges.pop()
    medial_cycle = [g.edge_midpoint(e, c) for (e, c) in cycle_edges]

    if len(set(cycle_edges)) != len(cycle_edges):
        raise NonSimpleMedialCycle("medial boundary revisits a medial vertex")
    if not geom.polyline_is_simple(medial_cycle, closed=True):
        raise NonSimpleMedialCycle("medial boundary cycle is not simple")
    if geom.polygon_area2(medial_cycle) <= 0:
        raise NonSimpleMedialCycle("medial boundary cycle is clockwise")

    # condition 2: visits of each graph vertex along the cycle are
    # consecutive
    L = len(cycle_edges)
    visit_vertex: List[Optional[LiftedVertex]] = []
    for j in range(L):
        (e1, c1), (e2, c2) = cycle_edges[j], cycle_edges[(j + 1) % L]
        ends1 = set(g.edge_endpoints(e1, c1))
        ends2 = set(g.edge_endpoints(e2, c2))
        shared = ends1 & ends2
        if len(shared) != 1:
            raise NonSimpleMedialCycle(
                f"consecutive medial vertices {j},{j + 1} do not share a vertex"
            )
        visit_vertex.append(shared.pop())
    by_vertex: Dict[LiftedVertex, List[int]] = {}
    for j, x in enumerate(visit_vertex):
        by_vertex.setdefault(x, []).append(j)
    for x, js in by_vertex.items():
        if len(js) == 1:
            continue
        js_sorted = sorted(js)
        gaps = [
            (js_sorted[(i + 1) % len(js_sorted)] - js_sorted[i]) % L
            for i in range(len(js_sorted))
        ]
        # consecutive visits iff all but one gap are 1
        if sorted(gaps)[:-1] != [1] * (len(gaps) - 1):
            raise NonConsecutiveRevisit(
                f"vertex {x} revisited non-consecutively at positions {js}"
            )

    # membership: edges whose midpoint lies weakly inside the medial cycle;
    # a float winding test with a safety margin handles the bulk, falling
    # back to the exact test near the boundary
    member_edges: List[LiftedEdge] = []
    r = radius
    poly_f = [(float(px), float(py)) for (px, py) in medial_cycle]
    xs = [p[0] for p in poly_f]
    ys = [p[1] for p in poly_f]
    bbox = (min(xs) - 1, min(ys) - 1, max(xs) + 1, max(ys) + 1)
    npoly = len(poly_f)

    def near_boundary(px: float, py: float, margin: float = 1e-7) -> bool:
        for i in range(npoly):
            (x1, y1), (x2, y2) = poly_f[i], poly_f[(i + 1) % npoly]
            dx, dy = x2 - x1, y2 - y1
            L2 = dx * dx + dy * dy
            t = 0.0 if L2 == 0 else max(
                0.0, min(1.0, ((px - x1) * dx + (py - y1) * dy) / L2)
            )
            qx, qy = x1 + t * dx, y1 + t * dy
            if (px - qx) ** 2 + (py - qy) ** 2 < margin:
                return True
        return False

    def inside_float(px: float, py: float) -> bool:
        inside = False
        for i in range(npoly):
            (x1, y1), (x2, y2) = poly_f[i], poly_f[(i + 1) % npoly]
            if (y1 > py) != (y2 > py):
                xi = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
                if xi > px:
                    inside = not inside
        return inside

    rc0 = g.ref_cell
    for e in range(len(g.edges)):
        for cx in range(rc0[0] - r, rc0[0] + r + 1):
            for cy in range(rc0[1] - r, rc0[1] + r + 1):
                le = (e, (cx, cy))
                m = g.edge_midpoint(e, (cx, cy))
                mf = (float(m[0]), float(m[1]))
                if not (bbox[0] <= mf[0] <= bbox[2] and bbox[1] <= mf[1] <= bbox[3]):
                    continue
                if near_boundary(*mf):
                    if geom.point_in_polygon(m, medial_cycle) >= 0:
                        member_edges.append(le)
                elif inside_float(*mf):
                    member_edges.append(le)
    whites: Set[LiftedVertex] = set()
    blacks: Set[LiftedVertex] = set()
    for le in member_edges:
        vw, vb = g.edge_endpoints(le[0], le[1])
        whites.add(vw)
        blacks.add(vb)

    # outer tags
    piece_vertices: Dict[int, Set[LiftedVertex]] = {}
    for e, piece in pieces.items():
        vs: Set[LiftedVertex] = set()
        for (ei, ci) in piece:
            for vv in g.edge_endpoints(ei, ci):
                vs.add(vv)
        piece_vertices[e] = vs
    # x is beta_e-outer iff it lies on the zig-zag path of the side's piece
    # and on the exterior side of the strand: right of it for a black side
    # (where traversal follows the strand) and left for a white side.  The
    # side is read combinatorially from the Abel coefficient at the
    # boundary lift.
    outer_tags: Dict[LiftedVertex, List[int]] = {}
    for e, vs in piece_vertices.items():
        sid, cls = boundary[e]
        idx = system.lift_index(sid, cls)
        for x in vs:
            coeff = abel.value((x[0], x[1], x[2])).coefficient((sid, idx))
            side = (1 if coeff == 0 else -1) if idx > 0 else (1 if coeff != 0 else -1)
            if side == -colors[e]:
                outer_tags.setdefault(x, []).append(e)
    for x in outer_tags:
        outer_tags[x].sort()

    # D_beta from one outer vertex per side
    D = SparseDivisor()
    family_strands = {
        e: set(polygon.edges[e].strand_ids) for e in range(n)
    }
    for e in range(n):
        cands = [x for x, tags in outer_tags.items() if e in tags]
        if not cands:
            raise UnsupportedDegenerate(f"no outer vertex for side {e}")
        x = min(cands)
        dx = abel.value((x[0], x[1], x[2]))
        D = D + (-dx.restrict_strands(family_strands[e]))
    deg = D.degree()

    az = AZGraph(
        g=g,
        strands=strands,
        polygon=polygon,
        system=system,
        abel=abel,
        selection={e: Fraction(c) for e, c in selection.items()},
        boundary=boundary,
        medial_cycle=medial_cycle,
        corner_medial=corner_medial,
        colors=colors,
        edges=sorted(member_edges),
        whites=sorted(whites),
        blacks=sorted(blacks),
        outer_tags=outer_tags,
        piece_vertices=piece_vertices,
        D_beta=D,
        admissible=(deg == 0),
        deg_D_beta=deg,
    )
    return az


def check_admissibility(az: AZGraph) -> Tuple[bool, int]:
    """(admissible, deg D_beta); also evaluates the boundary-index criterion
    sum c = (#white sides - #black sides)/2 and asserts the two agree."""
    deg = az.deg_D_beta
    n_white = sum(1 for e in az.colors.values() if e == WHITE)
    n_black = sum(1 for e in az.colors.values() if e == BLACK)
    csum = sum(az.selection.values())
    lemma_ok = csum == Fraction(n_white - n_black, 2)
    if lemma_ok != (deg == 0):
        raise AssertionError(
            f"admissibility criteria disagree: deg(D_beta)={deg}, "
            f"sum c={csum}, (w-b)/2={Fraction(n_white - n_black, 2)}"
        )
    return (deg == 0, deg)
