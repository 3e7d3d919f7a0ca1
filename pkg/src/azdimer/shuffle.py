"""Weighted domino shuffling on Aztec diamonds.

The diamond is realized inside the diagonal square lattice used by the
``square1x1`` preset: whites sit at (a + 1/4, b + 1/4), blacks at
(a + 3/4, b + 3/4), and the order-n diamond AD_n collects the vertices
within L1 distance n - 1/2 of the point (3/4, 1/4).  Dominoes are lattice
edges; the 2x2 blocks of the classical picture are the quadrilateral
faces, which come in two alternating classes.  One shuffling round
destroys opposite-pair faces, slides every domino across its active face,
and fills the uncovered active faces with an opposite pair drawn with odds
proportional to the products of the pair weights.  Weights for earlier
rounds come from the spider-move (urban renewal) recursion, computed on
the periodic weight pattern.

Exactness of the sampler is locked by total-variation tests against
brute-force enumeration at small orders.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

Vertex = Tuple[str, int, int]  # ('w'|'b', a, b)
Edge = Tuple[int, int, int]    # (direction 0..3, a, b): white (a,b) to black
# black cell of edge (d, a, b): (a, b) + OFFSETS[d]
OFFSETS = [(0, 0), (-1, 0), (0, -1), (-1, -1)]

# faces: class 0 ("vertical", like the reference face of square1x1) has its
# whites north/south; class 1 has them east/west.  The face of class 0 at
# anchor (a, b) touches whites (a,b),(a,b+1) and blacks (a-1,b),(a,b);
# its four edges in opposite pairs:
#   pair X: (0,a,b) [w(a,b)-b(a,b)]      and (3,a,b+1) [w(a,b+1)-b(a-1,b)]
#   pair Y: (1,a,b) [w(a,b)-b(a-1,b)]    and (2,a,b+1) [w(a,b+1)-b(a,b)]
# the face of class 1 at anchor (a, b) touches whites (a,b),(a+1,b) and
# blacks (a,b-1),(a,b):
#   pair X: (0,a,b) [w(a,b)-b(a,b)]      and (2,a+1,b) [w(a+1,b)-b(a,b-1)]
#   pair Y: (2,a,b) [w(a,b)-b(a,b-1)]    and (0,a+1,b) ... see _face_edges


def edge_endpoints(e: Edge) -> Tuple[Vertex, Vertex]:
    d, a, b = e
    off = OFFSETS[d]
    return (("w", a, b), ("b", a + off[0], b + off[1]))


def _face_edges(cls: int, a: int, b: int) -> Tuple[Tuple[Edge, Edge], Tuple[Edge, Edge]]:
    """The two opposite edge pairs of the face of the given class anchored
    at (a, b)."""
    if cls == 0:
        # vertices: w(a,b) S, b(a,b) E, w(a,b+1) N, b(a-1,b) W
        return ((0, a, b), (3, a, b + 1)), ((1, a, b), (2, a, b + 1))
    # vertices: w(a,b) W, b(a,b-1) S, w(a+1,b) E, b(a,b) N
    return ((0, a, b), (3, a + 1, b)), ((2, a, b), (1, a + 1, b))


def _face_vertices(cls: int, a: int, b: int) -> List[Vertex]:
    if cls == 0:
        return [("w", a, b), ("b", a, b), ("w", a, b + 1), ("b", a - 1, b)]
    return [("w", a, b), ("b", a, b - 1), ("w", a + 1, b), ("b", a, b)]


def diamond_vertices(n: int) -> Tuple[List[Vertex], List[Vertex]]:
    """Whites and blacks of the order-n Aztec diamond.

    In the classical picture the diamond is the union of unit cells with
    |2i+1| + |2j+1| <= 2n; cells map to diagonal-lattice vertices by
    i = a + b (+1 for blacks), j = b - a."""
    whites = []
    blacks = []
    for a in range(-n - 1, n + 2):
        for b in range(-n - 1, n + 2):
            s, d = a + b, b - a
            if abs(2 * s + 1) + abs(2 * d + 1) <= 2 * n:
                whites.append(("w", a, b))
            if abs(2 * s + 3) + abs(2 * d + 1) <= 2 * n:
                blacks.append(("b", a, b))
    return whites, blacks


def diamond_edges(n: int) -> List[Edge]:
    whites, blacks = diamond_vertices(n)
    bset = set(blacks)
    out = []
    for (_, a, b) in whites:
        for d, off in enumerate(OFFSETS):
            if ("b", a + off[0], b + off[1]) in bset:
                out.append((d, a, b))
    return out


def active_class(k: int) -> int:
    """Face class used at round k (calibrated so the order-1 diamond is
    created from its single face, which has class 0)."""
    return 0 if k % 2 == 1 else 1


def creation_faces(n: int) -> List[Tuple[int, int, int]]:
    """Active faces whose four vertices lie in AD_n, as (cls, a, b); they
    tile AD_n."""
    cls = active_class(n)
    whites, blacks = diamond_vertices(n)
    wset, bset = set(whites), set(blacks)
    out = []
    arange = sorted({a for (_, a, b) in whites})
    brange = sorted({b for (_, a, b) in whites})
    for a in range(min(arange) - 1, max(arange) + 2):
        for b in range(min(brange) - 1, max(brange) + 2):
            vs = _face_vertices(cls, a, b)
            if all((v in wset if v[0] == "w" else v in bset) for v in vs):
                out.append((cls, a, b))
    return out


# ---------------------------------------------------------------------------
# periodic weights


class PeriodicWeights:
    """Round-indexed edge weights for a doubly periodic pattern.

    ``base`` maps (direction, a mod pa, b mod pb) to the order-n weight;
    earlier rounds are produced by the spider move at the active faces.
    """

    def __init__(self, base: Callable[[Edge], float], period: Tuple[int, int],
                 n: int):
        self.period = period
        self.n = n
        pa, pb = period
        tables: List[Dict[Tuple[int, int, int], float]] = [None] * (n + 1)
        tab = {}
        for d in range(4):
            for a in range(pa):
                for b in range(pb):
                    tab[(d, a, b)] = float(base((d, a, b)))
        tables[n] = tab
        for k in range(n, 0, -1):
            tables[k - 1] = self._renew(tables[k], active_class(k))
        self.tables = tables

    def _get(self, tab, e: Edge) -> float:
        d, a, b = e
        pa, pb = self.period
        return tab[(d, a % pa, b % pb)]

    def _renew(self, tab, cls: int) -> Dict[Tuple[int, int, int], float]:
        """Spider move at every face of the given class."""
        pa, pb = self.period
        out = {}
        for a in range(pa):
            for b in range(pb):
                (e1, e3), (e2, e4) = _face_edges(cls, a, b)
                w1, w3 = self._get(tab, e1), self._get(tab, e3)
                w2, w4 = self._get(tab, e2), self._get(tab, e4)
                delta = w1 * w3 + w2 * w4
                for e_new, w_old in ((e1, w3), (e3, w1), (e2, w4), (e4, w2)):
                    d, aa, bb = e_new
                    out[(d, aa % pa, bb % pb)] = w_old / delta
        if len(out) != 4 * pa * pb:
            raise RuntimeError("weight pattern does not respect the period")
        return out

    def weight(self, k: int, e: Edge) -> float:
        return self._get(self.tables[k], e)


def uniform_weights(n: int) -> PeriodicWeights:
    return PeriodicWeights(lambda e: 1.0, (1, 1), n)


def square2x3_weights(n: int, tau: float) -> PeriodicWeights:
    """The doubly periodic weight family of the tropical pipeline, measured
    on the diagonal lattice: weights |angle difference| on the surviving
    edges and exp(-tau k) on the tropically vanishing ones.

    The pattern has period 3 in a and 2 in b in diamond coordinates.
    """
    from . import presets
    from .lattice import trace_strands

    g, tags = presets.square2x3()
    # map the 2x3 preset's 24 edges to diamond edge classes: preset whites
    # live at (i/3, (2j+1)/4) which is diamond white (a, b) = f(i, j); the
    # preset cell spans 3 diamond columns and 2 diamond rows.
    ang = presets.tropical_pentagon_angles()
    wmap = {}
    for k, (wi, bi, off) in enumerate(g.edges):
        i, j = wi % 3, wi // 3
        # diamond coordinates of this white: a = i, b = j (one diamond cell
        # per small cell of the preset)
        a, b = i, j
        # black endpoint: index bi -> (i', j'), in cell offset `off`
        i2, j2 = bi % 3, bi // 3
        a2 = i2 + 3 * off[0]
        b2 = j2 - 1 + 2 * off[1]
        rel = (a2 - a, b2 - b)
        d = OFFSETS.index(rel)
        tag = tags[k]
        if tag[0] == "iso":
            wt = abs(ang[tag[1]] - ang[tag[2]])
            wmap[(d, a % 3, b % 2)] = lambda t, wt=wt: wt
        else:
            kk = tag[1]
            wmap[(d, a % 3, b % 2)] = lambda t, kk=kk: math.exp(-t * kk)
    if len(wmap) != 24:
        raise RuntimeError(f"expected 24 edge classes, got {len(wmap)}")

    def base(e: Edge) -> float:
        d, a, b = e
        return wmap[(d, a % 3, b % 2)](tau)

    return PeriodicWeights(base, (3, 2), n)


# ---------------------------------------------------------------------------
# the shuffling sampler


def shuffle_sample(n: int, weights: PeriodicWeights,
                   rng: random.Random) -> List[Edge]:
    """One exact sample from the Boltzmann measure on dimer covers of AD_n."""
    matching: Dict[Vertex, Edge] = {}

    def add(e: Edge):
        vw, vb = edge_endpoints(e)
        matching[vw] = e
        matching[vb] = e

    def remove(e: Edge):
        vw, vb = edge_endpoints(e)
        del matching[vw]
        del matching[vb]

    for k in range(1, n + 1):
        cls = active_class(k)
        # destruction: faces of the active class covered by an opposite pair
        seen = set()
        to_remove = []
        for e in set(matching.values()):
            f = _face_of_edge(e, cls)
            if f in seen:
                continue
            seen.add(f)
            (e1, e3), (e2, e4) = _face_edges(cls, f[0], f[1])
            cur = set()
            for ee in (e1, e2, e3, e4):
                vw, vb = edge_endpoints(ee)
                if matching.get(vw) == ee and matching.get(vb) == ee:
                    cur.add(ee)
            if cur == {e1, e3} or cur == {e2, e4}:
                to_remove.extend(cur)
        for e in set(to_remove):
            remove(e)
        # sliding: move every remaining domino across its active face
        old = list(set(matching.values()))
        matching.clear()
        for e in old:
            f = _face_of_edge(e, cls)
            (e1, e3), (e2, e4) = _face_edges(cls, f[0], f[1])
            opp = {e1: e3, e3: e1, e2: e4, e4: e2}[e]
            add(opp)
        # creation: fill uncovered active faces of AD_k
        for (fc, a, b) in creation_faces(k):
            vs = _face_vertices(fc, a, b)
            if any(v in matching for v in vs):
                continue
            (e1, e3), (e2, e4) = _face_edges(fc, a, b)
            p1 = weights.weight(k, e1) * weights.weight(k, e3)
            p2 = weights.weight(k, e2) * weights.weight(k, e4)
            if rng.random() < p1 / (p1 + p2):
                add(e1)
                add(e3)
            else:
                add(e2)
                add(e4)
    return sorted(set(matching.values()))


def _face_of_edge(e: Edge, cls: int) -> Tuple[int, int]:
    """Anchor of the unique face of the given class containing edge e."""
    d, a, b = e
    if cls == 0:
        # faces of class 0 anchored at (a,b) carry edges
        # (0,a,b),(1,a,b),(3,a,b+1),(2,a,b+1)
        if d in (0, 1):
            return (a, b)
        return (a, b - 1)
    else:
        # class 1 at (a,b): edges (0,a,b),(2,a,b),(3,a+1,b),(1,a+1,b)
        if d in (0, 2):
            return (a, b)
        return (a - 1, b)


# ---------------------------------------------------------------------------
# validation helpers


def enumerate_diamond(n: int, weights: PeriodicWeights
                      ) -> List[Tuple[Tuple[Edge, ...], float]]:
    """All dimer covers of AD_n with their Boltzmann weights at round n."""
    whites, blacks = diamond_vertices(n)
    bset = set(blacks)
    covers: List[Tuple[Tuple[Edge, ...], float]] = []
    wlist = sorted(whites)

    def rec(i: int, used: frozenset, chosen: Tuple[Edge, ...], wt: float):
        if i == len(wlist):
            covers.append((chosen, wt))
            return
        _, a, b = wlist[i]
        for d, off in enumerate(OFFSETS):
            vb = ("b", a + off[0], b + off[1])
            if vb in bset and vb not in used:
                e = (d, a, b)
                rec(i + 1, used | {vb}, chosen + (e,),
                    wt * weights.weight(n, e))

    rec(0, frozenset(), (), 1.0)
    return covers


def total_variation(n: int, weights: PeriodicWeights, samples: int,
                    rng: random.Random) -> float:
    """TV distance between the empirical shuffling law and enumeration."""
    covers = enumerate_diamond(n, weights)
    Z = sum(wt for _, wt in covers)
    probs = {frozenset(cv): wt / Z for cv, wt in covers}
    counts: Dict[frozenset, int] = {}
    for _ in range(samples):
        M = frozenset(shuffle_sample(n, weights, rng))
        counts[M] = counts.get(M, 0) + 1
    tv = 0.0
    keys = set(probs) | set(counts)
    for kk in keys:
        tv += abs(probs.get(kk, 0.0) - counts.get(kk, 0) / samples)
    return tv / 2


# ---------------------------------------------------------------------------
# phase detection


def brickwork_raster(matching: Sequence[Edge], n: int,
                     window: int = 2) -> Dict[Tuple[int, int], int]:
    """Per-white-vertex phase label: the domino type 0..3 when the
    neighborhood is a perfect brickwork of one type, else -1 (temperate).

    The neighborhood is the (2 window + 1)^2 block of white vertices around
    the given one; brickwork means they all carry the same domino type.
    """
    by_white: Dict[Tuple[int, int], int] = {}
    for (d, a, b) in matching:
        by_white[(a, b)] = d
    labels: Dict[Tuple[int, int], int] = {}
    for (a, b), d in by_white.items():
        ok = True
        for da in range(-window, window + 1):
            for db in range(-window, window + 1):
                nb = by_white.get((a + da, b + db))
                if nb is not None and nb != d:
                    ok = False
                    break
            if not ok:
                break
        labels[(a, b)] = d if ok else -1
    return labels


def frozen_boundary_points(matching: Sequence[Edge], n: int,
                           bins: int = 256) -> List[Tuple[float, float]]:
    """Empirical arctic boundary: the outermost temperate white vertex per
    angular sector, in centered classical coordinates (the diamond is the
    square |x| + |y| <= n rotated 45 degrees, i.e. |i| + |j| <= n)."""
    labels = brickwork_raster(matching, n)
    best: Dict[int, Tuple[float, Tuple[float, float]]] = {}
    for (a, b), lab in labels.items():
        if lab != -1:
            continue
        # classical cell-center coordinates, diamond centered at the origin
        x = (a + b) + 0.5
        y = (b - a) + 0.5
        r = math.hypot(x, y)
        if r == 0:
            continue
        k = int((math.atan2(y, x) % (2 * math.pi)) / (2 * math.pi) * bins)
        if k not in best or r > best[k][0]:
            best[k] = (r, (x, y))
    return [p for _, p in best.values()]


def hausdorff_to_circle(points: Sequence[Tuple[float, float]], n: int
                        ) -> float:
    """Hausdorff distance between the point set and the arctic circle of
    radius n/2 centered at the origin (in diamond units where the domain
    is the square of side n)."""
    if not points:
        return float("inf")
    r = n / math.sqrt(2)
    # distance from points to the circle
    d1 = max(abs(math.hypot(x, y) - r) for (x, y) in points)
    # distance from the circle to the point set, sampled
    d2 = 0.0
    for k in range(256):
        th = 2 * math.pi * k / 256
        px, py = r * math.cos(th), r * math.sin(th)
        d2 = max(d2, min(math.hypot(px - x, py - y) for (x, y) in points))
    return max(d1, d2)
