"""Bundled fundamental domains.

All presets are exact-rational embeddings on the unit torus:

* ``square1x1``  -- the diagonal square lattice, one vertex of each color;
  Newton polygon the unit square.  Ambient graph of the Aztec diamond.
* ``square2x2``  -- the axis-aligned square lattice, 2x2 cell; Newton
  polygon the 45-degree square (genus one), used for strand examples.
* ``square2x3``  -- diagonal square lattice with a 3x2 window of cells and
  the doubly periodic weight family used by the tropical pipeline.
* ``pentagon``   -- minimal graph with a pentagonal Newton polygon (the
  hexagonal-flower graph with one spoke removed).
* ``hexagon``    -- the full flower; hexagonal Newton polygon.
* ``octagon``    -- an 18-vertex fundamental domain with an octagonal
  Newton polygon.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .lattice import TorusGraph, build_torus_graph

F = Fraction


def _flower_graph(include_first_spoke: bool) -> TorusGraph:
    """Hexagonal-flower fundamental domain.

    Cells carry one central white vertex, two corner whites and three black
    edge-midpoints.  The center has spokes to five of the six midpoints
    (pentagon) or all six (hexagon).  The torus basis is chosen so that the
    pentagon's Newton polygon comes out with side directions (1,0), (1,1),
    (-1,1), (-1,-1), (0,-1).
    """
    whites = [
        (F(1, 2), F(1, 2)),  # w0: flower center
        (F(5, 6), F(1, 6)),  # w1: corner orbit {c2, c4, c6}
        (F(1, 6), F(5, 6)),  # w2: corner orbit {c1, c3, c5}
    ]
    blacks = [
        (F(0), F(0)),        # b0: midpoint orbit {m12, m45}
        (F(1, 2), F(0)),     # b1: midpoint orbit {m23, m56}
        (F(0), F(1, 2)),     # b2: midpoint orbit {m34, m61}
    ]
    edges = [
        # center spokes (m23, m34, m45, m56, m61)
        (0, 1, (0, 1)),
        (0, 2, (0, 0)),
        (0, 0, (0, 0)),
        (0, 1, (0, 0)),
        (0, 2, (1, 0)),
        # corner edges
        (2, 0, (0, 1)),
        (1, 0, (1, 0)),
        (1, 1, (0, 0)),
        (2, 1, (0, 1)),
        (2, 2, (0, 0)),
        (1, 2, (1, 0)),
    ]
    if include_first_spoke:
        edges.append((0, 0, (1, 1)))  # the m12 spoke
    name = "hexagon" if include_first_spoke else "pentagon"
    g = TorusGraph(whites=whites, blacks=blacks, edges=list(edges), name=name)
    # reference face: the quad (w0, b0, w2@(0,-1), b1) south-east of the center
    g.set_ref_face_at((F(7, 24), F(1, 12)))
    return g


def pentagon() -> TorusGraph:
    return _flower_graph(include_first_spoke=False)


def hexagon() -> TorusGraph:
    return _flower_graph(include_first_spoke=True)


def square1x1() -> TorusGraph:
    g = TorusGraph(
        whites=[(F(1, 4), F(1, 4))],
        blacks=[(F(3, 4), F(3, 4))],
        edges=[
            (0, 0, (0, 0)),
            (0, 0, (-1, 0)),
            (0, 0, (0, -1)),
            (0, 0, (-1, -1)),
        ],
        name="square1x1",
    )
    # the face with white vertices on its vertical axis, as in the Aztec
    # diamond reference-face convention
    g.set_ref_face_at((F(1, 4), F(3, 4)))
    return g


def square2x2() -> TorusGraph:
    g = TorusGraph(
        whites=[(F(0), F(0)), (F(1, 2), F(1, 2))],
        blacks=[(F(1, 2), F(0)), (F(0), F(1, 2))],
        edges=[
            (0, 0, (0, 0)),
            (0, 0, (-1, 0)),
            (1, 0, (0, 0)),
            (1, 0, (0, 1)),
            (0, 1, (0, 0)),
            (0, 1, (0, -1)),
            (1, 1, (0, 0)),
            (1, 1, (1, 0)),
        ],
        name="square2x2",
    )
    g.set_ref_face_at((F(1, 4), F(1, 4)))
    return g


# weight tags: ("iso", s, t) -> weight |nu(s) - nu(t)|, energy 0
#              ("exp", k)    -> weight 1, energy -k
WeightTag = Tuple


def square2x3() -> Tuple[TorusGraph, Dict[int, WeightTag]]:
    """The 3x2-cell diagonal square lattice with the doubly periodic weight
    family of the tropical pipeline; returns (graph, weight tags by edge)."""
    whites = []
    blacks = []
    for j in (0, 1):
        for i in (0, 1, 2):
            whites.append((F(i, 3), F(2 * j + 1, 4)))
            blacks.append((F(2 * i + 1, 6), F(j, 2)))

    def wi(i, j):
        return j * 3 + i

    def bi(i, j):
        return j * 3 + i

    raw = [
        # (white (i,j), black (i,j), cell offset, tag)
        ((0, 1), (0, 0), (0, 1), ("exp", 1)),
        ((0, 1), (0, 1), (0, 0), ("iso", "gamma", "beta")),
        ((1, 1), (0, 0), (0, 1), ("iso", "epsilon", "gamma")),
        ((1, 1), (0, 1), (0, 0), ("iso", "beta", "epsilon")),
        ((1, 1), (1, 0), (0, 1), ("iso", "gamma", "beta")),
        ((1, 1), (1, 1), (0, 0), ("exp", 4)),
        ((2, 1), (1, 0), (0, 1), ("iso", "delta", "gamma")),
        ((2, 1), (1, 1), (0, 0), ("iso", "beta", "delta")),
        ((2, 1), (2, 0), (0, 1), ("iso", "gamma", "beta")),
        ((2, 1), (2, 1), (0, 0), ("exp", 1)),
        ((0, 1), (2, 0), (-1, 1), ("iso", "beta", "gamma")),
        ((0, 1), (2, 1), (-1, 0), ("exp", 4)),
        ((0, 0), (0, 1), (0, 0), ("iso", "delta", "gamma")),
        ((0, 0), (0, 0), (0, 0), ("iso", "gamma", "alpha")),
        ((1, 0), (0, 1), (0, 0), ("iso", "epsilon", "delta")),
        ((1, 0), (0, 0), (0, 0), ("iso", "alpha", "epsilon")),
        ((1, 0), (1, 1), (0, 0), ("iso", "delta", "beta")),
        ((1, 0), (1, 0), (0, 0), ("iso", "beta", "alpha")),
        ((2, 0), (1, 1), (0, 0), ("exp", 1)),
        ((2, 0), (1, 0), (0, 0), ("iso", "alpha", "delta")),
        ((2, 0), (2, 1), (0, 0), ("iso", "delta", "alpha")),
        ((2, 0), (2, 0), (0, 0), ("exp", 4)),
        ((0, 0), (2, 1), (-1, 0), ("iso", "alpha", "delta")),
        ((0, 0), (2, 0), (-1, 0), ("exp", 1)),
    ]
    edges = []
    tags: Dict[int, WeightTag] = {}
    for k, (wix, bix, off, tag) in enumerate(raw):
        edges.append((wi(*wix), bi(*bix), off))
        tags[k] = tag
    g = TorusGraph(whites=whites, blacks=blacks, edges=edges, name="square2x3")
    g.set_ref_face_at((F(1, 6), F(1, 4)))
    return g, tags


# Appendix angle choice for the pentagonal spectral curve
TROPICAL_PENTAGON_ANGLES = {
    "alpha": complex(1.0, 0.0),
    "beta": None,  # e^{i pi/25}, filled below
    "gamma": None,
    "delta": None,
    "epsilon": None,
}


def tropical_pentagon_angles() -> Dict[str, complex]:
    import cmath

    return {
        "alpha": cmath.exp(0j),
        "beta": cmath.exp(1j * cmath.pi / 25),
        "gamma": cmath.exp(4j * cmath.pi / 5),
        "delta": cmath.exp(6j * cmath.pi / 5),
        "epsilon": cmath.exp(8j * cmath.pi / 5),
    }


def octagon() -> TorusGraph:
    whites = {
        "LB": (F(0), F(0)),
        "LU": (F(0), F(3, 4)),
        "aL": (F(33, 100), F(67, 80)),
        "cL": (F(11, 80), F(1, 2)),
        "eL": (F(33, 100), F(13, 100)),
        "cm": (F(1, 2), F(1, 2)),
        "aR": (F(67, 100), F(67, 80)),
        "cR": (F(69, 80), F(1, 2)),
        "eR": (F(67, 100), F(13, 100)),
    }
    blacks = {
        "LM": (F(0), F(1, 2)),
        "BL": (F(1, 4), F(0)),
        "BR": (F(3, 4), F(0)),
        "bL": (F(13, 40), F(29, 50)),
        "dL": (F(13, 40), F(31, 80)),
        "ct": (F(1, 2), F(59, 80)),
        "cb": (F(1, 2), F(19, 80)),
        "bR": (F(27, 40), F(29, 50)),
        "dR": (F(27, 40), F(31, 80)),
    }
    edge_list = [
        ("LB", "BL", (0, 0)),
        ("LB", "LM", (0, 0)),
        ("LU", "LM", (0, 0)),
        ("LB", "BR", (-1, 0)),
        ("LB", "bL", (0, -1)),
        ("LU", "bL", (0, 0)),
        ("cL", "LM", (0, 0)),
        ("aL", "BL", (0, 1)),
        ("aL", "ct", (0, 0)),
        ("aL", "bL", (0, 0)),
        ("cL", "bL", (0, 0)),
        ("cL", "dL", (0, 0)),
        ("cm", "bL", (0, 0)),
        ("cm", "dL", (0, 0)),
        ("eL", "dL", (0, 0)),
        ("eL", "BL", (0, 0)),
        ("eL", "cb", (0, 0)),
        ("cm", "ct", (0, 0)),
        ("cm", "cb", (0, 0)),
        ("aR", "ct", (0, 0)),
        ("aR", "BR", (0, 1)),
        ("aR", "bR", (0, 0)),
        ("LB", "bR", (-1, -1)),
        ("LU", "bR", (-1, 0)),
        ("cR", "LM", (1, 0)),
        ("cR", "bR", (0, 0)),
        ("cR", "dR", (0, 0)),
        ("cm", "bR", (0, 0)),
        ("cm", "dR", (0, 0)),
        ("eR", "dR", (0, 0)),
        ("eR", "BR", (0, 0)),
        ("eR", "cb", (0, 0)),
    ]
    wnames = sorted(whites)
    bnames = sorted(blacks)
    wmap = {n: i for i, n in enumerate(wnames)}
    bmap = {n: i for i, n in enumerate(bnames)}
    g = TorusGraph(
        whites=[whites[n] for n in wnames],
        blacks=[blacks[n] for n in bnames],
        edges=[(wmap[w], bmap[b], off) for (w, b, off) in edge_list],
        name="octagon",
    )
    # a central face near cm
    g.set_ref_face_at((F(41, 100), F(1, 2)))
    return g


_BUILDERS = {
    "square1x1": square1x1,
    "square2x2": square2x2,
    "pentagon": pentagon,
    "hexagon": hexagon,
    "octagon": octagon,
}


def aztec_selection(n: int) -> Dict[int, Fraction]:
    """Boundary selection producing the order-n Aztec diamond on the
    square1x1 preset (n(n+1) vertices of each color)."""
    k = n // 2
    l = (n - 1) // 2
    return {
        0: -F(2 * k + 1, 2),
        1: F(2 * k + 1, 2),
        2: -F(2 * l + 1, 2),
        3: F(2 * l + 1, 2),
    }


# canonical admissible boundary selections for the bundled presets
PRESET_SELECTIONS: Dict[str, Dict[int, Fraction]] = {
    "pentagon": {0: F(-1, 2), 1: F(-1, 2), 2: F(1, 2), 3: F(-1, 2), 4: F(1, 2)},
    "hexagon": {0: F(-1, 2), 1: F(-1, 2), 2: F(1, 2), 3: F(1, 2), 4: F(1, 2), 5: F(1, 2)},
    "octagon": {
        0: F(-1, 2), 1: F(-1, 2), 2: F(1, 2), 3: F(1, 2),
        4: F(-1, 2), 5: F(-1, 2), 6: F(-1, 2), 7: F(1, 2),
    },
    "square1x1": aztec_selection(1),
}


def preset_selection(name: str, order: int = 1) -> Dict[int, Fraction]:
    if name == "square1x1" or name == "aztec":
        return aztec_selection(order)
    try:
        return dict(PRESET_SELECTIONS[name])
    except KeyError:
        raise KeyError(f"no canonical selection for preset {name!r}")


def get_preset(name: str) -> TorusGraph:
    if name == "square2x3":
        return square2x3()[0]
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: "
            f"{sorted(list(_BUILDERS) + ['square2x3'])}"
        )


def load_graph(path: str) -> TorusGraph:
    with open(path) as fh:
        return build_torus_graph(json.load(fh))
