"""Tropical characteristic polynomial, spectral curve, harmonic forms."""

from fractions import Fraction as F

import pytest

from azdimer import presets
from azdimer.asymptotics import astroidal_domain
from azdimer.errors import InconsistentOutflows
from azdimer.tropical import (
    check_balancing,
    check_harmonic,
    harmonic_form,
    torus_covers,
    tropical_char_poly,
    tropical_curve,
    tropical_image,
)


def square2x3_setup():
    g, tags = presets.square2x3()
    energies = {
        k: (F(-tag[1]) if tag[0] == "exp" else F(0)) for k, tag in tags.items()
    }
    return g, energies


def outflows_for(curve):
    out = []
    for (v, prim, wt) in curve.rays:
        if prim == (-1, 0):
            out.append(F(-1, 3))
        elif prim == (0, 1):
            out.append(F(1, 2))
        else:
            out.append(F(0))
    return out


def test_unit_cell_char_poly():
    g = presets.get_preset("square1x1")
    covers = torus_covers(g)
    # the one-cell graph has one cover per height class and four classes
    assert len(covers) == 4
    P = tropical_char_poly(g, {})
    assert P.support() == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(v == 0 for v in P.coeffs.values())


def test_square2x3_support_and_extremals():
    g, energies = square2x3_setup()
    P = tropical_char_poly(g, energies)
    support = P.support()
    # support fills the 2 x 3 rectangle of lattice points
    assert support == [
        (j, k) for j in range(3) for k in range(4)
    ]
    hull_corners = {(0, 0), (2, 0), (2, 3), (0, 3)}
    assert hull_corners <= set(support)


def test_square2x3_curve_matches_figure():
    g, energies = square2x3_setup()
    P = tropical_char_poly(g, energies)
    curve = tropical_curve(P)
    assert check_balancing(curve)
    # the dual subdivision has the pentagonal 2-cell of the running example
    pent = [c for c in curve.cells if len(c) == 5]
    assert len(pent) == 1
    assert set(pent[0]) == {(0, 1), (1, 1), (2, 2), (1, 3), (0, 2)}
    # segment lattice lengths
    lens = sorted(str(ln) for (_a, _b, _p, ln, _w) in curve.edges)
    assert lens == ["1", "1", "1", "1", "1", "2", "4", "5"]
    assert len(curve.rays) == 10
    # one vertex of degree five
    degs = sorted(curve.degree(v) for v in range(len(curve.vertices)))
    assert degs.count(5) == 1
    # subdivision areas sum to the polygon area
    total = F(0)
    for cell in curve.cells:
        s = F(0)
        m = len(cell)
        for i in range(m):
            x1, y1 = cell[i]
            x2, y2 = cell[(i + 1) % m]
            s += F(x1 * y2 - x2 * y1)
        total += abs(s) / 2
    assert total == 6


def test_single_triangle_trivalent():
    from azdimer.tropical import TropicalPolynomial

    P = TropicalPolynomial({(0, 0): F(0), (1, 0): F(0), (0, 1): F(0)})
    curve = tropical_curve(P)
    assert len(curve.vertices) == 1
    assert len(curve.edges) == 0
    assert len(curve.rays) == 3
    assert check_balancing(curve)


def test_harmonic_values_exact():
    g, energies = square2x3_setup()
    curve = tropical_curve(tropical_char_poly(g, energies))
    form = harmonic_form(curve, outflows_for(curve))
    vres, cres = check_harmonic(form)
    assert vres == 0 and cres == 0
    vals = sorted({abs(v) for v in form.edge_values})
    assert vals == [F(5, 42), F(1, 6), F(3, 14), F(1, 2)]


def test_zero_outflows_zero_form():
    g, energies = square2x3_setup()
    curve = tropical_curve(tropical_char_poly(g, energies))
    form = harmonic_form(curve, [F(0)] * len(curve.rays))
    assert all(v == 0 for v in form.edge_values)


def test_outflow_sum_checked():
    g, energies = square2x3_setup()
    curve = tropical_curve(tropical_char_poly(g, energies))
    with pytest.raises(InconsistentOutflows):
        harmonic_form(curve, [F(1)] + [F(0)] * (len(curve.rays) - 1))


def test_tropical_image_cell():
    g, energies = square2x3_setup()
    curve = tropical_curve(tropical_char_poly(g, energies))
    form = harmonic_form(curve, outflows_for(curve))
    img = tropical_image(curve, form)
    cells = [rec for rec in img if rec.cell_primitives]
    assert len(cells) == 1
    cell = cells[0]
    assert cell.cell_primitives == [(1, 0), (1, 1), (-1, 1), (-1, -1), (0, -1)]
    assert cell.cell_c == [F(3, 14), F(5, 42), F(-1, 2), F(-1, 6), F(1, 3)]
    dom = astroidal_domain(
        cell.cell_primitives, cell.cell_lengths,
        [float(c) for c in cell.cell_c],
    )
    assert dom.is_admissible() and dom.is_simple()
    # trivalent vertices map to points
    for rec in img:
        if rec.cell_primitives is None:
            assert rec.point is not None
