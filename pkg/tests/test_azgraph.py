"""Astroidal zig-zag graphs: construction, admissibility, chambers."""

import random
from fractions import Fraction as F

import pytest

from azdimer import presets
from azdimer.azgraph import BLACK, WHITE, check_admissibility, construct_az_graph
from azdimer.errors import NonSimpleMedialCycle


PENTAGON_SEL = {0: F(-1, 2), 1: F(-1, 2), 2: F(1, 2), 3: F(-1, 2), 4: F(1, 2)}


@pytest.fixture(scope="module")
def pentagon_az():
    return construct_az_graph(presets.get_preset("pentagon"), PENTAGON_SEL)


@pytest.fixture(scope="module")
def preset_azs():
    out = {}
    for name in ("pentagon", "hexagon", "octagon"):
        out[name] = construct_az_graph(
            presets.get_preset(name), presets.preset_selection(name)
        )
    for n in (1, 2, 3):
        out[f"aztec{n}"] = construct_az_graph(
            presets.get_preset("square1x1"), presets.aztec_selection(n)
        )
    return out


def test_pentagon_is_papers_graph(pentagon_az):
    az = pentagon_az
    assert len(az.whites) == 7 and len(az.blacks) == 7
    assert len(az.edges) == 19
    assert [az.colors[e] for e in range(5)] == [BLACK, WHITE, BLACK, WHITE, BLACK]


def test_pentagon_admissibility(pentagon_az):
    az = pentagon_az
    ok, deg = check_admissibility(az)
    assert ok and deg == 0
    assert sum(az.selection.values()) == F(-1, 2)


def test_pentagon_d_beta_exact(pentagon_az):
    az = pentagon_az
    fam = {s.id: az.system.strand_edge(s.id) for s in az.strands}
    got = sorted(
        ((fam[sid], idx), c) for (sid, idx), c in az.D_beta.coeffs.items()
    )
    assert got == [
        ((1, F(-1, 2)), 1),
        ((2, F(1, 2)), -1),
        ((3, F(-1, 2)), 1),
        ((4, F(1, 2)), -1),
    ]


def test_pentagon_convex_vertices(pentagon_az):
    # corners v1..v4 are convex with alternating signs; v5 is concave
    assert pentagon_az.convex_vertices() == [(0, 1), (1, -1), (2, 1), (3, -1)]


def test_aztec_orders():
    g = presets.get_preset("square1x1")
    for n in (1, 2, 3, 4):
        az = construct_az_graph(g, presets.aztec_selection(n))
        assert len(az.whites) == n * (n + 1)
        assert len(az.blacks) == n * (n + 1)
        assert len(az.edges) == 4 * n * n
        assert az.admissible


def test_rectangle_candidate_not_admissible():
    """Shifted selections give constructible but non-admissible candidates."""
    g = presets.get_preset("square1x1")
    found = False
    base = presets.aztec_selection(2)
    for e in range(4):
        for shift in (1, -1, 2):
            sel = dict(base)
            sel[e] += shift
            try:
                az = construct_az_graph(g, sel)
            except Exception:
                continue
            if not az.admissible:
                assert len(az.whites) != len(az.blacks)
                found = True
    assert found


def test_all_convex_counts(preset_azs):
    for name, az in preset_azs.items():
        cv = az.convex_vertices()
        assert len(cv) == 4, name
        signs = [s for _v, s in cv]
        assert sorted(signs) == [-1, -1, 1, 1]
        # equal color counts for admissible graphs
        assert len(az.whites) == len(az.blacks)


def test_four_sign_change_law(preset_azs):
    for name, az in preset_azs.items():
        for x in az.whites + az.blacks:
            sf = az.chamber_sign(x)
            n_sc = len(sf.sign_changes())
            if az.is_outer(x):
                assert n_sc in (2, 4), (name, x)
                sf_in, _ = az.r_in(x)
                assert len(sf_in.sign_changes()) == 4, (name, x)
            else:
                assert n_sc == 4, (name, x)


def test_pentagon_chamber_tables(pentagon_az):
    """Chamber sign tables of the worked inverse-formula example."""
    az = pentagon_az
    deg = {v: 0 for v in az.whites + az.blacks}
    for le in az.edges:
        vw, vb = az.edge_pair(le)
        deg[vw] += 1
        deg[vb] += 1
    w1 = next(v for v in az.whites if deg[v] == 5)
    sf = az.chamber_sign(w1)
    assert [sf.sign(e) for e in range(5)] == [1, -1, 1, -1, 1]
    assert sf.sign_changes() == [0, 1, 2, 3]


def test_pentagon_pole_intervals(pentagon_az):
    az = pentagon_az
    fam = {s.id: az.system.strand_edge(s.id) for s in az.strands}
    deg = {v: 0 for v in az.whites + az.blacks}
    pair_fams = {}
    for le in az.edges:
        vw, vb = az.edge_pair(le)
        deg[vw] += 1
        deg[vb] += 1
        (sa, _), (sb, _) = az.edge_strand_pair(le)
        pair_fams[le] = (fam[sa], fam[sb])
    w1 = next(v for v in az.whites if deg[v] == 5)
    b1 = next(
        az.edge_pair(le)[1]
        for le in az.edges
        if az.edge_pair(le)[0] == w1 and pair_fams[le] == (2, 3)
    )
    b5 = next(
        b for b in az.blacks
        if sorted(
            pair_fams[le] for le in az.edges if az.edge_pair(le)[1] == b
        ) == [(3, 4), (4, 1)]
    )
    # with v = v1 (corner 0): I_b1 = [v1,v2], I_w1 = [v4,v1] (1-based labels)
    assert (az.pole_interval(b1, 0).left, az.pole_interval(b1, 0).right) == (0, 1)
    assert (az.pole_interval(w1, 0).left, az.pole_interval(w1, 0).right) == (3, 0)
    # with v = v3 (corner 2): I_b5 = [v3,v4], I_w1 = [v2,v3]
    assert (az.pole_interval(b5, 2).left, az.pole_interval(b5, 2).right) == (2, 3)
    assert (az.pole_interval(w1, 2).left, az.pole_interval(w1, 2).right) == (1, 2)


def test_aztec_single_chamber_sections():
    az = construct_az_graph(presets.get_preset("square1x1"), presets.aztec_selection(2))
    for x in az.whites[:3] + az.blacks[:3]:
        for v, _s in az.convex_vertices():
            s = az.section_value(x, v)
            assert s == v  # single chamber class: sections are the corners


def test_section_transport_consistency(preset_azs):
    rng = random.Random(1)
    for name in ("pentagon", "octagon"):
        az = preset_azs[name]
        xs = (az.whites + az.blacks)[::3]
        for x in xs[:6]:
            for v, _s in az.convex_vertices():
                base = az.section_value(x, v)
                for seed in (5, 9):
                    assert az.section_value(x, v, rng=random.Random(seed)) == base


def test_sections_distinct_and_exhaustive(preset_azs):
    for name, az in preset_azs.items():
        for x in (az.whites + az.blacks)[::4]:
            sf_in, _ = az.r_in(x)
            vals = [az.section_value(x, v) for v, _s in az.convex_vertices()]
            assert sorted(vals) == sorted(sf_in.sign_changes()), (name, x)


def test_interval_candidates_match_runs(preset_azs):
    for name, az in preset_azs.items():
        for x in (az.whites + az.blacks)[::5]:
            sf_in, _ = az.r_in(x)
            color_x = BLACK if x[0] == "b" else WHITE
            opp = [iv for s, iv in sf_in.runs() if s == -color_x]
            assert len(opp) == 2
            got = {
                (az.pole_interval(x, v).left, az.pole_interval(x, v).right)
                for v, _s in az.convex_vertices()
            }
            assert got == {(iv.left, iv.right) for iv in opp}, (name, x)


def test_rin_resolution_independent(preset_azs):
    """Multi-outer vertices: the assembled inverse entry is unaffected by
    which outer side resolves R^in (the intervals differ by legal
    expansions)."""
    from azdimer.kasteleyn import (
        DOUBLE,
        SectionCalculus,
        _double_integral,
        _whole_plane,
        evenly_spaced_angles,
    )

    for name, az in preset_azs.items():
        multi = [x for x, tags in az.outer_tags.items() if len(tags) > 1]
        if not multi:
            continue
        ang = evenly_spaced_angles(az)
        calc = SectionCalculus(az, ang)
        v = next(vv for vv, s in az.convex_vertices() if s == 1)
        for x in multi[:3]:
            if x[0] == "b":
                b, w = x, az.whites[0]
            else:
                b, w = az.blacks[0], x
            vals = []
            for e in az.outer_tags[x]:
                sf_in, _ = az.r_in(x, resolve=e)
                s = az.section_value(x, v, resolve=e)
                color_x = 1 if x[0] == "b" else -1
                iv = next(
                    ivv for sgn, ivv in sf_in.runs()
                    if sgn == -color_x and s in (ivv.left, ivv.right)
                )
                if x[0] == "b":
                    I_b, I_w = iv, az.pole_interval(w, v)
                else:
                    I_b, I_w = az.pole_interval(b, v), iv
                D, _gross = _double_integral(
                    calc,
                    calc.q_section(b),
                    calc.q_section(w),
                    calc.interval_groups(I_b),
                    calc.interval_groups(I_w),
                    "eta",
                )
                corr = 0j
                if I_w.contains_vertex(I_b.right):
                    corr += _whole_plane(calc, b, w, I_b.right, DOUBLE)
                if I_w.contains_vertex(I_b.left):
                    corr -= _whole_plane(calc, b, w, I_b.left, DOUBLE)
                vals.append(D - corr)
            for val in vals[1:]:
                assert abs(val - vals[0]) < 1e-10, (name, x)
