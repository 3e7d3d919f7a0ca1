"""Genus-zero Kasteleyn matrices, residue calculus, and exact inverses."""

import cmath
import math
import random

import numpy as np
import pytest
from fractions import Fraction as F

from azdimer import presets
from azdimer.azgraph import construct_az_graph, IntervalOnN
from azdimer.kasteleyn import (
    AngleAssignment,
    Numeric,
    SectionCalculus,
    edge_probabilities,
    enumerate_matchings,
    evenly_spaced_angles,
    inverse_entry,
    inverse_entry_quadrature,
    inverse_matrix,
    kasteleyn_matrix,
    null_sector,
    random_angles,
    residues_at,
    verify_inverse,
    whole_plane_inverse,
)

PENTAGON_SEL = {0: F(-1, 2), 1: F(-1, 2), 2: F(1, 2), 3: F(-1, 2), 4: F(1, 2)}


@pytest.fixture(scope="module")
def pentagon():
    az = construct_az_graph(presets.get_preset("pentagon"), PENTAGON_SEL)
    fam = {s.id: az.system.strand_edge(s.id) for s in az.strands}
    ang = AngleAssignment(
        by_strand={s.id: cmath.exp(2j * math.pi * fam[s.id] / 5) for s in az.strands}
    )
    return az, ang


def _pentagon_labels(az):
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
        if sorted(pair_fams[le] for le in az.edges if az.edge_pair(le)[1] == b)
        == [(3, 4), (4, 1)]
    )
    return w1, b1, b5


def test_pentagon_matrix_structure(pentagon):
    az, ang = pentagon
    K = kasteleyn_matrix(az, ang)
    assert K.shape == (7, 7)
    assert (np.abs(K) > 1e-12).sum() == 19
    # isoradial weights with evenly spaced angles: moduli 2sin(pi/5) and
    # 2sin(2pi/5); their ratio is the golden ratio
    mods = sorted(set(round(abs(x), 9) for x in K.ravel() if abs(x) > 1e-12))
    assert len(mods) == 2
    assert mods[0] == pytest.approx(2 * math.sin(math.pi / 5), abs=1e-9)
    assert mods[1] == pytest.approx(2 * math.sin(2 * math.pi / 5), abs=1e-9)
    assert mods[1] / mods[0] == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-9)


def test_pentagon_inverse_closed_forms(pentagon):
    az, ang = pentagon
    w1, b1, b5 = _pentagon_labels(az)
    al, be, ga, de, ep = [cmath.exp(2j * math.pi * k / 5) for k in range(5)]
    expect11 = -(al - be) * (be - ep) * (ga - de) / (
        (al - ga) * (be - de) ** 2 * (ga - ep)
    )
    expect51 = (be - ga) * (ga - de) ** 2 / (
        (al - ga) * (be - de) ** 2 * (ga - ep)
    )
    assert abs(inverse_entry(az, ang, b1, w1) - expect11) < 1e-10
    assert abs(inverse_entry(az, ang, b5, w1) - expect51) < 1e-10


def test_pentagon_two_sided_inverse(pentagon):
    az, ang = pentagon
    K = kasteleyn_matrix(az, ang)
    Kinv = inverse_matrix(az, ang)
    d1, d2 = verify_inverse(K, Kinv)
    assert d1 < 1e-10 and d2 < 1e-10
    assert np.abs(Kinv - np.linalg.inv(K)).max() < 1e-10


def test_pentagon_g_sections(pentagon):
    az, ang = pentagon
    calc = SectionCalculus(az, ang)
    f0 = ("f", az.g.ref_face, az.g.ref_cell)
    assert calc.g_section(f0).exps == {}
    w1, b1, b5 = _pentagon_labels(az)
    # g_w1 = (zeta - alpha)^{-1}
    gw1 = calc.g_section(w1)
    assert list(gw1.exps.values()) == [-1]
    gi = next(iter(gw1.exps))
    assert abs(ang.group_value(gi) - 1.0) < 1e-12
    # degree invariants
    for x in az.whites:
        assert calc.g_section(x).degree() == -1
    for x in az.blacks:
        assert calc.g_section(x).degree() == 1


def test_pentagon_null_sectors(pentagon):
    az, ang = pentagon
    w1, b1, b5 = _pentagon_labels(az)
    ns11 = null_sector(az, ang, b1, w1)
    assert (ns11.left, ns11.right) == (3, 1)  # [v4, v2] in 1-based labels
    ns51 = null_sector(az, ang, b5, w1)
    assert (ns51.left, ns51.right) == (1, 3)  # [v2, v4]


def test_whole_plane_inverse_vanishes_in_sector(pentagon):
    az, ang = pentagon
    w1, b1, b5 = _pentagon_labels(az)
    assert whole_plane_inverse(az, ang, b1, w1, 0) == 0  # v1 in [v4,v2]
    assert whole_plane_inverse(az, ang, b5, w1, 2) == 0  # v3 in [v2,v4]


def test_residue_theorem_full_circuit(pentagon):
    az, ang = pentagon
    calc = SectionCalculus(az, ang)
    for b in az.blacks[:3]:
        for w in az.whites[:3]:
            sec = calc.g_bw(b, w)
            assert sec.degree() <= -2
            total = residues_at(sec, range(ang.n_groups()))
            assert abs(total) < 1e-9


def test_whole_plane_is_inverse_on_plane(pentagon):
    """K A^u = I on the infinite graph for every vertex of N."""
    az, ang = pentagon
    g = az.g
    from azdimer.lattice import _cell_add

    def edges_at_white(w):
        out = []
        for e, (wi, bi, off) in enumerate(g.edges):
            if wi == w[1]:
                out.append(((e, w[2]), ("b", bi, _cell_add(w[2], off))))
        return out

    def K_entry(le):
        (sa, _), (sb, _) = az.edge_strand_pair(le)
        return ang.angle(sb) - ang.angle(sa)

    whites = [("w", 0, (0, 0)), ("w", 1, (0, 0)), ("w", 2, (0, 0))]
    targets = whites + [("w", 0, (1, 0))]
    for u in range(az.n_sides):
        for wv in whites:
            for wt in targets:
                s = sum(
                    K_entry(le) * whole_plane_inverse(az, ang, vb, wt, u)
                    for le, vb in edges_at_white(wv)
                )
                expect = 1.0 if wv == wt else 0.0
                assert abs(s - expect) < 1e-12


def test_fay_residue_structure(pentagon):
    """K_{w,b} g_{b,w} = 1/(z-beta) - 1/(z-alpha) for adjacent pairs."""
    az, ang = pentagon
    calc = SectionCalculus(az, ang)
    z = 0.37 + 0.21j
    for le in az.edges:
        vw, vb = az.edge_pair(le)
        (sa, _), (sb, _) = az.edge_strand_pair(le)
        a_, b_ = ang.angle(sa), ang.angle(sb)
        lhs = (b_ - a_) * calc.g_bw(vb, vw).evaluate(z)
        rhs = 1 / (z - b_) - 1 / (z - a_)
        assert abs(lhs - rhs) < 1e-10


def test_kernel_annihilation(pentagon):
    """sum_b K_{w,b} g_{b,x} = 0 over the infinite graph's edges at w."""
    az, ang = pentagon
    calc = SectionCalculus(az, ang)
    g = az.g
    from azdimer.lattice import _cell_add

    for wv in [("w", 0, (0, 0)), ("w", 1, (0, 0)), ("w", 2, (1, 0))]:
        for x in [az.blacks[2], az.whites[0], ("f", g.ref_face, g.ref_cell)]:
            if x == wv:
                continue
            gx = calc.g_section(x)
            for z in (0.3 + 0.2j, -0.8 + 0.11j, 1.9 - 0.4j):
                s = 0j
                for e, (wi, bi, off) in enumerate(g.edges):
                    if wi != wv[1]:
                        continue
                    le = (e, wv[2])
                    vb = ("b", bi, _cell_add(wv[2], off))
                    (sa, _), (sb, _) = az.edge_strand_pair(le)
                    wt = ang.angle(sb) - ang.angle(sa)
                    s += wt * gx.evaluate(z) / calc.g_section(vb).evaluate(z)
                assert abs(s) < 1e-9


def test_variant_invariance(pentagon):
    az, ang = pentagon
    calc = SectionCalculus(az, ang)
    for b in az.blacks[::3]:
        for w in az.whites[::3]:
            base = inverse_entry(az, ang, b, w, calc=calc)
            for v, _s in az.convex_vertices():
                for xy in ("bw", "wb"):
                    e = inverse_entry(az, ang, b, w, (v, xy), calc=calc)
                    assert abs(e - base) < 1e-10


def test_expansion_invariance(pentagon):
    """Expanding I_b across an edge with sign + leaves the entry unchanged."""
    from azdimer.kasteleyn import _double_integral, _whole_plane, DOUBLE

    az, ang = pentagon
    calc = SectionCalculus(az, ang)
    n = az.n_sides
    for b in az.blacks[:3]:
        for w in az.whites[:3]:
            v = next(vv for vv, s in az.convex_vertices() if s == 1)
            base = inverse_entry(az, ang, b, w, (v, "bw"), calc=calc)
            I_b = az.pole_interval(b, v)
            I_w = az.pole_interval(w, v)
            sfb, _ = az.r_in(b)
            # expand I_b across its counterclockwise neighbor when legal
            e_next = (I_b.right + 1) % n
            legal = sfb.sign(e_next) == 1 or (
                e_next in az.outer_tags.get(b, []) and az.colors[e_next] == 1
            )
            if not legal:
                continue
            J = IntervalOnN(I_b.left, (I_b.right + 1) % n, n)
            qb, qw = calc.q_section(b), calc.q_section(w)
            D, _gross = _double_integral(
                calc, qb, qw, calc.interval_groups(J),
                calc.interval_groups(I_w), "eta",
            )
            corr = 0j
            if I_w.contains_vertex(J.right):
                corr += _whole_plane(calc, b, w, J.right, DOUBLE)
            if I_w.contains_vertex(J.left):
                corr -= _whole_plane(calc, b, w, J.left, DOUBLE)
            assert abs((D - corr) - base) < 1e-9


def test_quadrature_cross_check(pentagon):
    az, ang = pentagon
    w1, b1, b5 = _pentagon_labels(az)
    for b in (b1, b5):
        r = inverse_entry(az, ang, b, w1)
        q = inverse_entry_quadrature(az, ang, b, w1, nodes=512)
        assert abs(r - q) < 1e-8


def test_aztec_reduction_random_angles():
    rng = random.Random(42)
    g = presets.get_preset("square1x1")
    for n in (1, 2, 3):
        az = construct_az_graph(g, presets.aztec_selection(n))
        for _ in range(2):
            ang = random_angles(az, rng)
            K = kasteleyn_matrix(az, ang)
            Kinv = inverse_matrix(az, ang)
            d1, d2 = verify_inverse(K, Kinv)
            assert max(d1, d2) < 1e-9


def test_order1_aztec_uniform_probabilities():
    g = presets.get_preset("square1x1")
    az = construct_az_graph(g, presets.aztec_selection(1))
    ang = evenly_spaced_angles(az)
    cnt, Z, marg = enumerate_matchings(az, ang)
    assert cnt == 2
    Kinv = inverse_matrix(az, ang)
    for k, le in enumerate(az.edges):
        p = edge_probabilities(az, ang, [le], Kinv=Kinv)
        assert p == pytest.approx(0.5, abs=1e-9)


def test_aztec_cover_counts():
    g = presets.get_preset("square1x1")
    for n in (2, 3):
        az = construct_az_graph(g, presets.aztec_selection(n))
        cnt, Z, marg = enumerate_matchings(az)
        assert cnt == 2 ** (n * (n + 1) // 2)


def test_kenyon_vs_enumeration():
    rng = random.Random(9)
    for name in ("pentagon", "hexagon"):
        az = construct_az_graph(
            presets.get_preset(name), presets.preset_selection(name)
        )
        ang = random_angles(az, rng)
        K = kasteleyn_matrix(az, ang)
        Kinv = inverse_matrix(az, ang)
        cnt, Z, marg = enumerate_matchings(az, ang)
        assert abs(abs(np.linalg.det(K)) - Z) / Z < 1e-9
        for k, le in enumerate(az.edges):
            p = edge_probabilities(az, ang, [le], Kinv=Kinv)
            assert p == pytest.approx(marg[k], abs=1e-9)
        # two-edge correlations against enumeration
        pairs = [(0, 1), (2, 5)]
        covers = _covers(az, ang)
        for i, j in pairs:
            both = sum(
                wt for chosen, wt in covers if i in chosen and j in chosen
            ) / Z
            p2 = edge_probabilities(az, ang, [az.edges[i], az.edges[j]], Kinv=Kinv)
            assert p2 == pytest.approx(both, abs=1e-9)


def _covers(az, ang):
    """All covers with |K| weights, for correlation tests."""
    wlist = az.whites
    adj = {w: [] for w in wlist}
    for k, le in enumerate(az.edges):
        vw, vb = az.edge_pair(le)
        (sa, _), (sb, _) = az.edge_strand_pair(le)
        adj[vw].append((k, vb, abs(ang.angle(sb) - ang.angle(sa))))
    covers = []

    def rec(i, used, chosen, wt):
        if i == len(wlist):
            covers.append((chosen, wt))
            return
        for (k, vb, ew) in adj[wlist[i]]:
            if vb not in used:
                rec(i + 1, used | {vb}, chosen + (k,), wt * ew)

    rec(0, frozenset(), (), 1.0)
    return covers


def test_marginals_sum_to_one_around_vertices():
    rng = random.Random(4)
    az = construct_az_graph(
        presets.get_preset("pentagon"), presets.preset_selection("pentagon")
    )
    ang = random_angles(az, rng)
    Kinv = inverse_matrix(az, ang)
    probs = {
        k: edge_probabilities(az, ang, [le], Kinv=Kinv)
        for k, le in enumerate(az.edges)
    }
    incident = {}
    for k, le in enumerate(az.edges):
        vw, vb = az.edge_pair(le)
        incident.setdefault(vw, []).append(k)
        incident.setdefault(vb, []).append(k)
    for v, ks in incident.items():
        assert sum(probs[k] for k in ks) == pytest.approx(1.0, abs=1e-9)


def test_nonadmissible_candidate_has_no_covers():
    g = presets.get_preset("square1x1")
    sel = presets.aztec_selection(2)
    sel[0] += 1
    try:
        az = construct_az_graph(g, sel)
    except Exception:
        pytest.skip("selection rejected at construction")
    cnt, Z, marg = enumerate_matchings(az)
    assert cnt == 0 and Z == 0


def test_angle_validation(pentagon):
    az, ang = pentagon
    assert ang.validate_cyclic(az)
    # swapping two families' angles breaks the cyclic order
    bad = dict(ang.by_strand)
    sids = sorted(bad)
    bad[sids[0]], bad[sids[2]] = bad[sids[2]], bad[sids[0]]
    assert not AngleAssignment(by_strand=bad).validate_cyclic(az)


def test_high_precision_context(pentagon):
    az, ang = pentagon
    w1, b1, b5 = _pentagon_labels(az)
    e_d = inverse_entry(az, ang, b1, w1)
    e_h = inverse_entry(az, ang, b1, w1, ctx=Numeric(40))
    assert abs(e_d - complex(e_h.real, e_h.imag)) < 1e-12
