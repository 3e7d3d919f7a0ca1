"""Phase diagram, arctic curve, turning points, limit shape, slope."""

import cmath
import math
import random

import numpy as np
import pytest

from azdimer.asymptotics import (
    ActionData,
    arctic_point,
    arctic_tangent_slope,
    astroidal_domain,
    base_point,
    classify_phase,
    limit_shape,
    omega_inverse_interior,
    polyline_is_simple,
    rotated_polygon_vertices,
    sample_arctic_curve,
    slope,
    turning_point,
    turning_tangent,
)
from azdimer.errors import NonSimpleBoundary

PENT_PRIMS = [(1, 0), (1, 1), (-1, 1), (-1, -1), (0, -1)]
PENT_C = [3 / 14, 5 / 42, -1 / 2, -1 / 6, 1 / 3]


def appendix_pentagon() -> ActionData:
    angs = [
        cmath.exp(0j),
        cmath.exp(1j * math.pi / 25),
        cmath.exp(4j * math.pi / 5),
        cmath.exp(6j * math.pi / 5),
        cmath.exp(8j * math.pi / 5),
    ]
    return ActionData(
        [(angs[e], PENT_PRIMS[e][0], PENT_PRIMS[e][1], PENT_C[e]) for e in range(5)]
    )


def aztec_data(rot=0.0) -> ActionData:
    prims = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    cs = [-0.5, 0.5, -0.5, 0.5]
    return ActionData(
        [
            (cmath.exp(1j * (math.pi / 2 * k + rot)), prims[k][0], prims[k][1], cs[k])
            for k in range(4)
        ]
    )


def test_astroidal_domain_validations():
    dom = appendix_pentagon().domain()
    assert dom.is_simple()
    assert dom.is_admissible()
    # symmetric square (Aztec scaling limit)
    sq = astroidal_domain([(1, 0), (0, 1), (-1, 0), (0, -1)], [1] * 4,
                          [-0.5, 0.5, -0.5, 0.5])
    assert sq.is_admissible()
    corners = {tuple(round(v, 9) for v in p) for p in sq.boundary_cycle()}
    assert corners == {(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)}
    # admissibility violation is reported, not raised
    bad = astroidal_domain([(1, 0), (0, 1), (-1, 0), (0, -1)], [1] * 4,
                           [0.5, 0.5, -0.5, 0.5])
    assert not bad.is_admissible()


def test_cell_sign_counts():
    dom = appendix_pentagon().domain()
    rng = random.Random(0)
    pts = dom.boundary_cycle()
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    inner = outer = 0
    while inner < 25 or outer < 25:
        x = rng.uniform(min(xs) - 0.3, max(xs) + 0.3)
        y = rng.uniform(min(ys) - 0.3, max(ys) + 0.3)
        try:
            n_sc = dom.sign_changes_at(x, y)
        except ValueError:
            continue
        if dom.contains(x, y):
            assert n_sc == 4
            inner += 1
        else:
            assert n_sc == 2
            outer += 1


def test_residue_sum_zero():
    data = appendix_pentagon()
    for (x, y) in [(0.0, 0.0), (-0.2, -0.3), (0.4, 0.1)]:
        co = data.numerator_coeffs(x, y)
        assert abs(co[0]) <= 1e-12 * np.abs(co).max()


def test_zero_count_and_classification():
    data = appendix_pentagon()
    rng = random.Random(1)
    for _ in range(40):
        z = cmath.rect(rng.uniform(0.05, 0.85), rng.uniform(0, 2 * math.pi))
        x, y = omega_inverse_interior(data, z)
        roots = data.zeros(x, y)
        assert len(roots) == len(data.groups) - 2
        off = [r for r in roots if abs(abs(r) - 1) > 1e-8]
        assert len(off) == 2
        ph = classify_phase(data, x, y)
        assert ph.kind == "Rough"
        assert abs(ph.zeta - z) < 1e-8


def test_round_trip_residual():
    data = appendix_pentagon()
    rng = random.Random(2)
    for _ in range(200):
        z = cmath.rect(rng.uniform(0.02, 0.9), rng.uniform(0, 2 * math.pi))
        x, y = omega_inverse_interior(data, z)
        assert abs(data.F(x, y, z)) < 1e-10


def test_orientation_reversing():
    data = appendix_pentagon()
    z = 0.31 + 0.17j
    eps = 1e-6

    def omega(zz):
        return omega_inverse_interior(data, zz)

    # Jacobian of the inverse map; its determinant has the sign of
    # -Im(conj(f1) f2) ... the forward map is orientation reversing
    x0, y0 = omega(z)
    xu, yu = omega(z + eps)
    xv, yv = omega(z + 1j * eps)
    J = np.array([[(xu - x0) / eps, (xv - x0) / eps],
                  [(yu - y0) / eps, (yv - y0) / eps]])
    assert np.linalg.det(J) < 0


def test_frozen_corner_classification():
    data = appendix_pentagon()
    dom = data.domain()
    cx = sum(p[0] for p in dom.boundary_cycle()) / 5
    cy = sum(p[1] for p in dom.boundary_cycle()) / 5
    kinds = []
    for v in range(5):
        px, py = dom.corner(v)
        q = (px + 0.02 * (cx - px), py + 0.02 * (cy - py))
        ph = classify_phase(data, *q)
        kinds.append(ph.kind)
    assert kinds.count("Frozen") >= 3
    assert all(k in ("Frozen", "QuasiFrozen", "Rough") for k in kinds)


def test_exterior_unclassified():
    data = appendix_pentagon()
    ph = classify_phase(data, 5.0, 5.0)
    assert ph.kind == "Unclassified"
    roots = data.zeros(5.0, 5.0)
    assert all(abs(abs(r) - 1) < 1e-6 for r in roots)


def test_arctic_point_double_zero():
    data = appendix_pentagon()
    for th in np.linspace(0.1, 2 * math.pi - 0.1, 25):
        u = cmath.exp(1j * th)
        if min(abs(u - z) for z, _ in data.groups) < 5e-2:
            continue
        x, y = arctic_point(data, u)
        assert abs(data.F(x, y, u)) < 1e-8
        assert abs(data.Fprime(x, y, u)) < 1e-8


def test_arctic_tangent_vs_finite_difference():
    data = appendix_pentagon()
    h = 1e-5
    for th in (0.5, 2.2, 3.4, 5.1):
        u = cmath.exp(1j * th)
        x0, y0 = arctic_point(data, u)
        x1, y1 = arctic_point(data, cmath.exp(1j * (th + h)))
        fd = (y1 - y0) / (x1 - x0)
        an = arctic_tangent_slope(data, u)
        assert fd == pytest.approx(an, rel=1e-3, abs=1e-4)


def test_curvature_negative():
    data = appendix_pentagon()
    # analytic criterion: W = f1 f2' - f1' f2 < 0 on the real locus
    for th in np.linspace(0.05, 2 * math.pi - 0.05, 60):
        u = cmath.exp(1j * th)
        if min(abs(u - z) for z, _ in data.groups) < 3e-2:
            continue
        W = data.f(1, u) * data.fprime(2, u) - data.fprime(1, u) * data.f(2, u)
        assert W.real < 0 and abs(W.imag) < 1e-8 * abs(W)
    # finite-difference curvature sign at a few smooth parameters
    h = 1e-4
    for th in (0.5, 2.2, 4.0):
        us = [cmath.exp(1j * (th + k * h)) for k in (-1, 0, 1)]
        pts = [arctic_point(data, u) for u in us]
        d1 = np.array(pts[1]) - np.array(pts[0])
        d2 = np.array(pts[2]) - np.array(pts[1])
        cr = d1[0] * d2[1] - d1[1] * d2[0]
        assert cr < 0  # clockwise traversal = negative curvature


def test_turning_points():
    data = appendix_pentagon()
    for gi in range(5):
        x, y = turning_point(data, gi)
        nu, a, b, c = data.records[data.groups[gi][1][0]]
        assert abs(-b * x + a * y + c) < 1e-8
        # limit consistency: arctic_point(u) -> turning point as u -> angle
        for s in (+1, -1):
            u = nu * cmath.exp(s * 1e-3j)
            ax, ay = arctic_point(data, u)
            assert math.hypot(ax - x, ay - y) < 1e-3 * 10
        # tangent at the turning point is the side's line (finite diff)
        u1 = nu * cmath.exp(1e-4j)
        u2 = nu * cmath.exp(-1e-4j)
        p1 = arctic_point(data, u1)
        p2 = arctic_point(data, u2)
        ta, tb = turning_tangent(data, gi)
        cr = (p1[0] - p2[0]) * tb - (p1[1] - p2[1]) * ta
        norm = math.hypot(p1[0] - p2[0], p1[1] - p2[1])
        assert abs(cr) < 1e-3 * max(norm, 1e-12)


def test_tangency_dictionary():
    """Points on the tangent line at the boundary are zeros of the action
    density at the boundary parameter."""
    data = appendix_pentagon()
    rng = random.Random(5)
    for _ in range(20):
        th = rng.uniform(0, 2 * math.pi)
        u = cmath.exp(1j * th)
        if min(abs(u - z) for z, _ in data.groups) < 5e-2:
            continue
        x0, y0 = arctic_point(data, u)
        m = arctic_tangent_slope(data, u)
        for _ in range(20):
            t = rng.uniform(-0.3, 0.3)
            x, y = x0 + t, y0 + m * t
            assert abs(data.F(x, y, u)) < 1e-8


def test_sample_curve_closed_and_simple():
    data = appendix_pentagon()
    samples = sample_arctic_curve(data, 400)
    assert polyline_is_simple(samples)
    first, last = samples[0], samples[-1]
    assert math.hypot(first.x - last.x, first.y - last.y) < 0.2
    # closure near a turning point
    tp = [s for s in samples if s.is_turning_point]
    assert len(tp) == 5


def test_aztec_arctic_circle():
    data = aztec_data()
    for th in np.linspace(0.0, 2 * math.pi, 160):
        u = cmath.exp(1j * (th + 0.03))
        if min(abs(u - z) for z, _ in data.groups) < 3e-2:
            continue
        x, y = arctic_point(data, u)
        assert abs(math.hypot(x, y) - 0.5) < 1e-6


def test_limit_shape_gradient_matches_slope():
    data = appendix_pentagon()
    rng = random.Random(7)
    u0 = 0
    done = 0
    while done < 50:
        z = cmath.rect(rng.uniform(0.05, 0.8), rng.uniform(0, 2 * math.pi))
        x, y = omega_inverse_interior(data, z)
        eps = 1e-5
        gx = (limit_shape(data, x + eps, y, u0) - limit_shape(data, x - eps, y, u0)) / (2 * eps)
        gy = (limit_shape(data, x, y + eps, u0) - limit_shape(data, x, y - eps, u0)) / (2 * eps)
        s, t = slope(data, x, y, u0)
        assert abs(gx - s) < 1e-3 and abs(gy - t) < 1e-3
        done += 1


def test_limit_shape_base_point_independence():
    data = appendix_pentagon()
    z = 0.22 - 0.31j
    x, y = omega_inverse_interior(data, z)
    p0 = base_point(data, 0)
    th0 = cmath.phase(p0)
    vals = [
        limit_shape(data, x, y, 0, base=cmath.exp(1j * (th0 + d)))
        for d in (-0.012, 0.0, 0.017)
    ]
    assert max(vals) - min(vals) < 1e-9


def test_frozen_slopes_are_rotated_polygon_vertices():
    data = appendix_pentagon()
    u0 = 0
    verts = rotated_polygon_vertices(data, u0)
    from azdimer.asymptotics import _integrate_F, _path_to

    p = base_point(data, u0)
    for u in range(5):
        zt = base_point(data, u)
        s = _integrate_F(data, (1, 0, 0), _path_to(data, p, zt)).imag / math.pi
        t = _integrate_F(data, (0, 1, 0), _path_to(data, p, zt)).imag / math.pi
        vx, vy = verts[u]
        assert abs(s - vx) < 1e-9 and abs(t - vy) < 1e-9


def test_rough_slope_interior():
    data = appendix_pentagon()
    rng = random.Random(11)
    verts = rotated_polygon_vertices(data, 0)
    for _ in range(10):
        z = cmath.rect(rng.uniform(0.1, 0.7), rng.uniform(0, 2 * math.pi))
        x, y = omega_inverse_interior(data, z)
        s, t = slope(data, x, y, 0)
        # strictly interior: positive distance from every edge
        n = len(verts)
        for i in range(n):
            x1, y1 = verts[i]
            x2, y2 = verts[(i + 1) % n]
            cr = (x2 - x1) * (t - y1) - (y2 - y1) * (s - x1)
            assert cr > 1e-9


def test_h_zero_at_own_arc():
    data = appendix_pentagon()
    p = base_point(data, 0)
    h = limit_shape(data, 0, 0, 0, zeta=p)
    assert abs(h) < 1e-12
