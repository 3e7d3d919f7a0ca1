"""Exact plane geometry over the rationals.

Points are pairs of ``fractions.Fraction``.  Everything here is a pure
predicate or constructor; no tolerances are involved, so sign decisions
(orientation, crossing, point-in-polygon) are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Tuple

QPoint = Tuple[Fraction, Fraction]


def qpt(x, y) -> QPoint:
    return (Fraction(x), Fraction(y))


def add(p: QPoint, q: QPoint) -> QPoint:
    return (p[0] + q[0], p[1] + q[1])


def sub(p: QPoint, q: QPoint) -> QPoint:
    return (p[0] - q[0], p[1] - q[1])


def scale(p: QPoint, t) -> QPoint:
    t = Fraction(t)
    return (p[0] * t, p[1] * t)


def cross(u: QPoint, v: QPoint) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: QPoint, v: QPoint) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def orient(a: QPoint, b: QPoint, c: QPoint) -> int:
    """Sign of the signed area of triangle abc: +1 ccw, -1 cw, 0 collinear."""
    s = cross(sub(b, a), sub(c, a))
    return (s > 0) - (s < 0)


def pseudo_angle_key(v: QPoint):
    """Sort key equivalent to atan2(v), exact.

    Orders directions counterclockwise starting from the positive x-axis.
    """
    x, y = v
    if x == 0 and y == 0:
        raise ValueError("zero vector has no direction")
    # eight angular classes: axes get their own class; within each open
    # quadrant the slope y/x increases counterclockwise
    if y == 0:
        return (0, Fraction(0)) if x > 0 else (4, Fraction(0))
    if x == 0:
        return (2, Fraction(0)) if y > 0 else (6, Fraction(0))
    if x > 0 and y > 0:
        quad = 1
    elif x < 0 and y > 0:
        quad = 3
    elif x < 0 and y < 0:
        quad = 5
    else:
        quad = 7
    return (quad, Fraction(y, x))


def ccw_sorted(vectors: Sequence[QPoint]) -> list[int]:
    """Indices of vectors sorted counterclockwise from the +x axis."""
    return sorted(range(len(vectors)), key=lambda i: pseudo_angle_key(vectors[i]))


def segments_cross(a: QPoint, b: QPoint, c: QPoint, d: QPoint) -> bool:
    """True iff the open segments ab and cd intersect in exactly one interior
    point (proper crossing).  Shared endpoints do not count."""
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def segment_touches(a: QPoint, b: QPoint, c: QPoint, d: QPoint) -> bool:
    """True iff closed segments ab and cd share any point besides common
    endpoints (overlap, T-touch, or proper crossing)."""
    if segments_cross(a, b, c, d):
        return True
    for p in (c, d):
        if p not in (a, b) and on_segment(a, b, p):
            return True
    for p in (a, b):
        if p not in (c, d) and on_segment(c, d, p):
            return True
    # collinear full overlap with shared endpoints only is excluded above;
    # detect identical segments
    if {a, b} == {c, d}:
        return True
    return False


def on_segment(a: QPoint, b: QPoint, p: QPoint) -> bool:
    """True iff p lies on the closed segment ab."""
    if orient(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segment_intersection(a: QPoint, b: QPoint, c: QPoint, d: QPoint):
    """Intersection point of lines ab and cd, or None if parallel."""
    r = sub(b, a)
    s = sub(d, c)
    den = cross(r, s)
    if den == 0:
        return None
    t = cross(sub(c, a), s) / den
    return add(a, scale(r, t))


def segment_cross_param(a: QPoint, b: QPoint, c: QPoint, d: QPoint):
    """Parameter t in (0,1) with a+t(b-a) on open crossing of ab with cd,
    or None when the segments do not properly cross."""
    if not segments_cross(a, b, c, d):
        return None
    r = sub(b, a)
    s = sub(d, c)
    den = cross(r, s)
    t = cross(sub(c, a), s) / den
    return t


def point_in_polygon(p: QPoint, poly: Sequence[QPoint]) -> int:
    """Exact point vs simple closed polygon: +1 inside, 0 on boundary, -1 outside.

    Uses the winding-free crossing test with careful vertex handling.
    """
    n = len(poly)
    for i in range(n):
        if on_segment(poly[i], poly[(i + 1) % n], p):
            return 0
    inside = False
    x, y = p
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            # x coordinate of the edge at height y, exact
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xi > x:
                inside = not inside
    return 1 if inside else -1


def polygon_area2(poly: Sequence[QPoint]) -> Fraction:
    """Twice the signed area (ccw positive)."""
    s = Fraction(0)
    n = len(poly)
    for i in range(n):
        s += cross(poly[i], poly[(i + 1) % n])
    return s


def polyline_is_simple(points: Sequence[QPoint], closed: bool = True) -> bool:
    """Exact simplicity check for a polygonal chain (O(n^2))."""
    n = len(points)
    segs = []
    m = n if closed else n - 1
    for i in range(m):
        a, b = points[i], points[(i + 1) % n]
        if a == b:
            continue
        segs.append((a, b))
    k = len(segs)
    for i in range(k):
        a, b = segs[i]
        for j in range(i + 1, k):
            c, d = segs[j]
            adjacent = b == c or d == a or (closed and (a == d or b == c))
            if segments_cross(a, b, c, d):
                return False
            if not adjacent and segment_touches(a, b, c, d):
                return False
    return True


def side_of_polyline(p: QPoint, chain: Sequence[QPoint], ray_dir: QPoint,
                     ray_len: Fraction) -> int:
    """Signed crossing number of the ray p -> p + ray_len*ray_dir with chain.

    Returns the total signed count: a crossing counts +1 when the chain
    passes the ray from its right to its left (chain direction vs ray
    direction), -1 the other way.  Raises ValueError when the ray hits a
    chain vertex or is collinear with a chain segment (caller perturbs).
    """
    q = add(p, scale(ray_dir, ray_len))
    total = 0
    for i in range(len(chain) - 1):
        a, b = chain[i], chain[i + 1]
        if on_segment(p, q, a) or on_segment(p, q, b):
            raise ValueError("ray hits chain vertex")
        if segments_cross(p, q, a, b):
            # chain segment a->b crosses the ray; orientation via cross product
            s = cross(sub(q, p), sub(b, a))
            if s == 0:
                raise ValueError("collinear crossing")
            total += 1 if s > 0 else -1
    return total
