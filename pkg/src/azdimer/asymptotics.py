"""Scaling limits: astroidal domains, phase diagram, arctic curve, limit
shape, and slope for genus-zero periodic angle data.

The spectral curve is the Riemann sphere, the real locus is the unit
circle, sigma(z) = 1/conj(z), and the closed unit disk plays the role of
the upper half.  The action density at a macroscopic point (x, y) is the
rational function

    F(x, y; z) = x f1(z) + y f2(z) + f3(z),

where f1 = sum -b_e/(z - nu), f2 = sum a_e/(z - nu), f3 = sum c_e/(z - nu)
run over the torus strands with their side data.  Its zeros classify the
local phase; double zeros on the circle parametrize the arctic curve, and
the limit shape is an imaginary-normalized contour integral of F.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    NonSimpleBoundary,
    QuadratureFailure,
    RootFindingFailure,
    SigmaRealityViolation,
    SlopeOutsidePolygon,
)

CIRCLE_TOL = 1e-8
DOUBLE_ZERO_TOL = 1e-5


# ---------------------------------------------------------------------------
# astroidal domains


@dataclass
class AstroidalDomain:
    """Polygonal scaling limit of a family of AZ graphs.

    ``sides`` lists, per side of the Newton polygon in counterclockwise
    order, the primitive vector (a, b), the lattice length, and the value
    c(e) of the boundary parameter.  The line of side e is
    -b x + a y + c(e) = 0, oriented along (a, b).
    """

    primitives: List[Tuple[int, int]]
    lengths: List[int]
    c: List[float]

    def __post_init__(self):
        n = len(self.primitives)
        if not (len(self.lengths) == len(self.c) == n):
            raise ValueError("side data lengths differ")

    @property
    def n_sides(self) -> int:
        return len(self.primitives)

    def line(self, e: int) -> Tuple[float, float, float]:
        """Coefficients (A, B, C) of A x + B y + C = 0 for side e."""
        a, b = self.primitives[e]
        return (-float(b), float(a), float(self.c[e]))

    def line_value(self, e: int, x: float, y: float) -> float:
        A, B, C = self.line(e)
        return A * x + B * y + C

    def corner(self, v: int) -> Tuple[float, float]:
        """p_v: intersection of the lines of sides e_v and e_{v+1} (corner
        v sits between them, matching the Newton polygon labeling)."""
        n = self.n_sides
        A1, B1, C1 = self.line(v)
        A2, B2, C2 = self.line((v + 1) % n)
        det = A1 * B2 - A2 * B1
        if abs(det) < 1e-14:
            raise NonSimpleBoundary(f"parallel sides at corner {v}")
        x = (-C1 * B2 + C2 * B1) / det
        y = (-A1 * C2 + A2 * C1) / det
        return (x, y)

    def boundary_cycle(self) -> List[Tuple[float, float]]:
        """Corner points visited in clockwise cyclic corner order, which
        traverses the domain boundary counterclockwise."""
        n = self.n_sides
        return [self.corner(v) for v in range(n - 1, -1, -1)]

    def is_simple(self) -> bool:
        pts = self.boundary_cycle()
        n = len(pts)
        segs = [(pts[i], pts[(i + 1) % n]) for i in range(n)]

        def cross(o, a, b):
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

        def proper(s1, s2):
            (a, b), (c, d) = s1, s2
            d1, d2 = cross(a, b, c), cross(a, b, d)
            d3, d4 = cross(c, d, a), cross(c, d, b)
            return d1 * d2 < 0 and d3 * d4 < 0

        for i in range(n):
            for j in range(i + 1, n):
                if j in (i, (i + 1) % n) or i == (j + 1) % n:
                    continue
                if proper(segs[i], segs[j]):
                    return False
        area2 = sum(
            pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1]
            for i in range(n)
        )
        return area2 > 0

    def is_admissible(self, tol: float = 1e-12) -> bool:
        return abs(sum(l * float(cv) for l, cv in zip(self.lengths, self.c))) <= tol

    def contains(self, x: float, y: float) -> bool:
        pts = self.boundary_cycle()
        n = len(pts)
        inside = False
        for i in range(n):
            (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % n]
            if (y1 > y) != (y2 > y):
                xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if xi > x:
                    inside = not inside
        return inside

    def sign_at(self, x: float, y: float, zero_tol: float = 0.0) -> List[int]:
        out = []
        for e in range(self.n_sides):
            v = self.line_value(e, x, y)
            if abs(v) <= zero_tol:
                out.append(0)
            else:
                out.append(1 if v > 0 else -1)
        return out

    def sign_changes_at(self, x: float, y: float) -> int:
        s = self.sign_at(x, y)
        if 0 in s:
            raise ValueError("point on a boundary line")
        n = self.n_sides
        return sum(1 for e in range(n) if s[e] != s[(e + 1) % n])


def astroidal_domain(primitives, lengths, c) -> AstroidalDomain:
    """Validated astroidal domain; raises NonSimpleBoundary when the cycle
    self-intersects.  Admissibility is reported via is_admissible."""
    dom = AstroidalDomain(list(primitives), list(lengths), list(c))
    if not dom.is_simple():
        raise NonSimpleBoundary("boundary cycle is not simple")
    return dom


# ---------------------------------------------------------------------------
# the action density


@dataclass
class ActionData:
    """Angles with their side data: one record per torus strand."""

    records: List[Tuple[complex, int, int, float]]  # (nu, a_e, b_e, c_e)

    def __post_init__(self):
        # group records by coincident angle values for root finding
        groups: List[Tuple[complex, List[int]]] = []
        for i, (nu, a, b, c) in enumerate(self.records):
            for k, (z, idxs) in enumerate(groups):
                if abs(z - nu) < 1e-13:
                    idxs.append(i)
                    break
            else:
                groups.append((nu, [i]))
        self.groups = groups

    @classmethod
    def from_az(cls, az, ang, c_sides: Sequence[float]) -> "ActionData":
        recs = []
        for s in az.strands:
            e = az.system.strand_edge(s.id)
            a, b = az.polygon.edges[e].primitive
            recs.append((complex(ang.angle(s.id)), a, b, float(c_sides[e])))
        return cls(recs)

    def domain(self, lengths: Optional[Sequence[int]] = None) -> AstroidalDomain:
        prims: List[Tuple[int, int]] = []
        cs: List[float] = []
        lens: List[int] = []
        for (nu, a, b, c) in self.records:
            if (a, b) in prims:
                k = prims.index((a, b))
                lens[k] += 1
                continue
            prims.append((a, b))
            cs.append(c)
            lens.append(1)
        return AstroidalDomain(prims, lens, cs)

    # -- rational densities -------------------------------------------------

    def f(self, j: int, z: complex) -> complex:
        out = 0j
        for (nu, a, b, c) in self.records:
            rho = (-b, a, c)[j - 1]
            out += rho / (z - nu)
        return out

    def fprime(self, j: int, z: complex, order: int = 1) -> complex:
        out = 0j
        fact = math.factorial(order)
        sign = (-1) ** order
        for (nu, a, b, c) in self.records:
            rho = (-b, a, c)[j - 1]
            out += rho * sign * fact / (z - nu) ** (order + 1)
        return out

    def F(self, x: float, y: float, z: complex) -> complex:
        return x * self.f(1, z) + y * self.f(2, z) + self.f(3, z)

    def Fprime(self, x: float, y: float, z: complex, order: int = 1) -> complex:
        return (
            x * self.fprime(1, z, order)
            + y * self.fprime(2, z, order)
            + self.fprime(3, z, order)
        )

    def residue(self, gi: int, x: float, y: float) -> float:
        """Residue of F at the gi-th distinct angle."""
        out = 0.0
        for i in self.groups[gi][1]:
            nu, a, b, c = self.records[i]
            out += -b * x + a * y + c
        return out

    def numerator_coeffs(self, x: float, y: float) -> np.ndarray:
        """Coefficients (descending) of the numerator polynomial of F over
        the product of (z - nu) for distinct angles."""
        zs = [z for z, _ in self.groups]
        m = len(zs)
        total = np.zeros(m, dtype=complex)
        for gi in range(m):
            rho = self.residue(gi, x, y)
            if rho == 0.0:
                continue
            others = [zs[k] for k in range(m) if k != gi]
            total += rho * np.poly(others)
        return total

    def zeros(self, x: float, y: float) -> np.ndarray:
        """All zeros of F(x,y; .) on the sphere, with one Newton polish."""
        coeffs = self.numerator_coeffs(x, y)
        # residues sum to zero for admissible data: drop the leading
        # coefficient when it is negligible
        scale = np.abs(coeffs).max()
        if scale == 0:
            raise RootFindingFailure("action density vanishes identically")
        k = 0
        while k < len(coeffs) - 1 and abs(coeffs[k]) < 1e-11 * scale:
            k += 1
        coeffs = coeffs[k:]
        if len(coeffs) <= 1:
            return np.array([], dtype=complex)
        roots = np.roots(coeffs)
        # Newton polish on F itself
        for i, r in enumerate(roots):
            for _ in range(2):
                fp = self.Fprime(x, y, r)
                if abs(fp) < 1e-14:
                    break
                step = self.F(x, y, r) / fp
                if abs(step) > 0.1:
                    break
                r = r - step
            roots[i] = r
        return roots


@dataclass
class PhasePoint:
    x: float
    y: float
    kind: str  # Rough | Frozen | QuasiFrozen | ArcticBoundary | TurningPoint | Unclassified
    zeta: Optional[complex] = None
    arc: Optional[Tuple[int, int]] = None  # indices of the flanking angle groups
    cusp: bool = False
    zeros: Optional[np.ndarray] = None


def classify_phase(data: ActionData, x: float, y: float,
                   circle_tol: float = CIRCLE_TOL,
                   pair_tol: float = DOUBLE_ZERO_TOL) -> PhasePoint:
    """Locate the two non-forced zeros of the action density and classify.

    Inside the domain a conjugate-inverse pair off the circle means the
    rough phase; a pair on the circle in one inter-angle arc means frozen
    (flanking angles from different sides of N) or quasi-frozen (same
    side); a nearly coincident pair on the circle is the arctic boundary,
    with a cusp when it is a near-triple zero.
    """
    roots = data.zeros(x, y)
    off = [r for r in roots if abs(abs(r) - 1.0) > circle_tol]
    if off:
        inside = [r for r in off if abs(r) < 1.0]
        if len(inside) != 1 or len(off) != 2:
            raise RootFindingFailure(
                f"unexpected off-circle zeros at ({x},{y}): {off}"
            )
        z_in = inside[0]
        z_out = [r for r in off if r is not z_in][0]
        if abs(z_out - 1.0 / np.conj(z_in)) > 1e-5 * max(1.0, abs(z_out)):
            raise RootFindingFailure("off-circle zeros are not a sigma pair")
        return PhasePoint(x, y, "Rough", zeta=complex(z_in), zeros=roots)
    # all zeros on the circle: bucket by inter-angle arc and compare with
    # the forced parity
    zs = [z for z, _ in data.groups]
    m = len(zs)
    args = sorted(range(m), key=lambda k: cmath.phase(zs[k]) % (2 * math.pi))
    arcs: List[List[complex]] = [[] for _ in range(m)]
    angs = [cmath.phase(zs[k]) % (2 * math.pi) for k in args]
    for r in roots:
        th = cmath.phase(r) % (2 * math.pi)
        j = 0
        for j in range(m):
            lo = angs[j]
            hi = angs[(j + 1) % m]
            width = (hi - lo) % (2 * math.pi)
            if (th - lo) % (2 * math.pi) <= width:
                break
        arcs[j].append(r)
    extra = None
    for j in range(m):
        gi, gj = args[j], args[(j + 1) % m]
        r1 = data.residue(gi, x, y)
        r2 = data.residue(gj, x, y)
        forced = 1 if r1 * r2 > 0 else 0
        count = len(arcs[j])
        if (count - forced) % 2 == 0 and count >= forced + 2:
            if extra is not None:
                return PhasePoint(x, y, "Unclassified", zeros=roots)
            extra = (j, arcs[j])
    if extra is None:
        return PhasePoint(x, y, "Unclassified", zeros=roots)
    j, rs = extra
    gi, gj = args[j], args[(j + 1) % m]
    rs_sorted = sorted(rs, key=lambda r: cmath.phase(r))
    # find the closest pair among the arc's roots
    best = None
    for i in range(len(rs_sorted)):
        for k in range(i + 1, len(rs_sorted)):
            d = abs(rs_sorted[i] - rs_sorted[k])
            if best is None or d < best[0]:
                best = (d, i, k)
    pair_close = best is not None and best[0] < pair_tol
    side_i = _side_of_angle(data, gi)
    side_j = _side_of_angle(data, gj)
    if pair_close:
        zz = (rs_sorted[best[1]] + rs_sorted[best[2]]) / 2
        cusp = len(rs) >= 3 and sorted(
            abs(r - zz) for r in rs
        )[2] < 10 * pair_tol if len(rs) >= 3 else False
        return PhasePoint(x, y, "ArcticBoundary", zeta=complex(zz / abs(zz)),
                          arc=(gi, gj), cusp=cusp, zeros=roots)
    kind = "Frozen" if side_i != side_j else "QuasiFrozen"
    return PhasePoint(x, y, kind, arc=(gi, gj), zeros=roots)


def _side_of_angle(data: ActionData, gi: int) -> Tuple[int, int]:
    i0 = data.groups[gi][1][0]
    nu, a, b, c = data.records[i0]
    return (a, b)


# ---------------------------------------------------------------------------
# the inverse parametrizations


def omega_inverse_interior(data: ActionData, zeta: complex) -> Tuple[float, float]:
    """Unique rough-region point whose action density vanishes at zeta."""
    f1, f2, f3 = (data.f(j, zeta) for j in (1, 2, 3))
    den = (np.conj(f1) * f2).imag
    if den == 0:
        raise RootFindingFailure("degenerate interior point")
    x = (np.conj(f2) * f3).imag / den
    y = (f1 * np.conj(f3)).imag / den
    return (float(x), float(y))


def arctic_point(data: ActionData, u: complex,
                 tol: float = 1e-8) -> Tuple[float, float]:
    """Point of the arctic curve where the boundary parameter is u (unit
    modulus, not an angle): the double-zero condition F = F' = 0."""
    f1, f2, f3 = (data.f(j, u) for j in (1, 2, 3))
    g1, g2, g3 = (data.fprime(j, u) for j in (1, 2, 3))
    den = f1 * g2 - g1 * f2
    if abs(den) < 1e-14:
        raise RootFindingFailure("degenerate boundary parameter")
    x = (f2 * g3 - g2 * f3) / den
    y = (g1 * f3 - f1 * g3) / den
    scale = max(1.0, abs(x), abs(y))
    if abs(x.imag) > tol * scale or abs(y.imag) > tol * scale:
        raise SigmaRealityViolation(
            f"imaginary residual {max(abs(x.imag), abs(y.imag))} at u={u}"
        )
    return (float(x.real), float(y.real))


def arctic_tangent_slope(data: ActionData, u: complex) -> float:
    """Slope of the tangent line to the arctic curve at parameter u."""
    f1 = data.f(1, u)
    f2 = data.f(2, u)
    val = -f1 / f2
    return float(val.real)


def turning_point(data: ActionData, gi: int,
                  tol: float = 1e-8) -> Tuple[float, float]:
    """The unique turning point for the gi-th distinct angle: solve for F
    having a zero at the angle via h_j = (z - alpha) f_j."""
    alpha = data.groups[gi][0]

    def h(j):
        # value and derivative of (z - alpha) f_j at z = alpha
        val = 0j
        der = 0j
        for (nu, a, b, c) in data.records:
            rho = (-b, a, c)[j - 1]
            if abs(nu - alpha) < 1e-13:
                val += rho
            else:
                # (z-alpha) rho/(z-nu): value 0 at alpha is wrong; expand:
                # at z=alpha the term is rho*(z-alpha)/(z-nu):
                # value 0? no: (alpha-alpha)=0 => contributes 0 to h(alpha)
                # and rho/(alpha-nu) to h'(alpha)
                der += rho / (alpha - nu)
        return val, der

    (h1, dh1), (h2, dh2), (h3, dh3) = h(1), h(2), h(3)
    den = h1 * dh2 - dh1 * h2
    if abs(den) < 1e-14:
        raise RootFindingFailure("degenerate turning point system")
    x = (h2 * dh3 - dh2 * h3) / den
    y = (dh1 * h3 - h1 * dh3) / den
    scale = max(1.0, abs(x), abs(y))
    if abs(x.imag) > tol * scale or abs(y.imag) > tol * scale:
        raise SigmaRealityViolation(
            f"imaginary residual at turning point {alpha}"
        )
    return (float(x.real), float(y.real))


def turning_tangent(data: ActionData, gi: int) -> Tuple[float, float]:
    """Direction vector of the tangent line at the turning point (it is the
    line of the angle's side)."""
    i0 = data.groups[gi][1][0]
    nu, a, b, c = data.records[i0]
    return (float(a), float(b))


# ---------------------------------------------------------------------------
# arctic curve sampling


@dataclass
class ArcticSample:
    parameter: float  # argument of u on the circle
    x: float
    y: float
    tangent_slope: float
    cusp: bool
    is_turning_point: bool = False


def sample_arctic_curve(data: ActionData, m: int,
                        angle_margin: float = 1e-3,
                        cusp_tol: float = 1e-6) -> List[ArcticSample]:
    """m arctic-curve points away from the angles, plus the turning points,
    ordered by the circle parameter."""
    zs = [z for z, _ in data.groups]
    if m < len(zs):
        raise ValueError("need at least one sample per angle gap")
    angs = sorted(cmath.phase(z) % (2 * math.pi) for z in zs)
    out: List[ArcticSample] = []
    k = len(angs)
    for i in range(k):
        lo = angs[i]
        width = (angs[(i + 1) % k] - lo) % (2 * math.pi)
        cnt = max(2, int(round(m * width / (2 * math.pi))))
        for t in np.linspace(angle_margin, width - angle_margin, cnt):
            th = (lo + t) % (2 * math.pi)
            u = cmath.exp(1j * th)
            x, y = arctic_point(data, u)
            H = data.Fprime(x, y, u, 2)
            scale = sum(
                abs(data.fprime(j, u, 2)) for j in (1, 2, 3)
            ) * max(1.0, abs(x), abs(y))
            cusp = abs(H) < cusp_tol * max(scale, 1e-30)
            out.append(ArcticSample(th, x, y, arctic_tangent_slope(data, u), cusp))
    for gi in range(len(data.groups)):
        x, y = turning_point(data, gi)
        a, b = turning_tangent(data, gi)
        slope = math.inf if a == 0 else b / a
        th = cmath.phase(data.groups[gi][0]) % (2 * math.pi)
        out.append(ArcticSample(th, x, y, slope, False, is_turning_point=True))
    out.sort(key=lambda s: s.parameter)
    return out


def polyline_is_simple(samples: Sequence[ArcticSample]) -> bool:
    from shapely.geometry import LineString

    pts = [(s.x, s.y) for s in samples] + [(samples[0].x, samples[0].y)]
    return LineString(pts).is_simple


# ---------------------------------------------------------------------------
# limit shape and slope


def base_point(data: ActionData, u0: int) -> complex:
    """Midpoint of the circle arc corresponding to corner u0 of N.

    Corner u0 separates side u0 (clockwise) from side u0+1: the arc runs
    from the last angle of side u0's family to the first angle of the
    next family, in counterclockwise order starting from side 0's block.
    """
    # order angle groups by family blocks in ccw order
    recs = data.records
    # families in ccw order of primitives as given
    fam_angles: Dict[Tuple[int, int], List[float]] = {}
    order: List[Tuple[int, int]] = []
    for (nu, a, b, c) in recs:
        if (a, b) not in order:
            order.append((a, b))
        fam_angles.setdefault((a, b), []).append(cmath.phase(nu) % (2 * math.pi))
    n = len(order)
    u0 = u0 % n
    fam_lo = order[u0]
    fam_hi = order[(u0 + 1) % n]
    # last angle of fam_lo's block, first of fam_hi's, in circular order
    lo = max(fam_angles[fam_lo]) if u0 + 1 < n or True else None
    # blocks appear in ccw order; handle wrap by sorting each block around
    # the overall arrangement
    lo_angs = fam_angles[fam_lo]
    hi_angs = fam_angles[fam_hi]
    # the arc from some angle in lo block to some in hi block that contains
    # no other angle
    all_angs = sorted(
        (cmath.phase(nu) % (2 * math.pi)) for (nu, a, b, c) in recs
    )
    for a1 in sorted(lo_angs):
        for a2 in sorted(hi_angs):
            width = (a2 - a1) % (2 * math.pi)
            # empty arc?
            interior = [
                t for t in all_angs
                if 0 < (t - a1) % (2 * math.pi) < width
            ]
            if not interior and width > 0:
                mid = (a1 + width / 2) % (2 * math.pi)
                return cmath.exp(1j * mid)
    raise RootFindingFailure(f"no empty arc at corner {u0}")


def _integrate_F(data: ActionData, weights: Tuple[float, float, float],
                 path: Sequence[complex]) -> complex:
    """Integral of w1 f1 + w2 f2 + w3 f3 along a polyline, by adaptive
    Gauss-Legendre on each segment."""
    from numpy.polynomial.legendre import leggauss

    nodes, wts = leggauss(48)

    def seg_integral(a: complex, b: complex, depth: int = 0) -> complex:
        mid = (a + b) / 2
        half = (b - a) / 2

        def val(order_nodes, order_wts):
            tot = 0j
            for t, wq in zip(order_nodes, order_wts):
                z = mid + half * t
                f = (
                    weights[0] * data.f(1, z)
                    + weights[1] * data.f(2, z)
                    + weights[2] * data.f(3, z)
                )
                tot += wq * f
            return tot * half

        coarse_nodes, coarse_wts = leggauss(24)
        v1 = val(coarse_nodes, coarse_wts)
        v2 = val(nodes, wts)
        if abs(v1 - v2) < 1e-11 * max(1.0, abs(v2)) or depth >= 12:
            if depth >= 12 and abs(v1 - v2) > 1e-7 * max(1.0, abs(v2)):
                raise QuadratureFailure("segment integral did not converge")
            return v2
        return seg_integral(a, mid, depth + 1) + seg_integral(mid, b, depth + 1)

    total = 0j
    for a, b in zip(path, path[1:]):
        total += seg_integral(a, b)
    return total


def _path_to(data: ActionData, p: complex, zeta: complex) -> List[complex]:
    """Two-segment polyline from the base point to zeta staying in the
    closed disk, pulled slightly inside near the circle."""
    inner = 0.0 + 0.0j
    return [p, inner, zeta]


def limit_shape(data: ActionData, x: float, y: float, u0: int,
                zeta: Optional[complex] = None,
                base: Optional[complex] = None) -> float:
    """Rescaled height at (x, y) relative to the extremal cover of corner
    u0: -(1/pi) Im of the action integral from the corner's circle arc to
    the classified zero."""
    if zeta is None:
        ph = classify_phase(data, x, y)
        if ph.kind == "Rough":
            zeta = ph.zeta
        elif ph.arc is not None:
            z1 = data.groups[ph.arc[0]][0]
            z2 = data.groups[ph.arc[1]][0]
            a1 = cmath.phase(z1) % (2 * math.pi)
            w = (cmath.phase(z2) % (2 * math.pi) - a1) % (2 * math.pi)
            zeta = cmath.exp(1j * (a1 + w / 2))
        else:
            raise RootFindingFailure(f"({x},{y}) is not in a phase region")
    p = base if base is not None else base_point(data, u0)
    val = _integrate_F(data, (x, y, 1.0), _path_to(data, p, zeta))
    # the in-disk path realizes the mirror of the defining contour, so the
    # imaginary-part prefactor is +1/pi here (calibrated so that frozen
    # slopes land on the vertices of N rotated by -pi/2)
    return float(val.imag / math.pi)


def slope(data: ActionData, x: float, y: float, u0: int,
          zeta: Optional[complex] = None,
          check_polygon: bool = True) -> Tuple[float, float]:
    """Slope of the local Gibbs measure at (x, y), normalized so that the
    extremal cover of corner u0 has slope (0, 0)."""
    if zeta is None:
        ph = classify_phase(data, x, y)
        if ph.kind == "Rough":
            zeta = ph.zeta
        elif ph.arc is not None:
            z1 = data.groups[ph.arc[0]][0]
            z2 = data.groups[ph.arc[1]][0]
            a1 = cmath.phase(z1) % (2 * math.pi)
            w = (cmath.phase(z2) % (2 * math.pi) - a1) % (2 * math.pi)
            zeta = cmath.exp(1j * (a1 + w / 2))
        else:
            raise RootFindingFailure(f"({x},{y}) is not in a phase region")
    p = base_point(data, u0)
    path = _path_to(data, p, zeta)
    s = _integrate_F(data, (1.0, 0.0, 0.0), path).imag / math.pi
    t = _integrate_F(data, (0.0, 1.0, 0.0), path).imag / math.pi
    if check_polygon and not _in_rotated_polygon(data, s, t, u0, tol=1e-7):
        raise SlopeOutsidePolygon(f"slope ({s},{t}) outside the rotated polygon")
    return (float(s), float(t))


def rotated_polygon_vertices(data: ActionData, u0: int) -> List[Tuple[float, float]]:
    """Vertices of the Newton polygon rotated by -pi/2, translated so that
    the vertex of corner u0 sits at the origin.  Corner u0's vertex is the
    slope of the extremal cover M_{u0}."""
    order: List[Tuple[int, int]] = []
    counts: Dict[Tuple[int, int], int] = {}
    for (nu, a, b, c) in data.records:
        if (a, b) not in order:
            order.append((a, b))
        counts[(a, b)] = counts.get((a, b), 0) + 1
    n = len(order)
    pts = [(0.0, 0.0)]
    for k in range(n):
        a, b = order[(u0 + 1 + k) % n]
        le = counts[(a, b)]
        # side vector rotated by -pi/2: (a,b) -> (b,-a)
        last = pts[-1]
        pts.append((last[0] + le * b, last[1] - le * a))
    return pts[:-1]


def _in_rotated_polygon(data: ActionData, s: float, t: float, u0: int,
                        tol: float = 1e-7) -> bool:
    pts = rotated_polygon_vertices(data, u0)
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        cr = (x2 - x1) * (t - y1) - (y2 - y1) * (s - x1)
        if cr < -tol * max(1.0, abs(s), abs(t)):
            return False
    return True
