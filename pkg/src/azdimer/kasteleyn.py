"""Genus-zero (isoradial) Kasteleyn matrices and their exact inverses.

The spectral curve is the Riemann sphere with the unit circle as real
locus; theta factors are identically one and the prime form reduces, after
a global gauge, to eta - zeta.  Strand angles live on the unit circle and
every section in sight is a finite product prod (zeta - alpha)^n, carried
exactly by its exponent map.  The inverse formula is a double residue sum
plus a single whole-plane correction term.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .azgraph import AZGraph, BLACK, WHITE, IntervalOnN, LiftedVertex
from .errors import ColorCountMismatch, ComplexResidual, TooLarge, UnsupportedDegenerate
from .lattice import SparseDivisor

# ---------------------------------------------------------------------------
# numeric context: plain complex or mpmath high precision


class Numeric:
    """Arithmetic context; `dps=None` means double precision."""

    def __init__(self, dps: Optional[int] = None):
        self.dps = dps
        if dps is not None:
            import mpmath

            self.mp = mpmath
        else:
            self.mp = None

    def c(self, z) -> complex:
        if self.dps is None:
            return complex(z)
        return self.mp.mpc(z)

    def to_complex(self, z) -> complex:
        return complex(z.real, z.imag) if self.dps is not None else complex(z)

    def workdps(self):
        if self.dps is None:
            import contextlib

            return contextlib.nullcontext()
        return self.mp.workdps(self.dps)


DOUBLE = Numeric(None)


# ---------------------------------------------------------------------------
# angles


@dataclass
class AngleAssignment:
    """Unit-modulus angles per torus strand, periodic over lifts.

    Strands of distinct families must get distinct angles; parallel strands
    may share one.  `groups` lists the distinct angle values with the
    strands carrying them; sections use group indices as exponent keys.
    """

    by_strand: Dict[int, complex]
    groups: List[Tuple[complex, Tuple[int, ...]]] = field(default_factory=list)
    group_of_strand: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        vals: Dict[complex, List[int]] = {}
        for sid in sorted(self.by_strand):
            z = complex(self.by_strand[sid])
            if abs(abs(z) - 1.0) > 1e-12:
                raise ValueError(f"angle for strand {sid} is not unit modulus: {z}")
            for z0 in vals:
                if abs(z0 - z) < 1e-13:
                    vals[z0].append(sid)
                    break
            else:
                vals[z] = [sid]
        self.groups = [(z, tuple(sids)) for z, sids in vals.items()]
        self.group_of_strand = {}
        for gi, (_, sids) in enumerate(self.groups):
            for sid in sids:
                self.group_of_strand[sid] = gi

    def angle(self, sid: int) -> complex:
        return self.by_strand[sid]

    def group_value(self, gi: int) -> complex:
        return self.groups[gi][0]

    def n_groups(self) -> int:
        return len(self.groups)

    def validate_cyclic(self, az: AZGraph) -> bool:
        """Angles must respect the counterclockwise order of the Newton
        polygon sides: the families' angle blocks appear in the same cyclic
        order, and non-parallel strands never share an angle."""
        fam_of = {s.id: az.system.strand_edge(s.id) for s in az.strands}
        for _, sids in self.groups:
            fams = {fam_of[s] for s in sids}
            if len(fams) > 1:
                return False
        args = []
        for e in range(az.n_sides):
            sids = az.polygon.edges[e].strand_ids
            for sid in sids:
                args.append((e, cmath.phase(self.by_strand[sid]) % (2 * math.pi)))
        # rotate so family 0's first angle starts the list, then family
        # indices must be non-decreasing
        base = min(a for e, a in args if e == 0)
        seq = sorted(args, key=lambda t: (t[1] - base) % (2 * math.pi))
        fams = [e for e, _ in seq]
        k = fams.index(0)
        fams = fams[k:] + fams[:k]
        return all(fams[i] <= fams[i + 1] for i in range(len(fams) - 1))


def evenly_spaced_angles(az: AZGraph, rotate: float = 0.0) -> AngleAssignment:
    """One angle per strand, spread uniformly in family order."""
    order: List[int] = []
    for e in range(az.n_sides):
        order.extend(az.polygon.edges[e].strand_ids)
    m = len(order)
    by = {
        sid: cmath.exp(1j * (2 * math.pi * k / m + rotate))
        for k, sid in enumerate(order)
    }
    return AngleAssignment(by_strand=by)


def random_angles(az: AZGraph, rng: random.Random,
                  min_gap: float = 0.15) -> AngleAssignment:
    """Random angles compatible with the cyclic order, with a minimal
    angular gap to keep the residue calculus well conditioned."""
    order: List[int] = []
    for e in range(az.n_sides):
        order.extend(az.polygon.edges[e].strand_ids)
    m = len(order)
    while True:
        cuts = sorted(rng.uniform(0, 2 * math.pi) for _ in range(m))
        gaps = [
            (cuts[(i + 1) % m] - cuts[i]) % (2 * math.pi) for i in range(m)
        ]
        if min(gaps) > min_gap:
            break
    rot = rng.uniform(0, 2 * math.pi)
    by = {sid: cmath.exp(1j * (cuts[k] + rot)) for k, sid in enumerate(order)}
    return AngleAssignment(by_strand=by)


# ---------------------------------------------------------------------------
# rational sections: zeta |-> prod_g (zeta - angle_g)^{n_g}


class RationalSection:
    """Finite map from angle-group index to integer exponent."""

    __slots__ = ("exps", "ang")

    def __init__(self, ang: AngleAssignment, exps: Optional[Dict[int, int]] = None):
        self.ang = ang
        self.exps = {k: v for k, v in (exps or {}).items() if v}

    @classmethod
    def from_divisor(cls, ang: AngleAssignment, div: SparseDivisor) -> "RationalSection":
        exps: Dict[int, int] = {}
        for (sid, _idx), c in div.coeffs.items():
            gi = ang.group_of_strand[sid]
            exps[gi] = exps.get(gi, 0) + c
        return cls(ang, exps)

    def degree(self) -> int:
        return sum(self.exps.values())

    def __mul__(self, other: "RationalSection") -> "RationalSection":
        exps = dict(self.exps)
        for k, v in other.exps.items():
            exps[k] = exps.get(k, 0) + v
        return RationalSection(self.ang, exps)

    def inverse(self) -> "RationalSection":
        return RationalSection(self.ang, {k: -v for k, v in self.exps.items()})

    def order_at(self, gi: int) -> int:
        return self.exps.get(gi, 0)

    def evaluate(self, z, ctx: Numeric = DOUBLE):
        out = ctx.c(1)
        for gi, n in self.exps.items():
            out = out * (z - ctx.c(self.ang.group_value(gi))) ** n
        return out

    def cofactor_taylor(self, gi: int, count: int, ctx: Numeric = DOUBLE) -> List[complex]:
        """Taylor coefficients at the group angle a of
        H(zeta) = section / (zeta - a)^{n_a} (analytic and nonzero at a)."""
        a = ctx.c(self.ang.group_value(gi))
        # log-derivative power sums: L^{(k)}(a) = sum n_j (-1)^{k-1}(k-1)!/(a-a_j)^k
        h0 = ctx.c(1)
        for gj, n in self.exps.items():
            if gj == gi:
                continue
            h0 = h0 * (a - ctx.c(self.ang.group_value(gj))) ** n
        if count == 1:
            return [h0]
        ell = [ctx.c(0)] * count  # ell[k] = L^{(k)}(a)/(k-1)! for k >= 1
        for gj, n in self.exps.items():
            if gj == gi:
                continue
            d = a - ctx.c(self.ang.group_value(gj))
            inv = 1 / d
            p = inv
            for k in range(1, count):
                # L^{(k)}(a)/(k-1)! = n * (-1)^{k-1} / (a - a_j)^k
                ell[k] = ell[k] + n * ((-1) ** (k - 1)) * p
                p = p * inv
        h = [h0] + [ctx.c(0)] * (count - 1)
        for m in range(1, count):
            s = ctx.c(0)
            for k in range(1, m + 1):
                s = s + ell[k] * h[m - k]
            h[m] = s / m
        return h

    def __repr__(self):
        return "Section(%s)" % ", ".join(
            f"g{gi}^{n}" for gi, n in sorted(self.exps.items())
        )


def residues_at(section: RationalSection, keys: Iterable[int],
                ctx: Numeric = DOUBLE,
                extra_poles: Sequence[Tuple[complex, int, complex]] = (),
                with_gross: bool = False):
    """Sum over gi in keys of Res_{zeta=a_gi}[ phi(zeta) * section(zeta) ],
    where phi = 1 + 0 extra poles by default, or the rational function
    sum_k c_k (zeta - z_k)^{-p_k} when `extra_poles` lists (z_k, p_k, c_k)
    with p_k >= 1 and each z_k either an angle of the section's assignment
    or a generic point.

    Without extra poles, this is the residue sum of section(zeta) d zeta.
    """
    ang = section.ang
    total = ctx.c(0)
    gross = 0.0
    for gi in keys:
        a = ctx.c(ang.group_value(gi))
        n_a = section.order_at(gi)
        own = [
            (p, c) for (z, p, c) in extra_poles
            if abs(ctx.to_complex(ctx.c(z) - a)) < 1e-13
        ]
        others = [
            (z, p, c) for (z, p, c) in extra_poles
            if abs(ctx.to_complex(ctx.c(z) - a)) >= 1e-13
        ]
        # needed Taylor order of H at a
        need = 0
        if n_a < 0:
            need = max(need, -n_a)  # coefficient -n_a - 1 of phi*H
        for p, _c in own:
            need = max(need, p - n_a)
        if need == 0:
            continue
        H = section.cofactor_taylor(gi, need, ctx)
        # phi0 = 1 + sum over other poles; Taylor at a
        phi = [ctx.c(0)] * need
        if not extra_poles:
            phi[0] = ctx.c(1)
        else:
            for (z, p, c) in others:
                d = a - ctx.c(z)
                invd = 1 / d
                base = c * invd ** p
                # coeff_j of (zeta-z)^{-p} at a: binom(-p, j) (a-z)^{-p-j}
                #   = (-1)^j C(p+j-1, j) (a-z)^{-p-j}
                for j in range(need):
                    phi[j] = phi[j] + base * ((-1) ** j) * math.comb(p + j - 1, j)
                    base = base * invd
        # residue = [phi*H]_{-n_a-1} when n_a<0 (pole of section at a)
        if n_a < 0:
            m = -n_a - 1
            s = ctx.c(0)
            for j in range(0, m + 1):
                term = phi[j] * H[m - j]
                s = s + term
                gross += abs(term)
            total = total + s
        # own extra poles: c*(zeta-a)^{-p} * (zeta-a)^{n_a} H
        for p, c in own:
            m = p - n_a - 1
            if m >= 0:
                term = c * H[m]
                total = total + term
                gross += abs(term)
    if with_gross:
        return total, gross
    return total


# ---------------------------------------------------------------------------
# sections attached to an AZ graph


class SectionCalculus:
    """Caches the g-sections and boundary section of an AZ graph for a
    given angle assignment."""

    def __init__(self, az: AZGraph, ang: AngleAssignment):
        self.az = az
        self.ang = ang
        self.psi = RationalSection.from_divisor(ang, az.D_beta)
        self._g: Dict[Tuple, RationalSection] = {}

    def g_section(self, x) -> RationalSection:
        """g_x = prod (zeta - alpha)^{d(x)_alpha} with lift exponents
        collapsed per angle."""
        key = tuple(x)
        if key not in self._g:
            self._g[key] = RationalSection.from_divisor(
                self.ang, self.az.abel.value(key)
            )
        return self._g[key]

    def g_bw(self, b, w) -> RationalSection:
        return self.g_section(w) * self.g_section(b).inverse()

    def q_section(self, x) -> RationalSection:
        """g_x * Psi_beta."""
        return self.g_section(x) * self.psi

    def interval_groups(self, iv: IntervalOnN) -> List[int]:
        gs: List[int] = []
        for e in iv.edge_indices():
            for sid in self.az.polygon.edges[e].strand_ids:
                gi = self.ang.group_of_strand[sid]
                if gi not in gs:
                    gs.append(gi)
        return gs


# ---------------------------------------------------------------------------
# Kasteleyn matrix


def kasteleyn_matrix(az: AZGraph, ang: AngleAssignment) -> np.ndarray:
    """Dense W x B matrix with K[w,b] = beta - alpha for the edge's strand
    pair ordered so that the first strand traverses the edge white to black."""
    if len(az.whites) != len(az.blacks):
        raise ColorCountMismatch(
            f"{len(az.whites)} whites vs {len(az.blacks)} blacks"
        )
    wi = {v: i for i, v in enumerate(az.whites)}
    bi = {v: i for i, v in enumerate(az.blacks)}
    K = np.zeros((len(az.whites), len(az.blacks)), dtype=complex)
    for le in az.edges:
        vw, vb = az.edge_pair(le)
        (sid_a, _), (sid_b, _) = az.edge_strand_pair(le)
        K[wi[vw], bi[vb]] += ang.angle(sid_b) - ang.angle(sid_a)
    return K


# ---------------------------------------------------------------------------
# null sector and whole-plane inverse


def null_sector(az: AZGraph, ang: AngleAssignment, b: LiftedVertex,
                w: LiftedVertex) -> IntervalOnN:
    """Arc of the Newton polygon boundary containing the zero-edges of
    g_{b,w} and none of its pole-edges."""
    calc = SectionCalculus(az, ang)
    sec = calc.g_bw(b, w)
    n = az.n_sides
    fam_of_group: Dict[int, int] = {}
    for gi, (_, sids) in enumerate(ang.groups):
        fam_of_group[gi] = az.system.strand_edge(sids[0])
    zero_edges = set()
    pole_edges = set()
    for gi, k in sec.exps.items():
        if k > 0:
            zero_edges.add(fam_of_group[gi])
        elif k < 0:
            pole_edges.add(fam_of_group[gi])
    if zero_edges & pole_edges:
        raise UnsupportedDegenerate(
            "a side carries both zeros and poles of g_{b,w}"
        )
    if zero_edges:
        return _max_interval(n, zero_edges, pole_edges)
    # no zeros: continuity case via an auxiliary strand through b (else w)
    if len(pole_edges) > 2:
        raise UnsupportedDegenerate("no zeros but more than two pole sides")
    for x in (b, w):
        for e_aux in _strand_families_through(az, x):
            if e_aux not in pole_edges:
                return _max_interval(n, {e_aux}, pole_edges)
    raise UnsupportedDegenerate(
        f"no auxiliary strand for the null sector of {b},{w}"
    )


def _strand_families_through(az: AZGraph, x: LiftedVertex) -> List[int]:
    """Sides of N whose strands pass through x, in the infinite graph."""
    fams: List[int] = []
    kind, i, cell = x
    g = az.g
    for e, (wi, bi, off) in enumerate(g.edges):
        if (kind == "w" and wi == i) or (kind == "b" and bi == i):
            for o in (1, -1):
                sid, _pos = az.abel.dart_strand((e, o))
                fam = az.system.strand_edge(sid)
                if fam not in fams:
                    fams.append(fam)
    return fams


def _max_interval(n: int, inside: set, outside: set) -> IntervalOnN:
    """Maximal closed cyclic vertex interval containing the `inside` sides
    and no `outside` side.  Side e joins corner v_{e-1} to v_e."""
    if not outside:
        raise UnsupportedDegenerate("interval undefined without pole sides")
    # grow from the inside set: take complement components of outside sides
    blocked = set(outside)
    # find a side in inside; extend both ways through non-blocked sides
    e0 = min(inside)
    left = e0
    while True:
        cand = (left - 1) % n
        if cand in blocked or cand == e0:
            break
        left = cand
    right = e0
    while True:
        cand = (right + 1) % n
        if cand in blocked or cand == e0:
            break
        right = cand
    iv = IntervalOnN((left - 1) % n, right % n, n)
    if not set(inside) <= set(iv.edge_indices()):
        raise UnsupportedDegenerate("zero sides are not contained in one arc")
    return iv


def whole_plane_inverse(az: AZGraph, ang: AngleAssignment, b: LiftedVertex,
                        w: LiftedVertex, u: int,
                        ctx: Numeric = DOUBLE) -> complex:
    """A^u_{b,w}: residue sum of g_{b,w} over the angles of the sides in
    [u, v] for a vertex v of the null sector."""
    calc = SectionCalculus(az, ang)
    sec = calc.g_bw(b, w)
    ns = null_sector(az, ang, b, w)
    if ns.contains_vertex(u):
        return ctx.c(0)
    iv = IntervalOnN(u, ns.left, az.n_sides)
    keys = calc.interval_groups(iv)
    with ctx.workdps():
        return residues_at(sec, keys, ctx)


def _arc_midpoint_for_vertex(az: AZGraph, ang: AngleAssignment, v: int) -> complex:
    """Midpoint of the circle arc between the angle blocks flanking corner v
    of the Newton polygon."""
    lo_f, hi_f = v, (v + 1) % az.n_sides
    lo_angs = [
        cmath.phase(ang.angle(sid)) % (2 * math.pi)
        for sid in az.polygon.edges[lo_f].strand_ids
    ]
    hi_angs = [
        cmath.phase(ang.angle(sid)) % (2 * math.pi)
        for sid in az.polygon.edges[hi_f].strand_ids
    ]
    all_angs = [
        cmath.phase(ang.angle(s.id)) % (2 * math.pi) for s in az.strands
    ]
    for a1 in sorted(lo_angs):
        for a2 in sorted(hi_angs):
            width = (a2 - a1) % (2 * math.pi)
            if width == 0:
                continue
            if not any(0 < (t - a1) % (2 * math.pi) < width for t in all_angs):
                return cmath.exp(1j * (a1 + width / 2))
    raise UnsupportedDegenerate(f"no empty arc at corner {v}")


def whole_plane_inverse_at(az: AZGraph, ang: AngleAssignment, b, w,
                           zeta: complex) -> complex:
    """A^zeta_{b,w} for zeta off the circle (or on it away from angles):
    the integral of g_{b,w} along a sigma-symmetric path from 1/conj(zeta)
    to zeta crossing the unit circle once in the null-sector arc."""
    calc = SectionCalculus(az, ang)
    sec = calc.g_bw(b, w)
    ns = null_sector(az, ang, b, w)
    p = _arc_midpoint_for_vertex(az, ang, ns.left)

    def integrate(path):
        from numpy.polynomial.legendre import leggauss

        n1, w1 = leggauss(24)
        n2, w2 = leggauss(48)

        def seg(a, bb, depth=0):
            mid, half = (a + bb) / 2, (bb - a) / 2

            def val(ns_, ws_):
                tot = 0j
                for t, wq in zip(ns_, ws_):
                    z = mid + half * t
                    tot += wq * sec.evaluate(z)
                return tot * half

            v1, v2 = val(n1, w1), val(n2, w2)
            if abs(v1 - v2) < 1e-12 * max(1.0, abs(v2)) or depth >= 14:
                return v2
            return seg(a, mid, depth + 1) + seg(mid, bb, depth + 1)

        return sum(seg(a, bb) for a, bb in zip(path, path[1:]))

    sz = 1.0 / np.conj(zeta)
    if abs(sz) <= 1.0:
        raise ValueError("zeta must lie inside the unit disk")
    # outer route: move radially out to a safe radius, detour along that
    # circle with chords that stay clear of the unit disk, then come back
    # radially to the crossing point p, and continue inside through 0
    Rout = max(abs(sz), 2.0)
    th0 = cmath.phase(sz)
    th1 = cmath.phase(p)
    dth = (th1 - th0 + math.pi) % (2 * math.pi) - math.pi
    steps = max(1, int(abs(dth) / 0.4) + 1)
    path = [sz, Rout * cmath.exp(1j * th0)]
    for k in range(1, steps + 1):
        path.append(Rout * cmath.exp(1j * (th0 + dth * k / steps)))
    path.append(p)
    path.append(zeta * 0.0)
    path.append(zeta)
    return integrate(path) / (2j * math.pi)


# ---------------------------------------------------------------------------
# the inverse formula


def _double_integral(calc: SectionCalculus, qb: RationalSection,
                     qw: RationalSection, keys_b: List[int],
                     keys_w: List[int], small: str,
                     ctx: Numeric = DOUBLE) -> complex:
    """Iterated residue evaluation of
        (2 pi i)^{-2} oint oint (eta - zeta)^{-1} Qw(eta) / Qb(zeta)
    with zeta on circles around keys_b, eta on circles around keys_w, and
    the `small` variable ('eta' or 'zeta') on the strictly smaller circles
    at common angles.
    """
    ang = calc.ang
    qbinv = qb.inverse()
    if small == "eta":
        # inner pass in eta: T(zeta) = sum Res_{eta=a'} Qw(eta)/(eta-zeta)
        #   = - sum_{a'} sum_{i>=0} q^{a'}_{-1-i} (zeta-a')^{-(i+1)}
        terms: List[Tuple[complex, int, complex]] = []
        for gi in keys_w:
            m = -qw.order_at(gi)
            if m <= 0:
                continue
            a = ang.group_value(gi)
            # Laurent coefficients of Qw at a: q_{-1-i} = H[m-1-i]
            H = qw.cofactor_taylor(gi, m, ctx)
            for i in range(m):
                coeff = -H[m - 1 - i]
                terms.append((a, i + 1, coeff))
        if not terms:
            return ctx.c(0), 0.0
        gross_in = sum(abs(c) for _a, _p, c in terms)
        val, gross = residues_at(qbinv, keys_b, ctx, extra_poles=terms,
                                 with_gross=True)
        return val, max(gross, gross_in)
    else:
        # inner pass in zeta: S(eta) = sum Res_{zeta=a} (eta-zeta)^{-1}/Qb
        #   = sum_a sum_j u^a_{-1-j} (eta-a)^{-(j+1)}
        terms = []
        for gi in keys_b:
            m = -qbinv.order_at(gi)  # pole order of 1/Qb at a
            if m <= 0:
                continue
            a = ang.group_value(gi)
            H = qbinv.cofactor_taylor(gi, m, ctx)
            for j in range(m):
                coeff = H[m - 1 - j]
                terms.append((a, j + 1, coeff))
        if not terms:
            return ctx.c(0), 0.0
        gross_in = sum(abs(c) for _a, _p, c in terms)
        val, gross = residues_at(qw, keys_w, ctx, extra_poles=terms,
                                 with_gross=True)
        return val, max(gross, gross_in)


def inverse_entry(az: AZGraph, ang: AngleAssignment, b: LiftedVertex,
                  w: LiftedVertex, variant: Optional[Tuple[int, str]] = None,
                  ctx: Numeric = DOUBLE,
                  calc: Optional[SectionCalculus] = None,
                  auto_hp: bool = True) -> complex:
    """One entry of the inverse Kasteleyn matrix by the exact formula.

    `variant` selects (convex corner, 'bw'|'wb'); the default picks a
    corner with black-to-white color change and x = b, making both sign
    prefactors +1.  All eight variants agree.

    The double integral and the whole-plane correction can be huge with a
    tiny sum (the entry decays with the distance between b and w while the
    terms grow); when `auto_hp` is set and such cancellation is detected
    in double precision, the entry is recomputed with enough mpmath digits
    to absorb it.
    """
    if calc is None:
        calc = SectionCalculus(az, ang)
    convex = az.convex_vertices()
    if variant is None:
        v = next(vv for vv, s in convex if s == 1)
        xy = "bw"
    else:
        v, xy = variant
    sign_v = next(s for vv, s in convex if vv == v)
    I_b = az.pole_interval(b, v)
    I_w = az.pole_interval(w, v)
    keys_b = calc.interval_groups(I_b)
    keys_w = calc.interval_groups(I_w)
    qb = calc.q_section(b)
    qw = calc.q_section(w)
    small = "eta" if xy == "bw" else "zeta"
    with ctx.workdps():
        D, gross = _double_integral(calc, qb, qw, keys_b, keys_w, small, ctx)
        if xy == "bw":
            I_x, I_y, eps = I_b, I_w, 1
        else:
            I_x, I_y, eps = I_w, I_b, -1
        corr = ctx.c(0)
        if I_y.contains_vertex(I_x.right):
            corr = corr + _whole_plane(calc, b, w, I_x.right, ctx)
        if I_y.contains_vertex(I_x.left):
            corr = corr - _whole_plane(calc, b, w, I_x.left, ctx)
        val = sign_v * (D - eps * corr)
    if auto_hp and ctx.dps is None:
        amplitude = max(gross, abs(D), abs(corr), 1.0)
        if amplitude > 1e2 * max(abs(val), 1e-300):
            import math as _math

            dps = 30 + int(_math.log10(amplitude))
            return inverse_entry(az, ang, b, w, variant, Numeric(dps), calc,
                                 auto_hp=False)
    return val


def _whole_plane(calc: SectionCalculus, b, w, u: int, ctx: Numeric) -> complex:
    az = calc.az
    sec = calc.g_bw(b, w)
    ns = null_sector(az, calc.ang, b, w)
    if ns.contains_vertex(u):
        return ctx.c(0)
    iv = IntervalOnN(u, ns.left, az.n_sides)
    keys = calc.interval_groups(iv)
    return residues_at(sec, keys, ctx)


def inverse_matrix(az: AZGraph, ang: AngleAssignment,
                   variant: Optional[Tuple[int, str]] = None,
                   ctx: Numeric = DOUBLE) -> np.ndarray:
    """B x W matrix of inverse entries (rows blacks, columns whites)."""
    calc = SectionCalculus(az, ang)
    out = np.zeros((len(az.blacks), len(az.whites)), dtype=complex)
    for i, b in enumerate(az.blacks):
        for j, w in enumerate(az.whites):
            out[i, j] = ctx.to_complex(
                inverse_entry(az, ang, b, w, variant, ctx, calc)
            )
    return out


def verify_inverse(K: np.ndarray, Kinv: np.ndarray) -> Tuple[float, float]:
    """Max-norm defects of K Kinv - I and Kinv K - I."""
    n = K.shape[0]
    d1 = np.abs(K @ Kinv - np.eye(n)).max()
    d2 = np.abs(Kinv @ K - np.eye(n)).max()
    return float(d1), float(d2)


def lu_inverse(K: np.ndarray) -> np.ndarray:
    return np.linalg.inv(K)


# ---------------------------------------------------------------------------
# quadrature cross-check for the double integral


def inverse_entry_quadrature(az: AZGraph, ang: AngleAssignment,
                             b: LiftedVertex, w: LiftedVertex,
                             nodes: int = 512) -> complex:
    """Numerical contour evaluation of the same formula: trapezoid rule over
    explicit circles, outer radii a third of the minimal angle gap and
    inner radii a sixth, so circles around distinct angles stay separated.
    Independent of the residue engine."""
    calc = SectionCalculus(az, ang)
    convex = az.convex_vertices()
    v = next(vv for vv, s in convex if s == 1)
    I_b = az.pole_interval(b, v)
    I_w = az.pole_interval(w, v)
    keys_b = calc.interval_groups(I_b)
    keys_w = calc.interval_groups(I_w)
    qb = calc.q_section(b)
    qw = calc.q_section(w)
    vals = [ang.group_value(gi) for gi in range(ang.n_groups())]
    gap = min(
        abs(vals[i] - vals[j])
        for i in range(len(vals))
        for j in range(i + 1, len(vals))
    ) if len(vals) > 1 else 1.0
    r_out, r_in = gap / 3, gap / 6

    def circle(a, r):
        return [
            (a + r * cmath.exp(2j * math.pi * k / nodes),
             r * cmath.exp(2j * math.pi * k / nodes) * 2j * math.pi / nodes)
            for k in range(nodes)
        ]

    total = 0j
    for gb in keys_b:
        for gw in keys_w:
            ab, aw = ang.group_value(gb), ang.group_value(gw)
            rb = r_out
            rw = r_in if gw in keys_b else r_out
            for zeta, dz in circle(ab, rb):
                sb = 1.0 / qb.evaluate(zeta)
                for eta, de in circle(aw, rw):
                    total += (
                        sb * qw.evaluate(eta) / (eta - zeta) * dz * de
                    )
    D = total / (2j * math.pi) ** 2
    corr = 0j
    if I_w.contains_vertex(I_b.right):
        corr += _whole_plane(calc, b, w, I_b.right, DOUBLE)
    if I_w.contains_vertex(I_b.left):
        corr -= _whole_plane(calc, b, w, I_b.left, DOUBLE)
    return D - corr


# ---------------------------------------------------------------------------
# probabilities and enumeration


def edge_probabilities(az: AZGraph, ang: AngleAssignment,
                       edges: Sequence, Kinv: Optional[np.ndarray] = None,
                       tol: float = 1e-9) -> float:
    """Probability that the given (distinct) edges all occur, by the
    determinantal formula."""
    wi = {v: i for i, v in enumerate(az.whites)}
    bi = {v: i for i, v in enumerate(az.blacks)}
    K = kasteleyn_matrix(az, ang)
    if Kinv is None:
        Kinv = inverse_matrix(az, ang)
    k = len(edges)
    M = np.zeros((k, k), dtype=complex)
    pref = 1.0 + 0j
    pairs = []
    for le in edges:
        vw, vb = az.edge_pair(le)
        pairs.append((vb, vw))
        pref *= K[wi[vw], bi[vb]]
    for i, (vb_i, vw_i) in enumerate(pairs):
        for j, (_vb_j, vw_j) in enumerate(pairs):
            M[i, j] = Kinv[bi[vb_i], wi[vw_j]]
    val = pref * np.linalg.det(M)
    if abs(val.imag) > tol:
        raise ComplexResidual(f"probability has imaginary part {val.imag}")
    return min(1.0, max(0.0, float(val.real)))


def enumerate_matchings(az: AZGraph, ang: Optional[AngleAssignment] = None,
                        max_vertices: int = 34):
    """Brute-force dimer covers: returns (count, Z, per-edge marginals).

    Z uses the modulus of the Kasteleyn entries as edge weights when an
    angle assignment is given, else weight one per edge.
    """
    nv = len(az.whites) + len(az.blacks)
    if nv > max_vertices:
        raise TooLarge(f"{nv} vertices exceeds the enumeration limit")
    wlist = az.whites
    adj: Dict[LiftedVertex, List[Tuple[int, LiftedVertex, float]]] = {
        w: [] for w in wlist
    }
    weights = []
    for k, le in enumerate(az.edges):
        vw, vb = az.edge_pair(le)
        if ang is not None:
            (sa, _), (sb, _) = az.edge_strand_pair(le)
            wt = abs(ang.angle(sb) - ang.angle(sa))
        else:
            wt = 1.0
        weights.append(wt)
        adj[vw].append((k, vb, wt))
    covers: List[Tuple[Tuple[int, ...], float]] = []

    def rec(i: int, used_b: frozenset, chosen: Tuple[int, ...], wt: float):
        if i == len(wlist):
            covers.append((chosen, wt))
            return
        for (k, vb, ew) in adj[wlist[i]]:
            if vb not in used_b:
                rec(i + 1, used_b | {vb}, chosen + (k,), wt * ew)

    rec(0, frozenset(), (), 1.0)
    Z = sum(wt for _, wt in covers)
    marg = [0.0] * len(az.edges)
    if Z > 0:
        for chosen, wt in covers:
            for k in chosen:
                marg[k] += wt / Z
    return len(covers), Z, marg
