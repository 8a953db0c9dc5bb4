"""PSL(2,Z) group model and orbit-ball enumeration.

The central object is the hyperbolic ball

    {gamma in PSL(2,Z) : 4 u(gamma z, w) + 2 <= X},

whose cardinality is the lattice-point count N(z,w,X).  Enumeration
iterates coprime bottom rows (c,d) over the finite rectangle forced by
Im(gamma z) = Im z / |cz+d|^2 together with the threshold, and for each
row solves the quadratic membership inequality in the shear parameter t
of the solution family (a,b) = (a0,b0) + t(c,d) in closed form.  No
heuristic is involved: the rectangle bound is a necessary condition and
the per-row window is exact.

When z, w and X are all rational the membership test clears
denominators and runs in exact integer arithmetic, so the boundary
4u + 2 = X is decided exactly (and included, matching the defining
inequality).  Otherwise a documented relative tolerance of 1e-9 on the
4u+2 value is applied, and the throughput kernels in
:mod:`hcircle._fastcount` do the scanning.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from . import _fastcount
from .errors import (
    BudgetExceededError,
    DedupCollisionError,
    ValidationError,
)
from .geometry import GroupElement, Point, apply, distance, point_pair_invariant

__all__ = [
    "T_GEN",
    "S_GEN",
    "FundamentalDomainPoint",
    "OrbitBall",
    "GroupPresentation",
    "GenericBall",
    "reduce_to_fundamental_domain",
    "enumerate_ball_arithmetic",
    "count",
    "enumerate_ball_generic",
    "write_ball_csv",
    "four_u_plus_two",
]

T_GEN = GroupElement(1, 1, 0, 1)
S_GEN = GroupElement(0, -1, 1, 0)

#: boundary tolerance for the floating membership test, relative to X
FLOAT_BOUNDARY_RTOL = 1e-9


@dataclass(frozen=True)
class FundamentalDomainPoint:
    """A reduced point together with the gamma that moved the input onto it."""

    z: Point
    reducer: GroupElement


@dataclass(frozen=True)
class OrbitBall:
    """Complete, duplicate-free, lexicographically ordered orbit ball."""

    z: Point
    w: Point
    threshold: object
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def u_values(self):
        return [point_pair_invariant(apply(g, self.z), self.w) for g in self.elements]


def four_u_plus_two(g: GroupElement, z: Point, w: Point):
    """The ball functional 4 u(gz, w) + 2 = 2 cosh rho(gz, w)."""
    return 4 * point_pair_invariant(apply(g, z), w) + 2


# ----------------------------------------------------------------------
# fundamental domain
# ----------------------------------------------------------------------

def reduce_to_fundamental_domain(z: Point, max_iter: int = 10_000) -> FundamentalDomainPoint:
    """Move z into the standard domain |x| <= 1/2, x^2 + y^2 >= 1.

    Alternates integer translations with inversions z -> -1/z, tracking
    the composed reducer exactly (integer matrix).  Raises if the
    iteration cap is hit, which only happens for pathological floating
    input essentially on the real axis.
    """
    x, y = z.x, z.y
    red = GroupElement.identity()
    exact = z.exact
    for _ in range(max_iter):
        n = math.floor(x + Fraction(1, 2)) if exact else math.floor(x + 0.5)
        if n != 0:
            x = x - n
            red = GroupElement(1, -n, 0, 1) @ red
        norm = x * x + y * y
        if (exact and norm < 1) or (not exact and norm < 1.0 - 1e-15):
            x, y = -x / norm, y / norm
            red = S_GEN @ red
        else:
            return FundamentalDomainPoint(Point(x, y), red)
    raise ValidationError(f"fundamental-domain reduction did not terminate for {z}")


# ----------------------------------------------------------------------
# exact integer scan
# ----------------------------------------------------------------------

def _ext_gcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _scaled_point(p: Point):
    """(X_num, Y_num, den) with p = (X_num + i Y_num)/den, den > 0."""
    x, y = Fraction(p.x), Fraction(p.y)
    den = math.lcm(x.denominator, y.denominator)
    return int(x * den), int(y * den), den


def _exact_scan(z: Point, w: Point, x_thresh, collect: bool):
    """Exact rational scan; returns element list or a bare count."""
    zx, zy, dz = _scaled_point(z)
    wx, wy, dw = _scaled_point(w)
    xq = Fraction(x_thresh)
    xn, xd = xq.numerator, xq.denominator

    found = [] if collect else 0
    if xq < 2:
        return found
    rr = (xn - 2 * xd) * zy * wy * dz * dw  # RHS of the cleared inequality

    xthr = float(xq)
    eta_plus = 1.0 if xthr <= 2.0 else 0.5 * (xthr + math.sqrt(xthr * xthr - 4.0))
    xf = zx / dz
    yf = zy / dz
    vf = wy / dw
    qmax = (yf / vf) * eta_plus * (1.0 + 1e-9) + 1e-9
    cmax = int(math.sqrt(qmax) / yf) + 2

    for c in range(0, cmax + 1):
        if c == 0:
            d_candidates = (1,)
        else:
            rad2 = qmax - (c * yf) * (c * yf)
            if rad2 < 0.0:
                break
            rad = math.sqrt(rad2) + 1.0
            d_candidates = range(math.ceil(-c * xf - rad), math.floor(-c * xf + rad) + 1)
        for d in d_candidates:
            if c and math.gcd(c, d) != 1:
                continue
            g, p, q = _ext_gcd(d, c)
            a0, b0 = p, -q
            row_re = c * zx + d * dz
            row_im = c * zy
            hre = dw * row_re
            him = dw * row_im
            gre = a0 * zx * dw + b0 * dz * dw - (wx * row_re - wy * row_im)
            gim = a0 * zy * dw - (wx * row_im + wy * row_re)
            a2 = xd * (hre * hre + him * him)
            a1 = 2 * xd * (gre * hre + gim * him)
            a0c = xd * (gre * gre + gim * gim) - rr
            disc = a1 * a1 - 4 * a2 * a0c
            if disc < 0:
                continue
            s = math.isqrt(disc)
            two_a2 = 2 * a2
            thi = (-a1 + s) // two_a2
            if (a2 * (thi + 1) + a1) * (thi + 1) + a0c <= 0:
                thi += 1
            tlo = -((a1 + s) // two_a2)
            if (a2 * (tlo - 1) + a1) * (tlo - 1) + a0c <= 0:
                tlo -= 1
            if thi < tlo:
                continue
            if collect:
                for t in range(tlo, thi + 1):
                    found.append(GroupElement(a0 + t * c, b0 + t * d, c, d))
            else:
                found += thi - tlo + 1
    return found


def _is_exact_request(z: Point, w: Point, x_thresh) -> bool:
    return z.exact and w.exact and isinstance(x_thresh, Rational)


def enumerate_ball_arithmetic(z: Point, w: Point, x_thresh) -> OrbitBall:
    """All gamma with 4 u(gamma z, w) + 2 <= X, boundary included.

    Rational z, w, X run fully exact; floating input uses the 1e-9
    relative boundary tolerance.  Output order is lexicographic on the
    canonical matrix entries so serial and parallel runs agree.
    """
    if _is_exact_request(z, w, x_thresh):
        elems = _exact_scan(z, w, x_thresh, collect=True)
    else:
        mats, _ = _fastcount.ball_matrices(
            float(z.x), float(z.y), float(w.x), float(w.y),
            float(x_thresh), FLOAT_BOUNDARY_RTOL,
        )
        elems = [GroupElement(int(a), int(b), int(c), int(d)) for a, b, c, d in mats]
    elems.sort(key=lambda g: g.entries)
    return OrbitBall(z, w, x_thresh, tuple(elems))


def count(z: Point, w: Point, x_thresh) -> int:
    """N(z,w,X) as a streaming count (elements never materialized)."""
    if _is_exact_request(z, w, x_thresh):
        return _exact_scan(z, w, x_thresh, collect=False)
    return int(_fastcount.count_ball(
        float(z.x), float(z.y), float(w.x), float(w.y),
        float(x_thresh), FLOAT_BOUNDARY_RTOL,
    ))


def write_ball_csv(ball: OrbitBall, path) -> None:
    """Dump a ball as CSV: a,b,c,d,u_value,four_u_plus_two (header row)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "c", "d", "u_value", "four_u_plus_two"])
        for g in ball.elements:
            u = point_pair_invariant(apply(g, ball.z), ball.w)
            writer.writerow([g.a, g.b, g.c, g.d, repr(float(u)), repr(float(4 * u + 2))])


# ----------------------------------------------------------------------
# generic groups: pruned word search
# ----------------------------------------------------------------------

#: entry distance at or below which two floating matrices are one element
_DEDUP_NOISE = 1e-9
#: documented dedup tolerance; distances in (noise, tol] are ambiguous
_DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class GroupPresentation:
    """Generator list (floating matrices) for a discrete group.

    The list must be inverse-closed; ``slack`` is the extra search
    radius C added to the requested ball radius.  The word search keeps
    every element with rho(gamma z0, z0) <= R + C, so completeness of
    the returned radius-R ball is guaranteed only when C exceeds the
    group's quasi-isometry defect at that scale.  The frontier and
    pruning counts in the result are there to let a caller detect
    truncation: a nonempty pruned set together with an empty (R, R+C]
    band is evidence the slack sufficed.
    """

    generators: tuple = ()
    slack: float = 3.0

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if not isinstance(g, GroupElement):
                raise ValidationError("generators must be GroupElement instances")
            inv = g.inverse()
            if not any(_mat_dist(inv, h) <= _DEDUP_TOL for h in gens):
                raise ValidationError(f"generator list is not inverse-closed: missing {inv.entries}")


@dataclass(frozen=True)
class GenericBall:
    """Word-search result with truncation diagnostics."""

    z0: Point
    radius: float
    slack: float
    elements: tuple
    band_count: int
    pruned_count: int

    def __len__(self):
        return len(self.elements)


def _mat_dist(g: GroupElement, h: GroupElement) -> float:
    ga, gb, gc, gd = (float(e) for e in g.entries)
    ha, hb, hc, hd = (float(e) for e in h.entries)
    plus = max(abs(ga - ha), abs(gb - hb), abs(gc - hc), abs(gd - hd))
    minus = max(abs(ga + ha), abs(gb + hb), abs(gc + hc), abs(gd + hd))
    return min(plus, minus)


class _FloatDedup:
    """Grid-bucketed nearest-entry lookup under the PSL sign quotient."""

    def __init__(self):
        self.buckets = {}

    def _key(self, g):
        return tuple(math.floor(float(e) / _DEDUP_TOL) for e in g.entries)

    def probe(self, g: GroupElement) -> bool:
        """True if g is already present; raises on ambiguous distance."""
        ka, kb, kc, kd = self._key(g)
        best = math.inf
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    for dd in (-1, 0, 1):
                        for h in self.buckets.get((ka + da, kb + db, kc + dc, kd + dd), ()):
                            best = min(best, _mat_dist(g, h))
        if best <= _DEDUP_NOISE:
            return True
        if best <= _DEDUP_TOL:
            raise DedupCollisionError(
                f"two group elements within {best:.2e} of each other: dedup tolerance unsound"
            )
        self.buckets.setdefault((ka, kb, kc, kd), []).append(g)
        return False


def enumerate_ball_generic(
    presentation: GroupPresentation,
    z0: Point,
    radius: float,
    max_elements: int = 200_000,
) -> GenericBall:
    """Breadth-first word search for {gamma : rho(gamma z0, z0) <= R}.

    Explores out to R + slack and reports how much of that shell was
    populated (band_count) and how many expansions were pruned
    (pruned_count).
    """
    slack = presentation.slack
    keep_limit = radius + slack + 1e-9
    dedup = _FloatDedup()
    identity = GroupElement(1.0, 0.0, 0.0, 1.0)
    dedup.probe(identity)
    accepted = [(identity, 0.0)]
    queue = deque([identity])
    pruned = 0
    while queue:
        g = queue.popleft()
        for gen in presentation.generators:
            m = g @ gen
            rho = distance(apply(m, z0), z0)
            if rho > keep_limit:
                pruned += 1
                continue
            if dedup.probe(m):
                continue
            if len(accepted) >= max_elements:
                raise BudgetExceededError(
                    f"generic ball search exceeded {max_elements} elements at radius {radius}+{slack}"
                )
            accepted.append((m, rho))
            queue.append(m)
    inside = [g for g, rho in accepted if rho <= radius + 1e-9]
    band = sum(1 for _, rho in accepted if rho > radius + 1e-9)
    inside.sort(key=lambda g: tuple(float(e) for e in g.entries))
    return GenericBall(z0, radius, slack, tuple(inside), band, pruned)
