"""Upper half-plane primitives: points, Mobius action, point-pair invariant.

Everything here is an immutable value and every operation is pure, so the
types can be shared freely between worker threads or processes.

Coordinates may be floats or exact rationals (int / Fraction).  Exact
coordinates propagate through the Mobius action and the invariant
u(z,w) = |z-w|^2 / (4 Im z Im w), which is what the exact orbit
enumerator in :mod:`hcircle.modular_group` relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import ValidationError

__all__ = [
    "Point",
    "GroupElement",
    "apply",
    "point_pair_invariant",
    "distance",
]


def _is_exact(value) -> bool:
    return isinstance(value, Rational)


@dataclass(frozen=True)
class Point:
    """A point x + iy of the upper half-plane (y > 0 enforced)."""

    x: object
    y: object

    def __post_init__(self):
        if not self.y > 0:
            raise ValidationError(f"point {self.x} + {self.y}i is not in the upper half-plane")

    @property
    def exact(self) -> bool:
        return _is_exact(self.x) and _is_exact(self.y)

    def as_complex(self) -> complex:
        return complex(self.x) + 1j * complex(self.y)

    @staticmethod
    def of(x, y) -> "Point":
        """Point with int inputs promoted to Fraction so they stay exact."""
        if isinstance(x, Rational) and not isinstance(x, Fraction):
            x = Fraction(x)
        if isinstance(y, Rational) and not isinstance(y, Fraction):
            y = Fraction(y)
        return Point(x, y)


I_POINT = Point(Fraction(0), Fraction(1))


def _canonical_entries(a, b, c, d):
    # PSL sign: keep the representative with a > 0, or a = 0 and c > 0.
    if a < 0 or (a == 0 and c < 0):
        return -a, -b, -c, -d
    return a, b, c, d


@dataclass(frozen=True)
class GroupElement:
    """Determinant-one 2x2 matrix modulo sign.

    Exact (integer/rational) entries give the arithmetic representation
    with det == 1 exactly; float entries give the generic representation
    with det == 1 to 1e-12.  The stored sign is canonical (a > 0, or
    a == 0 and c > 0), which makes equality and dedup meaningful.
    """

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        a, b, c, d = _canonical_entries(self.a, self.b, self.c, self.d)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        det = a * d - b * c
        if self.exact:
            if det != 1:
                raise ValidationError(f"matrix {self.entries} has determinant {det} != 1")
        elif abs(det - 1.0) > 1e-12:
            raise ValidationError(f"matrix {self.entries} has determinant {det} != 1 beyond 1e-12")

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def exact(self) -> bool:
        return all(_is_exact(e) for e in self.entries)

    @property
    def trace(self):
        return self.a + self.d

    @staticmethod
    def identity() -> "GroupElement":
        return GroupElement(1, 0, 0, 1)

    @staticmethod
    def floating(a, b, c, d) -> "GroupElement":
        """Generic representation: renormalize det to 1 before storing."""
        det = a * d - b * c
        if not det > 0:
            raise ValidationError(f"float matrix with nonpositive determinant {det}")
        s = math.sqrt(det)
        return GroupElement(a / s, b / s, c / s, d / s)

    def compose(self, other: "GroupElement") -> "GroupElement":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        if self.exact and other.exact:
            return GroupElement(a, b, c, d)
        # float composition drifts; renormalize so long products stay usable
        return GroupElement.floating(a, b, c, d)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return self.compose(other)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def apply(self, z: Point) -> Point:
        return apply(self, z)


def apply(g: GroupElement, z: Point) -> Point:
    """Mobius action z -> (az+b)/(cz+d); stays in H since Im = y/|cz+d|^2."""
    a, b, c, d = g.entries
    x, y = z.x, z.y
    re_den = c * x + d
    q = re_den * re_den + (c * y) * (c * y)
    num_re = (a * x + b) * re_den + a * c * y * y
    det = a * d - b * c  # 1 exactly in the arithmetic representation
    return Point(num_re / q, det * y / q)


def point_pair_invariant(z: Point, w: Point):
    """u(z,w) = |z-w|^2 / (4 Im z Im w); Mobius invariant, 0 iff z == w."""
    dx = z.x - w.x
    dy = z.y - w.y
    return (dx * dx + dy * dy) / (4 * z.y * w.y)


def distance(z: Point, w: Point) -> float:
    """Hyperbolic distance via cosh(rho) = 2u + 1.

    Uses rho = 2*asinh(sqrt(u)), which is accurate both for nearby
    points (where acosh(1+2u) loses digits) and for large separations.
    """
    u = point_pair_invariant(z, w)
    return 2.0 * math.asinh(math.sqrt(float(u)))
