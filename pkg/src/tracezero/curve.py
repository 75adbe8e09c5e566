"""Long-Weierstrass curves over Q and F_p, their group law, and reduction.

Points are ``None`` for the identity or an ``(x, y)`` tuple: ``Fraction``
coordinates over Q, ``int`` residues in ``[0, p)`` over F_p. The model

    y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6

is used throughout, including at p = 2 and p = 3.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Tuple, Union

from .arith import MAX_MODULUS, mod_inv, mod_sqrt
from .errors import BadReduction, PointNotOnCurve, SingularCurve

RationalPoint = Optional[Tuple[Fraction, Fraction]]
FpPoint = Optional[Tuple[int, int]]
O = None  # the identity, for readability at call sites


def b_invariants(a1, a2, a3, a4, a6):
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _discriminant(b2, b4, b6, b8):
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class RationalCurve:
    """Integral long-Weierstrass model over Q."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an integer, got {value!r}")
        b2, b4, b6, b8 = self.b_invariants
        if 4 * b8 != b2 * b6 - b4 * b4:
            raise AssertionError("b-invariant relation violated")
        if self.discriminant == 0:
            raise SingularCurve(f"discriminant of {self.coefficients} is zero")

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self):
        return b_invariants(*self.coefficients)

    @property
    def c4(self) -> int:
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @property
    def discriminant(self) -> int:
        return _discriminant(*self.b_invariants)

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4**3, self.discriminant)

    def contains(self, pt: RationalPoint) -> bool:
        if pt is None:
            return True
        a1, a2, a3, a4, a6 = self.coefficients
        x, y = pt
        return y * y + a1 * x * y + a3 * y == x**3 + a2 * x * x + a4 * x + a6

    def point(self, x, y) -> RationalPoint:
        pt = (Fraction(x), Fraction(y))
        if not self.contains(pt):
            raise PointNotOnCurve(f"{pt} is not on {self.coefficients}")
        return pt

    def neg(self, pt: RationalPoint) -> RationalPoint:
        if pt is None:
            return None
        x, y = pt
        return (x, -y - self.a1 * x - self.a3)

    def add(self, P: RationalPoint, Q: RationalPoint) -> RationalPoint:
        if P is None:
            return Q
        if Q is None:
            return P
        a1, a2, a3, a4, _ = self.coefficients
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if y1 + y2 + a1 * x2 + a3 == 0:
                return None
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(y1 + lam * (x3 - x1)) - a1 * x3 - a3
        return (x3, y3)

    def mul(self, n: int, pt: RationalPoint) -> RationalPoint:
        return _double_and_add(self, n, pt)

    def combination(self, coeffs, points) -> RationalPoint:
        acc = None
        for c, pt in zip(coeffs, points):
            acc = self.add(acc, self.mul(c, pt))
        return acc


@dataclass(frozen=True)
class FpCurve:
    """Reduction of a long-Weierstrass model modulo a prime of good reduction."""

    p: int
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    _b: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = self.p
        if p < 2 or p > MAX_MODULUS:
            raise ValueError(f"modulus {p} outside [2, 2**62]")
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, getattr(self, name) % p)
        b = b_invariants(*self.coefficients)
        object.__setattr__(self, "_b", tuple(v % p for v in b))
        if _discriminant(*b) % p == 0:
            raise BadReduction(p)

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def hasse_interval(self) -> tuple[int, int]:
        w = math.isqrt(4 * self.p)
        return self.p + 1 - w, self.p + 1 + w

    def contains(self, pt: FpPoint) -> bool:
        if pt is None:
            return True
        p = self.p
        x, y = pt
        if not (0 <= x < p and 0 <= y < p):
            return False
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = ((x + self.a2) * x + self.a4) * x + self.a6
        return (lhs - rhs) % p == 0

    def neg(self, pt: FpPoint) -> FpPoint:
        if pt is None:
            return None
        x, y = pt
        return (x, (-y - self.a1 * x - self.a3) % self.p)

    def add(self, P: FpPoint, Q: FpPoint) -> FpPoint:
        if P is None:
            return Q
        if Q is None:
            return P
        p, a1, a3 = self.p, self.a1, self.a3
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            den = (y1 + y2 + a1 * x2 + a3) % p
            if den == 0:
                return None
            # y2 == y1 here, so den == 2*y1 + a1*x1 + a3
            lam = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - a1 * y1) * pow(den, -1, p) % p
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (lam * lam + a1 * lam - self.a2 - x1 - x2) % p
        y3 = (-(y1 + lam * (x3 - x1)) - a1 * x3 - a3) % p
        return (x3, y3)

    def sub(self, P: FpPoint, Q: FpPoint) -> FpPoint:
        return self.add(P, self.neg(Q))

    def mul(self, n: int, pt: FpPoint) -> FpPoint:
        return _double_and_add(self, n, pt)

    def combination(self, coeffs, points) -> FpPoint:
        acc = None
        for c, pt in zip(coeffs, points):
            acc = self.add(acc, self.mul(c, pt))
        return acc

    def _y_roots(self, x: int) -> list[int]:
        """All y with (x, y) on the curve, ascending."""
        p = self.p
        if p == 2:
            return [y for y in range(p) if self.contains((x, y))]
        b2, b4, b6, _ = self._b
        # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
        disc = (((4 * x + b2) * x + 2 * b4) * x + b6) % p
        r = mod_sqrt(disc, p)
        if r is None:
            return []
        inv2 = (p + 1) // 2
        shift = self.a1 * x + self.a3
        return sorted({(r - shift) * inv2 % p, (-r - shift) * inv2 % p})

    def affine_points(self) -> Iterator[tuple[int, int]]:
        """Exhaustive enumeration in (x, y) order; only sensible for small p."""
        for x in range(self.p):
            for y in self._y_roots(x):
                yield (x, y)

    def points(self) -> list[FpPoint]:
        return [None, *self.affine_points()]

    def random_point(self, rng: random.Random) -> tuple[int, int]:
        """A random affine point; deterministic given the state of ``rng``."""
        p = self.p
        if p <= 3:
            pts = list(self.affine_points())
            if not pts:
                raise ValueError(f"no affine points over F_{p}")
            return pts[rng.randrange(len(pts))]
        while True:
            x = rng.randrange(p)
            ys = self._y_roots(x)
            if ys:
                return (x, ys[rng.randrange(len(ys))])

    def quadratic_twist(self) -> "FpCurve":
        """A quadratic twist by the least non-residue (odd p only)."""
        p = self.p
        if p == 2:
            raise ValueError("quadratic twist is only built for odd p")
        d = 2
        while pow(d, (p - 1) // 2, p) != p - 1:
            d += 1
        b2, b4, b6, _ = self._b
        # d*Y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6, rescaled to a monic model
        return FpCurve(p, 0, b2 * d, 0, 8 * b4 * d * d, 16 * b6 * d**3)


Curve = Union[RationalCurve, FpCurve]


def _double_and_add(curve, n: int, pt):
    if n < 0:
        return _double_and_add(curve, -n, curve.neg(pt))
    acc = None
    addend = pt
    while n:
        if n & 1:
            acc = curve.add(acc, addend)
        n >>= 1
        if n:
            addend = curve.add(addend, addend)
    return acc


def scalar_mul(n: int, pt, curve: Curve):
    return curve.mul(n, pt)


def discriminant_and_j(curve: RationalCurve) -> tuple[int, Fraction]:
    return curve.discriminant, curve.j_invariant


def reduce_curve(curve: RationalCurve, p: int) -> FpCurve:
    if curve.discriminant % p == 0:
        raise BadReduction(p, curve.discriminant)
    return FpCurve(p, *curve.coefficients)


def reduce_point(pt: RationalPoint, p: int) -> FpPoint:
    """Reduce via coprime projective coordinates (X : Y : Z).

    A point whose denominator is divisible by ``p`` reduces to the identity.
    """
    if pt is None:
        return None
    x, y = Fraction(pt[0]), Fraction(pt[1])
    z = math.lcm(x.denominator, y.denominator)
    X, Y = x.numerator * (z // x.denominator), y.numerator * (z // y.denominator)
    g = math.gcd(math.gcd(X, Y), z)
    X, Y, z = X // g, Y // g, z // g
    if z % p == 0:
        return None
    zi = mod_inv(z, p)
    return (X * zi % p, Y * zi % p)


def random_point(curve: FpCurve, seed) -> tuple[int, int]:
    return curve.random_point(random.Random(seed))


def height(pt: RationalPoint) -> int:
    """Naive coordinate height: largest |numerator| or denominator."""
    if pt is None:
        return 0
    return max(max(abs(c.numerator), c.denominator) for c in pt)
