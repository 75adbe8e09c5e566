"""Finite group structure of E(F_p).

E(F_p) is isomorphic to Z/n1 x Z/n2 with n1 | n2. :func:`structure` finds
generators G1, G2 of orders n1, n2 and certifies them with the Weil pairing;
:func:`coordinates` then writes any point as c1*G1 + c2*G2.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import product
from typing import Callable, NamedTuple, Optional

from .arith import factor_product, factorize, crt
from .curve import FpCurve, FpPoint
from .errors import (
    AmbiguousOrder,
    DegenerateEvaluation,
    GeneratorSearchExhausted,
    InternalInconsistency,
)

#: Below this prime the group order is counted point by point.
ENUMERATION_LIMIT = 229
_ORDER_ROUNDS = 64
_PAIRING_RETRIES = 64


def curve_rng(curve: FpCurve, seed=0, tag: str = "") -> random.Random:
    """Reproducible RNG keyed by (curve, p, seed)."""
    return random.Random(f"{tag}|{seed}|{curve.p}|{curve.coefficients}")


# -- generic cyclic-group discrete logs ---------------------------------------


class _Ops(NamedTuple):
    op: Callable
    pow: Callable  # pow(k, x) -> x^k, k may be negative
    identity: object


def _curve_ops(curve: FpCurve) -> _Ops:
    return _Ops(curve.add, curve.mul, None)


def _field_ops(p: int) -> _Ops:
    return _Ops(lambda a, b: a * b % p, lambda k, a: pow(a, k, p), 1)


def _bsgs(ops: _Ops, g, h, n: int) -> Optional[int]:
    """The x in [0, n) with g^x = h, for g of order n."""
    s = math.isqrt(n - 1) + 1 if n > 1 else 1
    baby = {}
    cur = ops.identity
    for j in range(s):
        baby.setdefault(cur, j)
        cur = ops.op(cur, g)
    giant = ops.pow(-s, g)
    cur = h
    for i in range(s + 1):
        j = baby.get(cur)
        if j is not None:
            x = i * s + j
            if x < n:
                return x
        cur = ops.op(cur, giant)
    return None


def _pohlig_hellman(ops: _Ops, g, h, m: int, fact) -> Optional[int]:
    residues, moduli = [], []
    for ell, e in fact:
        pe = ell**e
        g_l = ops.pow(m // pe, g)
        h_l = ops.pow(m // pe, h)
        gamma = ops.pow(ell ** (e - 1), g_l)
        x = 0
        for k in range(e):
            hk = ops.pow(ell ** (e - 1 - k), ops.op(h_l, ops.pow(-x, g_l)))
            d = _bsgs(ops, gamma, hk, ell)
            if d is None:
                return None
            x += d * ell**k
        residues.append(x)
        moduli.append(pe)
    c = crt(residues, moduli) if moduli else 0
    return c if ops.pow(c, g) == h else None


def discrete_log(curve: FpCurve, base: FpPoint, target: FpPoint, m: int, m_fact=None) -> Optional[int]:
    """The unique c in [0, m) with c*base == target, or None if target is not in <base>.

    ``m`` must be the exact order of ``base``.
    """
    if m_fact is None:
        m_fact = factorize(m)
    return _pohlig_hellman(_curve_ops(curve), base, target, m, m_fact)


def field_log(p: int, zeta: int, w: int, m: int, m_fact=None) -> Optional[int]:
    """Discrete log of ``w`` to base ``zeta`` (of order ``m``) in F_p^*."""
    if m_fact is None:
        m_fact = factorize(m)
    return _pohlig_hellman(_field_ops(p), zeta % p, w % p, m, m_fact)


def multiplicative_order(x: int, p: int, m: int, m_fact=None) -> int:
    """Exact order of x in F_p^*, given that x^m == 1."""
    if m_fact is None:
        m_fact = factorize(m)
    if pow(x, m, p) != 1:
        raise ValueError(f"{x}^{m} != 1 mod {p}")
    for ell, e in m_fact:
        for _ in range(e):
            if pow(x, m // ell, p) == 1:
                m //= ell
            else:
                break
    return m


# -- orders ---------------------------------------------------------------------


def point_order(curve: FpCurve, Q: FpPoint, n_fact) -> int:
    """Exact order of Q, given a factorization of a multiple of it."""
    m = factor_product(n_fact)
    if curve.mul(m, Q) is not None:
        raise ValueError("factorization does not annihilate the point")
    for ell, e in n_fact:
        for _ in range(e):
            if curve.mul(m // ell, Q) is None:
                m //= ell
            else:
                break
    return m


def count_points(curve: FpCurve) -> int:
    """#E(F_p) by enumerating x and solving the quadratic in y."""
    return 1 + sum(len(curve._y_roots(x)) for x in range(curve.p))


def _annihilator_in(curve: FpCurve, Q: FpPoint, lo: int, hi: int) -> int:
    """Some k >= lo with k*Q == O, searched by baby-step giant-step over [lo, hi]."""
    s = math.isqrt(hi - lo) + 1
    baby = {}
    cur = None
    for j in range(s):
        baby.setdefault(cur, j)
        cur = curve.add(cur, Q)
    step = curve.neg(cur)  # -s*Q
    giant = curve.neg(curve.mul(lo, Q))
    i = 0
    while lo + i * s <= hi:
        j = baby.get(giant)
        if j is not None:
            return lo + i * s + j
        giant = curve.add(giant, step)
        i += 1
    raise AmbiguousOrder(f"no multiple of the point order in [{lo}, {hi}]")


def group_order(curve: FpCurve, seed=0) -> int:
    """#E(F_p).

    Enumeration up to p = 229; above that, orders of random points on the
    curve and on its quadratic twist are combined until exactly one N in the
    Hasse interval is consistent with both (#E + #E' = 2p + 2).
    """
    p = curve.p
    if p <= ENUMERATION_LIMIT:
        return count_points(curve)
    lo, hi = curve.hasse_interval
    twist = curve.quadratic_twist()
    rng = curve_rng(curve, seed, "order")
    lcm_e = lcm_t = 1
    for _ in range(_ORDER_ROUNDS):
        for E, is_twist in ((curve, False), (twist, True)):
            Q = E.random_point(rng)
            k = _annihilator_in(E, Q, lo, hi)
            m = point_order(E, Q, factorize(k))
            if is_twist:
                lcm_t = math.lcm(lcm_t, m)
            else:
                lcm_e = math.lcm(lcm_e, m)
            if (hi - lo) // lcm_e > 4096:
                continue
            start = -(-lo // lcm_e) * lcm_e
            found = [n for n in range(start, hi + 1, lcm_e) if (2 * p + 2 - n) % lcm_t == 0]
            if len(found) == 1:
                return found[0]
    raise AmbiguousOrder(f"could not pin down #E(F_{p})")


# -- Weil pairing ---------------------------------------------------------------


def _line_values(curve: FpCurve, T: FpPoint, U: FpPoint, R):
    """(l(R), v(R)) for the line through T, U and the vertical at T + U.

    Lines are normalized at O (leading coefficient 1 in t = -x/y).
    """
    if T is None or U is None:
        return 1, 1
    p = curve.p
    xr, yr = R
    x1, y1 = T
    x2, y2 = U
    if x1 == x2:
        den = (y1 + y2 + curve.a1 * x2 + curve.a3) % p
        if den == 0:
            return (xr - x1) % p, 1
        lam = (3 * x1 * x1 + 2 * curve.a2 * x1 + curve.a4 - curve.a1 * y1) * pow(den, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam + curve.a1 * lam - curve.a2 - x1 - x2) % p
    return (lam * (xr - x1) + y1 - yr) % p, (xr - x3) % p


def _miller(curve: FpCurve, P: FpPoint, m: int, R) -> tuple[int, int]:
    """Numerator and denominator of f_{m,P}(R), div f = m(P) - m(O) - ... .

    Raises DegenerateEvaluation if R hits a zero or pole of an intermediate line.
    """
    if R is None:
        raise DegenerateEvaluation("evaluation at O")
    p = curve.p
    num = den = 1
    T = P
    for bit in bin(m)[3:]:
        ln, lv = _line_values(curve, T, T, R)
        T = curve.add(T, T)
        num = num * num * ln % p
        den = den * den * lv % p
        if bit == "1":
            ln, lv = _line_values(curve, T, P, R)
            T = curve.add(T, P)
            num = num * ln % p
            den = den * lv % p
        if num == 0 or den == 0:
            raise DegenerateEvaluation("intermediate line vanishes at the evaluation point")
    return num, den


def _check_torsion(curve: FpCurve, m: int, *points):
    for pt in points:
        if curve.mul(m, pt) is not None:
            raise ValueError(f"{pt} is not {m}-torsion")


def weil_pairing(curve: FpCurve, P: FpPoint, Q: FpPoint, m: int) -> int:
    """e_m(P, Q) in F_p, via e = (-1)^m f_{m,P}(Q) / f_{m,Q}(P).

    A line through multiples of P vanishes at Q only if Q lies in <P> (and
    symmetrically), in which case the pairing is 1 by bilinearity and the
    alternating property; no auxiliary point is needed.
    """
    _check_torsion(curve, m, P, Q)
    if P is None or Q is None or P == Q:
        return 1
    p = curve.p
    try:
        n1, d1 = _miller(curve, P, m, Q)
        n2, d2 = _miller(curve, Q, m, P)
    except DegenerateEvaluation:
        return 1
    value = n1 * d2 * pow(d1 * n2, -1, p) % p
    return (p - value) % p if m % 2 else value


def weil_pairing_randomized(curve: FpCurve, P: FpPoint, Q: FpPoint, m: int, rng: random.Random,
                            retries: int = _PAIRING_RETRIES) -> int:
    """e_m(P, Q) via an auxiliary point S:

        [f_P(Q + S) / f_P(S)] / [f_Q(P - S) / f_Q(-S)]

    Degenerate choices of S are retried; after ``retries`` failures raises
    DegenerateEvaluation (tiny groups may offer no usable S over F_p).
    """
    _check_torsion(curve, m, P, Q)
    if P is None or Q is None:
        return 1
    p = curve.p
    for _ in range(retries):
        S = curve.random_point(rng)
        try:
            a_n, a_d = _miller(curve, P, m, curve.add(Q, S))
            b_n, b_d = _miller(curve, P, m, S)
            c_n, c_d = _miller(curve, Q, m, curve.sub(P, S))
            d_n, d_d = _miller(curve, Q, m, curve.neg(S))
        except DegenerateEvaluation:
            continue
        num = a_n * b_d * c_d * d_n
        den = a_d * b_n * c_n * d_d
        return num * pow(den, -1, p) % p
    raise DegenerateEvaluation(f"no usable auxiliary point after {retries} tries")


# -- structure ------------------------------------------------------------------


@dataclass(frozen=True)
class GroupStructure:
    """E(F_p) = <G1> + <G2>, a direct sum of cyclic groups of orders n1 | n2."""

    curve: FpCurve
    order: int
    n1: int
    n2: int
    g1: FpPoint
    g2: FpPoint
    factorization: tuple
    zeta: int = 1  # e_{n2}(G1, G2), of exact order n1

    @property
    def p(self) -> int:
        return self.curve.p

    @property
    def invariants(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    def point(self, c1: int, c2: int) -> FpPoint:
        return self.curve.add(self.curve.mul(c1, self.g1), self.curve.mul(c2, self.g2))

    def torsion_points(self, ell: int) -> set:
        """All points Q with ell*Q == O, found among the combinations c1*G1 + c2*G2."""
        out = set()
        g1, g2 = math.gcd(ell, self.n1), math.gcd(ell, self.n2)
        for i, j in product(range(g1), range(g2)):
            Q = self.point(i * (self.n1 // g1), j * (self.n2 // g2))
            if self.curve.mul(ell, Q) is None:
                out.add(Q)
        return out

    def check(self) -> None:
        """Assert every structural invariant; raises InternalInconsistency."""
        p, N, n1, n2 = self.p, self.order, self.n1, self.n2
        lo, hi = self.curve.hasse_interval
        problems = []
        if n2 % n1:
            problems.append("n1 does not divide n2")
        if (p - 1) % n1:
            problems.append("n1 does not divide p - 1")
        if n1 * n2 != N:
            problems.append("n1 * n2 != N")
        if not lo <= N <= hi:
            problems.append("order outside the Hasse interval")
        if factor_product(self.factorization) != N:
            problems.append("factorization does not match N")
        if not (self.curve.contains(self.g1) and self.curve.contains(self.g2)):
            problems.append("generator off the curve")
        if not problems:
            if point_order(self.curve, self.g2, self.factorization) != n2:
                problems.append("ord(G2) != n2")
            if point_order(self.curve, self.g1, self.factorization) != n1:
                problems.append("ord(G1) != n1")
            if pow(self.zeta, n1, p) != 1 or multiplicative_order(self.zeta, p, n1) != n1:
                problems.append("pairing e(G1, G2) does not have order n1")
        if problems:
            raise InternalInconsistency(f"p={p}: " + "; ".join(problems))


def _structure_by_enumeration(curve: FpCurve) -> GroupStructure:
    pts = curve.points()
    N = len(pts)
    fact = factorize(N)
    orders = {Q: point_order(curve, Q, fact) for Q in pts}
    n2 = max(orders.values())
    n1 = N // n2
    g2 = next(Q for Q in pts if orders[Q] == n2)
    sub2 = {curve.mul(k, g2) for k in range(n2)}
    g1 = None
    if n1 > 1:
        g1 = next(Q for Q in pts if orders[Q] == n1
                  and all(curve.mul(k, Q) not in sub2 for k in range(1, n1)))
    zeta = weil_pairing(curve, g1, g2, n2) if n1 > 1 else 1
    return GroupStructure(curve, N, n1, n2, g1, g2, fact, zeta)


def _ell_exponent(curve: FpCurve, R: FpPoint, ell: int) -> int:
    k = 0
    while R is not None:
        R = curve.mul(ell, R)
        k += 1
    return k


def structure(curve: FpCurve, seed=0) -> GroupStructure:
    """Invariant factors and certified generators of E(F_p).

    Works one Sylow subgroup at a time: an element of maximal ell-power order
    gives the ell-part of G2; a random Sylow element with its <G2>-component
    removed gives the ell-part of G1 once the ell^a-Weil pairing against G2
    has exact order ell^a. The assembled basis is certified by ord(G1) = n1,
    ord(G2) = n2 and e_{n2}(G1, G2) having exact order n1.
    """
    if curve.p <= 3:
        S = _structure_by_enumeration(curve)
        S.check()
        return S
    N = group_order(curve, seed)
    fact = factorize(N)
    rng = curve_rng(curve, seed, "structure")
    budget = 64 * max(1, N.bit_length())
    draws = 0
    g1 = g2 = None
    n1 = n2 = 1
    for ell, v in fact:
        cofactor = N // ell**v
        best, b = None, 0
        part1, a = None, 0
        while True:
            if draws >= budget:
                raise GeneratorSearchExhausted(f"p={curve.p}: no certified basis after {draws} draws")
            draws += 1
            R = curve.mul(cofactor, curve.random_point(rng))
            k = _ell_exponent(curve, R, ell)
            if k > b:
                best, b = R, k
            if b == v:
                a = 0
                break
            a = v - b
            if a > b:
                continue
            t = discrete_log(curve, best, curve.mul(ell**a, R), ell**b, ((ell, b),))
            if t is None or t % ell**a:
                continue
            cand = curve.sub(R, curve.mul(t // ell**a, best))
            H = curve.mul(ell ** (b - a), best)
            zeta = weil_pairing(curve, cand, H, ell**a)
            if multiplicative_order(zeta, curve.p, ell**a, ((ell, a),)) == ell**a:
                part1 = cand
                break
        g2 = curve.add(g2, best)
        n2 *= ell**b
        if a:
            g1 = curve.add(g1, part1)
            n1 *= ell**a
    zeta = weil_pairing(curve, g1, g2, n2) if n1 > 1 else 1
    S = GroupStructure(curve, N, n1, n2, g1, g2, fact, zeta)
    S.check()
    return S


def coordinates(Q: FpPoint, S: GroupStructure) -> tuple[int, int]:
    """(c1 mod n1, c2 mod n2) with Q == c1*G1 + c2*G2.

    c1 comes from e_{n2}(Q, G2) = e_{n2}(G1, G2)^c1, then c2 is a discrete
    log in <G2>.
    """
    curve = S.curve
    if not curve.contains(Q):
        raise ValueError(f"{Q} is not on the curve")
    if curve.p <= 3:
        for c1, c2 in product(range(S.n1), range(S.n2)):
            if S.point(c1, c2) == Q:
                return c1, c2
        raise InternalInconsistency(f"{Q} not generated by G1, G2")
    c1 = 0
    if S.n1 > 1:
        w = weil_pairing(curve, Q, S.g2, S.n2)
        c1 = field_log(curve.p, S.zeta, w, S.n1)
        if c1 is None:
            raise InternalInconsistency("pairing value outside <e(G1, G2)>")
    rest = curve.sub(Q, curve.mul(c1, S.g1))
    c2 = discrete_log(curve, S.g2, rest, S.n2, _divisor_fact(S.factorization, S.n2))
    if c2 is None or S.point(c1, c2) != Q:
        raise InternalInconsistency(f"reconstruction failed for {Q}")
    return c1, c2


def _divisor_fact(fact, d: int):
    out = []
    for ell, _ in fact:
        e = 0
        while d % ell == 0:
            d //= ell
            e += 1
        if e:
            out.append((ell, e))
    return tuple(out)
