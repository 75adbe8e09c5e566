"""Brute-force oracles for small primes.

Nothing here uses discrete logs, pairings, or lattice reduction; each
function recomputes its answer by enumeration so it can check the fast path.
"""

from __future__ import annotations

from itertools import product

from .curve import FpCurve
from .ecgroup import GroupStructure
from .zlattice import RelationLattice


def enumerate_points(E: FpCurve) -> list:
    """Every point of E(F_p), by testing all (x, y) pairs."""
    p = E.p
    out = [None]
    for x in range(p):
        rhs = ((x + E.a2) * x + E.a4) * x + E.a6
        for y in range(p):
            if (y * y + E.a1 * x * y + E.a3 * y - rhs) % p == 0:
                out.append((x, y))
    return out


def enumerate_order(E: FpCurve) -> int:
    return len(enumerate_points(E))


def subgroup(E: FpCurve, gens) -> set:
    """The subgroup generated by ``gens``, by closure under addition."""
    seen = {None}
    frontier = [None]
    while frontier:
        nxt = []
        for Q in frontier:
            for g in gens:
                R = E.add(Q, g)
                if R not in seen:
                    seen.add(R)
                    nxt.append(R)
        frontier = nxt
    return seen


def minimal_alpha(E: FpCurve, pts) -> tuple[int, int, int]:
    """Least a >= 1 with a*P_i in <P_j, P_k>, for i = 1, 2, 3."""
    out = []
    for i in range(3):
        others = subgroup(E, [pts[j] for j in range(3) if j != i])
        a, Q = 1, pts[i]
        while Q not in others:
            a += 1
            Q = E.add(Q, pts[i])
        out.append(a)
    return tuple(out)


def torsion_count(E: FpCurve, ell: int, points=None) -> int:
    """#E(F_p)[ell] by direct multiplication of every point."""
    points = enumerate_points(E) if points is None else points
    return sum(1 for Q in points if E.mul(ell, Q) is None)


def box_shortest(L: RelationLattice, bound: int):
    """Least sup-norm nonzero vector of L in the box [-bound, bound]^3, by membership tests."""
    best = None
    rng = range(-bound, bound + 1)
    for v in product(rng, rng, rng):
        if any(v) and L.contains(v):
            s = max(map(abs, v))
            if best is None or s < best[0]:
                best = (s, v)
    return best


def check_prime(E: FpCurve, S: GroupStructure, L: RelationLattice, pts, alpha) -> list[str]:
    """Discrepancies between the fast pipeline and brute force at one prime."""
    problems = []
    everything = enumerate_points(E)
    if len(everything) != S.order:
        problems.append(f"order {S.order} != enumerated {len(everything)}")
    generated = subgroup(E, pts)
    if L.det != len(generated):
        problems.append(f"det {L.det} != |<P1,P2,P3>| = {len(generated)}")
    brute = minimal_alpha(E, pts)
    if tuple(alpha) != brute:
        problems.append(f"alpha {tuple(alpha)} != brute force {brute}")
    if len(subgroup(E, [S.g1, S.g2])) != S.order:
        problems.append("G1, G2 do not generate")
    return problems
