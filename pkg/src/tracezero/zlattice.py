"""Exact integer lattices in Z^3: Hermite normal form, relation lattices, intersections.

Matrices are lists of integer rows and lattices are row lattices. The HNF used
here is lower-triangular: row k has its positive pivot in column k and zeros
to the right of it, and every entry below a pivot lies in ``[0, pivot)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .arith import ext_gcd, size_reduce
from .errors import BudgetExceeded

IntMatrix = list  # list[list[int]]

#: Enumeration nodes allowed in :func:`shortest_vector_up_to`.
DEFAULT_NODE_BUDGET = 10**7


def _echelon(rows: Sequence[Sequence[int]], ncols: int):
    """Row reduction to HNF, tracking the unimodular transform.

    Returns ``(H, U, kernel)`` where ``H`` is the list of nonzero HNF rows,
    ``U`` the transform (``U @ rows`` is ``H`` followed by zero rows in some
    order) and ``kernel`` a basis of the left kernel of ``rows``.
    """
    A = [list(r) for r in rows]
    m = len(A)
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def sub(i, j, q):
        if q:
            A[i] = [x - q * y for x, y in zip(A[i], A[j])]
            U[i] = [x - q * y for x, y in zip(U[i], U[j])]

    active = list(range(m))
    pivots = []  # (column, row), decreasing column
    for c in reversed(range(ncols)):
        while True:
            nz = [i for i in active if A[i][c]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda i: (abs(A[i][c]), i))
            for i in nz:
                if i != piv:
                    sub(i, piv, A[i][c] // A[piv][c])
        if not nz:
            continue
        piv = nz[0]
        if A[piv][c] < 0:
            A[piv] = [-x for x in A[piv]]
            U[piv] = [-x for x in U[piv]]
        active.remove(piv)
        pivots.append((c, piv))
    for k, (c, i) in enumerate(pivots):
        for _, j in pivots[:k]:
            sub(j, i, A[j][c] // A[i][c])
    order = [i for _, i in reversed(pivots)]
    return [A[i] for i in order], [U[i] for i in order] + [U[i] for i in active], [U[i] for i in active]


def hnf(rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> IntMatrix:
    """Lower-triangular Hermite normal form of the row lattice (zero rows dropped)."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return _echelon(rows, ncols)[0]


def left_kernel(rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> IntMatrix:
    """A basis of {u : u @ rows == 0}."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return _echelon(rows, ncols)[2]


def _combine(coeffs, rows):
    return tuple(sum(c * r[k] for c, r in zip(coeffs, rows)) for k in range(len(rows[0])))


@dataclass(frozen=True)
class RelationLattice:
    """Full-rank sublattice of Z^3 held as its HNF basis."""

    basis: tuple

    def __post_init__(self):
        b = self.basis
        if len(b) != 3 or any(len(r) != 3 for r in b):
            raise ValueError("relation lattices are full rank in Z^3")
        for k in range(3):
            if b[k][k] <= 0 or any(b[k][j] for j in range(k + 1, 3)):
                raise ValueError(f"basis is not in lower-triangular HNF: {b}")

    @classmethod
    def from_generators(cls, rows) -> "RelationLattice":
        H = hnf(rows, 3)
        if len(H) != 3:
            raise ValueError(f"generators span rank {len(H)}, not 3")
        return cls(tuple(tuple(r) for r in H))

    @property
    def det(self) -> int:
        """The index [Z^3 : L]."""
        return self.basis[0][0] * self.basis[1][1] * self.basis[2][2]

    def contains(self, v: Sequence[int]) -> bool:
        v = list(v)
        for k in (2, 1, 0):
            row = self.basis[k]
            if v[k] % row[k]:
                return False
            q = v[k] // row[k]
            v = [x - q * y for x, y in zip(v, row)]
        return not any(v)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.basis]


def kernel_lattice(coords: Sequence[tuple[int, int]], n1: int, n2: int) -> RelationLattice:
    """{v in Z^3 : sum v_i * coords_i == 0 in Z/n1 x Z/n2}."""
    system = [[c1, c2] for c1, c2 in coords] + [[n1, 0], [0, n2]]
    kernel = left_kernel(system, 2)
    return RelationLattice.from_generators([u[: len(coords)] for u in kernel])


def alpha_triple(L: RelationLattice) -> tuple[int, int, int]:
    """alpha_i = generator of the projection of L to coordinate i."""
    return tuple(math.gcd(*(row[i] for row in L.basis)) for i in range(3))


def relation_row(L: RelationLattice, i: int) -> tuple[int, int, int]:
    """A vector of L whose coordinate ``i`` (0-based) equals alpha_i, size-reduced."""
    column = [row[i] for row in L.basis]
    coeffs = [0, 0, 0]
    g = 0
    for k, c in enumerate(column):
        g, x, y = ext_gcd(g, c)
        coeffs = [x * u for u in coeffs]
        coeffs[k] = y
    v = _combine(coeffs, L.basis)
    assert v[i] == g
    fibre = [_combine(u, L.basis) for u in left_kernel([[c] for c in column], 1)]
    return size_reduce(v, *fibre)


def intersect(L1: RelationLattice, L2: RelationLattice) -> RelationLattice:
    """L1 & L2 from the left kernel of the stacked basis [B1; -B2]."""
    stacked = L1.rows() + [[-x for x in r] for r in L2.basis]
    kernel = left_kernel(stacked, 3)
    out = RelationLattice.from_generators([_combine(u[:3], L1.basis) for u in kernel])
    for row in out.basis:
        assert L1.contains(row) and L2.contains(row)
    return out


def _lll(rows) -> list[tuple[int, ...]]:
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    reduced = DomainMatrix([[ZZ(x) for x in r] for r in rows], (len(rows), len(rows[0])), ZZ).lll()
    return [tuple(int(x) for x in r) for r in reduced.to_list()]


def _canonical_sign(v):
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def shortest_vector_up_to(L: RelationLattice, bound: int,
                          max_nodes: int = DEFAULT_NODE_BUDGET) -> Optional[tuple[int, int, int]]:
    """A nonzero vector of L of least sup-norm among those with sup-norm <= bound.

    Exhaustive: every lattice vector with sup-norm <= bound lies in the
    Euclidean ball of radius sqrt(3)*bound, which is enumerated (Fincke-Pohst
    on an LLL-reduced basis) with the radius shrinking as better vectors turn
    up. Returns None if there is no such vector; the sign is normalized so
    the first nonzero entry is positive.
    """
    if bound < 1:
        raise ValueError("bound must be a positive integer")
    B = _lll(L.basis)
    n = len(B)
    # Gram-Schmidt data, exact
    bstar, mu, norms = [], [[Fraction(0)] * n for _ in range(n)], []
    for i in range(n):
        v = [Fraction(x) for x in B[i]]
        for j in range(i):
            mu[i][j] = sum(Fraction(a) * b for a, b in zip(B[i], bstar[j])) / norms[j]
            v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(sum(a * a for a in v))

    best = None
    cur = bound
    nodes = 0
    x = [0] * n

    def fits(k, value, center, partial):
        d = value - center
        return partial + d * d * norms[k] <= 3 * cur * cur

    def search(k, partial):
        nonlocal best, cur, nodes
        center = -sum(x[j] * mu[j][k] for j in range(k + 1, n))
        for value in _outward(round(center), center, lambda v: fits(k, v, center, partial)):
            nodes += 1
            if nodes > max_nodes:
                raise BudgetExceeded(f"enumeration exceeded {max_nodes} nodes")
            x[k] = value
            d = value - center
            if k:
                search(k - 1, partial + d * d * norms[k])
                continue
            v = _combine(x, B)
            s = max(abs(c) for c in v)
            if s and s <= cur and (best is None or s < cur):
                best, cur = v, s
        x[k] = 0

    search(n - 1, Fraction(0))
    return _canonical_sign(best) if best is not None else None


def _outward(start, center, ok):
    """Integers by increasing distance from ``center`` while ``ok`` holds on each side.

    ``ok`` is re-evaluated lazily, so a shrinking search radius takes effect
    immediately; once a side fails it stays closed.
    """
    up, down = start, start - 1
    up_open = down_open = True
    while up_open or down_open:
        if up_open and (not down_open or abs(up - center) <= abs(down - center)):
            if ok(up):
                yield up
                up += 1
            else:
                up_open = False
        elif down_open:
            if ok(down):
                yield down
                down -= 1
            else:
                down_open = False
