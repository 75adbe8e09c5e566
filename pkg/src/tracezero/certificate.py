"""Per-prime trace-zero certificates and the global checks on a setup.

For three points P1, P2, P3 on E and a prime p of good reduction, the
reduced points satisfy relations

    alpha_i * P_i + sum_{j != i} m_ij * P_j = O

with alpha_i the least positive such coefficient. When gcd(alpha) = 1, pick
a with sum(alpha_i * a_i) = 3 and set M_ii = 1 - alpha_i * a_i,
M_ij = -a_i * m_ij. Then trace(M) = 0 and M (P1, P2, P3)^T = (P1, P2, P3)^T
over F_p, while no such M exists over Q for independent points on a curve
without CM.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .arith import bezout_triple_target, is_prime, primes_in_range
from .curve import FpPoint, RationalCurve, reduce_curve, reduce_point
from .ecgroup import coordinates, structure
from .errors import (
    BadBezout,
    ComplexMultiplication,
    ClaimFalsified,
    SetupError,
    VerificationFailed,
)
from .zlattice import (
    DEFAULT_NODE_BUDGET,
    RelationLattice,
    alpha_triple,
    intersect,
    kernel_lattice,
    relation_row,
    shortest_vector_up_to,
)

# j-invariants of the 13 imaginary quadratic orders of class number one,
# keyed by discriminant. Cross-checked against 1728*J(tau) evaluated
# numerically (mpmath.kleinj) at tau = (D + sqrt(D))/2; the check is
# repeated in tests/test_certificate.py.
CM_J_INVARIANTS = {
    -3: 0,
    -4: 1728,
    -7: -3375,
    -8: 8000,
    -11: -32768,
    -12: 54000,
    -16: 287496,
    -19: -884736,
    -27: -12288000,
    -28: 16581375,
    -43: -884736000,
    -67: -147197952000,
    -163: -262537412640768000,
}

TRACE_TARGET = 3


def check_not_cm(j: Fraction) -> bool:
    """True iff j is not the j-invariant of a CM curve over Q."""
    j = Fraction(j)
    if j.denominator != 1:
        return True
    return j.numerator not in CM_J_INVARIANTS.values()


def check_gcd_one(alpha: Sequence[int], p: Optional[int] = None) -> None:
    if math.gcd(*alpha) != 1:
        raise ClaimFalsified(p, alpha)


# -- setup ---------------------------------------------------------------------


def _parse_rational(text) -> Fraction:
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise SetupError(f"expected a rational string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SetupError(f"bad rational {text!r}") from exc


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Setup:
    """A curve over Q with three rational points P = (P1, P2, P3)."""

    curve: RationalCurve
    points: tuple

    def __post_init__(self):
        if len(self.points) != 3:
            raise SetupError("a setup has exactly three points")
        for pt in self.points:
            if not self.curve.contains(pt):
                raise SetupError(f"{pt} is not on {self.curve.coefficients}")
        if not check_not_cm(self.curve.j_invariant):
            raise ComplexMultiplication(f"j = {self.curve.j_invariant} is a CM j-invariant")

    @property
    def discriminant(self) -> int:
        return self.curve.discriminant

    @property
    def j_invariant(self) -> Fraction:
        return self.curve.j_invariant

    @classmethod
    def from_dict(cls, doc: dict) -> "Setup":
        try:
            coeffs = [int(str(doc[f"a{k}"]).strip()) for k in (1, 2, 3, 4, 6)]
            raw_points = doc["points"]
        except (KeyError, ValueError, TypeError) as exc:
            raise SetupError(f"malformed setup: {exc}") from exc
        try:
            curve = RationalCurve(*coeffs)
        except ValueError as exc:
            raise SetupError(str(exc)) from exc
        points = []
        for entry in raw_points:
            if entry == "O":
                points.append(None)
            elif isinstance(entry, (list, tuple)) and len(entry) == 2:
                points.append((_parse_rational(entry[0]), _parse_rational(entry[1])))
            else:
                raise SetupError(f"bad point entry {entry!r}")
        return cls(curve, tuple(points))

    def to_dict(self) -> dict:
        doc = {f"a{k}": str(v) for k, v in zip((1, 2, 3, 4, 6), self.curve.coefficients)}
        doc["points"] = [
            "O" if pt is None else [_format_rational(pt[0]), _format_rational(pt[1])]
            for pt in self.points
        ]
        return doc

    def reduce(self, p: int):
        """(E mod p, [P1, P2, P3] mod p); raises BadReduction when p | disc."""
        E = reduce_curve(self.curve, p)
        return E, [reduce_point(pt, p) for pt in self.points]


def load_setup(path) -> Setup:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SetupError(f"{path}: {exc}") from exc
    return Setup.from_dict(doc)


def seed_setup() -> Setup:
    """y^2 + y = x^3 - 7x + 6 with (1, 0), (2, 0), (0, 2)."""
    curve = RationalCurve(0, 0, 1, -7, 6)
    return Setup(curve, tuple(curve.point(x, y) for x, y in ((1, 0), (2, 0), (0, 2))))


# -- matrices ------------------------------------------------------------------


def trace(M) -> int:
    return sum(M[i][i] for i in range(len(M)))


def build_matrix(rows: Sequence[Sequence[int]], a: Sequence[int]) -> tuple:
    """The trace-zero matrix with M_ii = 1 - alpha_i*a_i and M_ij = -a_i*m_ij.

    ``rows[i]`` is the relation with alpha_i in position i.
    """
    alpha = [rows[i][i] for i in range(3)]
    if sum(x * y for x, y in zip(alpha, a)) != TRACE_TARGET:
        raise BadBezout(f"sum(alpha_i * a_i) != {TRACE_TARGET} for alpha={alpha}, a={tuple(a)}")
    M = tuple(
        tuple(1 - alpha[i] * a[i] if i == j else -a[i] * rows[i][j] for j in range(3))
        for i in range(3)
    )
    assert trace(M) == 0
    return M


# -- certificates --------------------------------------------------------------


@dataclass(frozen=True)
class PrimeCertificate:
    p: int
    order: int
    n1: int
    n2: int
    g1: FpPoint
    g2: FpPoint
    coords: tuple
    lattice: tuple
    alpha: tuple
    bezout: tuple
    rows: tuple
    matrix: tuple
    verified: bool = False
    timings: dict = field(default_factory=dict, compare=False, repr=False)

    def to_record(self) -> dict:
        """JSON-ready record; integers as decimal strings, fixed field order.

        Timings are left out so records are byte-reproducible.
        """

        def ints(v):
            return [ints(x) for x in v] if isinstance(v, (list, tuple)) else str(v)

        def pt(q):
            return "O" if q is None else ints(q)

        return {
            "p": str(self.p),
            "N": str(self.order),
            "n1": str(self.n1),
            "n2": str(self.n2),
            "G1": pt(self.g1),
            "G2": pt(self.g2),
            "coords": ints(self.coords),
            "lattice": ints(self.lattice),
            "alpha": ints(self.alpha),
            "bezout": ints(self.bezout),
            "rows": ints(self.rows),
            "M": ints(self.matrix),
            "verified": self.verified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))

    @classmethod
    def from_record(cls, rec: dict) -> "PrimeCertificate":
        def ints(v):
            return tuple(ints(x) for x in v) if isinstance(v, list) else int(v)

        def pt(q):
            return None if q == "O" else ints(q)

        return cls(
            p=int(rec["p"]),
            order=int(rec["N"]),
            n1=int(rec["n1"]),
            n2=int(rec["n2"]),
            g1=pt(rec["G1"]),
            g2=pt(rec["G2"]),
            coords=ints(rec["coords"]),
            lattice=ints(rec["lattice"]),
            alpha=ints(rec["alpha"]),
            bezout=ints(rec["bezout"]),
            rows=ints(rec["rows"]),
            matrix=ints(rec["M"]),
            verified=bool(rec.get("verified", False)),
        )


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = "ok"

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(setup: Setup, cert: PrimeCertificate) -> Verdict:
    """Re-check a certificate from scratch using only curve arithmetic.

    Reason codes: bad-reduction, malformed, trace-nonzero, gcd, bezout,
    relation-row, lattice-row, matrix-action, matrix-structure.
    """
    p = cert.p
    if not is_prime(p) or setup.discriminant % p == 0:
        return Verdict(False, "bad-reduction")
    try:
        E, pts = setup.reduce(p)
        M, rows, alpha, a = cert.matrix, cert.rows, cert.alpha, cert.bezout
        if len(M) != 3 or any(len(r) != 3 for r in M) or len(rows) != 3 or len(alpha) != 3 or len(a) != 3:
            return Verdict(False, "malformed")
        if trace(M) != 0:
            return Verdict(False, "trace-nonzero")
        if min(alpha) <= 0 or math.gcd(*alpha) != 1:
            return Verdict(False, "gcd")
        if sum(x * y for x, y in zip(alpha, a)) != TRACE_TARGET:
            return Verdict(False, "bezout")
        for i, row in enumerate(rows):
            if row[i] != alpha[i] or E.combination(row, pts) is not None:
                return Verdict(False, "relation-row")
        for row in cert.lattice:
            if E.combination(row, pts) is not None:
                return Verdict(False, "lattice-row")
        for i in range(3):
            if E.combination(M[i], pts) != pts[i]:
                return Verdict(False, "matrix-action")
        if tuple(map(tuple, M)) != build_matrix(rows, a):
            return Verdict(False, "matrix-structure")
    except (ValueError, TypeError, ArithmeticError):
        return Verdict(False, "malformed")
    return Verdict(True)


def certify_prime(setup: Setup, p: int, seed=0) -> PrimeCertificate:
    """Build and independently verify the trace-zero certificate at p."""
    t0 = time.perf_counter()
    E, pts = setup.reduce(p)
    S = structure(E, seed)
    t1 = time.perf_counter()
    coords = tuple(coordinates(Q, S) for Q in pts)
    L = kernel_lattice(coords, S.n1, S.n2)
    alpha = alpha_triple(L)
    check_gcd_one(alpha, p)
    a = bezout_triple_target(alpha, TRACE_TARGET)
    rows = tuple(relation_row(L, i) for i in range(3))
    M = build_matrix(rows, a)
    t2 = time.perf_counter()
    cert = PrimeCertificate(
        p=p, order=S.order, n1=S.n1, n2=S.n2, g1=S.g1, g2=S.g2,
        coords=coords, lattice=L.basis, alpha=alpha, bezout=a, rows=rows, matrix=M,
    )
    verdict = verify_certificate(setup, cert)
    if not verdict:
        raise VerificationFailed(f"p={p}: {verdict.reason}")
    timings = {"structure": t1 - t0, "lattice": t2 - t1, "verify": time.perf_counter() - t2}
    return replace(cert, verified=True, timings=timings)


def relation_lattice_at(setup: Setup, p: int, seed=0) -> RelationLattice:
    E, pts = setup.reduce(p)
    S = structure(E, seed)
    return kernel_lattice([coordinates(Q, S) for Q in pts], S.n1, S.n2)


def good_primes(setup: Setup, lo: int, hi: int) -> list[int]:
    disc = setup.discriminant
    return [p for p in primes_in_range(lo, hi) if disc % p]


# -- global independence evidence ------------------------------------------------


@dataclass(frozen=True)
class IndependenceReport:
    prime_bound: int
    coeff_bound: int
    primes_used: int
    lattice: tuple
    det_history: tuple
    candidate: Optional[tuple]
    status: str  # "no-candidate" | "relation-verified" | "candidate-refuted"

    @property
    def det(self) -> int:
        return self.det_history[-1] if self.det_history else 1

    def render(self) -> str:
        B, bound = self.coeff_bound, self.prime_bound
        if self.status == "no-candidate":
            head = f"no relation with |c|_inf <= {B} survives primes <= {bound}"
        elif self.status == "relation-verified":
            head = f"relation {self.candidate} verified exactly over Q: c1*P1 + c2*P2 + c3*P3 = O"
        else:
            head = (f"candidate {self.candidate} survives primes <= {bound} but is not a relation "
                    f"over Q; sweep further primes")
        det = self.det
        return "\n".join([
            head,
            f"primes used: {self.primes_used}",
            f"intersection index: {det if det.bit_length() < 200 else f'~2^{det.bit_length() - 1}'}",
        ])


def _fails_locally(setup: Setup, v, start: int, count: int = 32) -> bool:
    """True if sum v_i P_i is nonzero modulo one of the next good primes above ``start``."""
    p, seen = start, 0
    while seen < count:
        p += 1
        if not is_prime(p) or setup.discriminant % p == 0:
            continue
        seen += 1
        E, pts = setup.reduce(p)
        if E.combination(v, pts) is not None:
            return True
    return False


def independence_evidence(setup: Setup, prime_bound: int, coeff_bound: int, seed=0,
                          max_nodes: int = DEFAULT_NODE_BUDGET) -> IndependenceReport:
    """Intersect the relation lattices at good p <= prime_bound and look for short vectors.

    A surviving candidate is refuted at a larger prime when possible and
    otherwise checked exactly over Q before it is reported as a relation.
    """
    if coeff_bound < 1:
        raise ValueError("coefficient bound must be positive")
    L = None
    dets = []
    primes = good_primes(setup, 2, prime_bound)
    for p in primes:
        Lp = relation_lattice_at(setup, p, seed)
        L = Lp if L is None else intersect(L, Lp)
        dets.append(L.det)
    if L is None:
        L = RelationLattice(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    v = shortest_vector_up_to(L, coeff_bound, max_nodes)
    if v is None:
        status = "no-candidate"
    elif _fails_locally(setup, v, prime_bound):
        status = "candidate-refuted"
    elif setup.curve.combination(v, setup.points) is None:
        status = "relation-verified"
    else:
        status = "candidate-refuted"
    return IndependenceReport(prime_bound, coeff_bound, len(primes), L.basis, tuple(dets), v, status)


# -- sweeps ----------------------------------------------------------------------


def _certify_job(args):
    setup_doc, p, seed = args
    return certify_prime(Setup.from_dict(setup_doc), p, seed)


def certify_primes(setup: Setup, primes: Iterable[int], seed=0, jobs: int = 1) -> list[PrimeCertificate]:
    """Certificates for the given good primes, sorted by p."""
    primes = sorted(primes)
    if jobs <= 1 or len(primes) < 2:
        return [certify_prime(setup, p, seed) for p in primes]
    from concurrent.futures import ProcessPoolExecutor

    doc = setup.to_dict()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, len(primes) // (4 * jobs))
        certs = list(pool.map(_certify_job, [(doc, p, seed) for p in primes], chunksize=chunk))
    return sorted(certs, key=lambda c: c.p)
