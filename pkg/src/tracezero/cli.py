"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 parse/usage error,
3 gcd(alpha) != 1 at some prime, 4 bad reduction (single-prime commands).

"Good reduction" means p does not divide the discriminant of the model as
given; no minimal model is computed, so a non-minimal input simply loses a
few extra primes.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from .arith import MAX_MODULUS, is_prime, primes_in_range
from .certificate import (
    PrimeCertificate,
    Setup,
    certify_primes,
    check_gcd_one,
    independence_evidence,
    load_setup,
    verify_certificate,
)
from .ecgroup import coordinates, structure
from .errors import (
    BadReduction,
    BudgetExceeded,
    ComplexMultiplication,
    ClaimFalsified,
    SetupError,
    VerificationFailed,
)
from .zlattice import alpha_triple, kernel_lattice

log = logging.getLogger("tracezero")

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_FALSIFIED, EXIT_BAD_REDUCTION = 0, 1, 2, 3, 4


def _load(path) -> Setup:
    try:
        return load_setup(path)
    except (OSError, ComplexMultiplication) as exc:
        raise SetupError(str(exc)) from exc


def _read_records(path):
    """Certificates from a record stream; summary lines are skipped."""
    certs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SetupError(f"{path}:{lineno}: {exc}") from exc
            if "summary" in rec:
                continue
            try:
                certs.append(PrimeCertificate.from_record(rec))
            except (KeyError, ValueError, TypeError) as exc:
                raise SetupError(f"{path}:{lineno}: bad record ({exc})") from exc
    return certs


def _summary_line(lo, hi, seed, certs, skipped) -> str:
    summary = {
        "min_p": str(lo),
        "max_p": str(hi),
        "seed": str(seed),
        "certified": str(len(certs)),
        "skipped_bad_reduction": [str(p) for p in skipped],
    }
    return json.dumps({"summary": summary}, separators=(",", ":"))


def cmd_certify(args) -> int:
    setup = _load(args.setup)
    lo, hi = args.min_p, args.max_p
    disc = setup.discriminant
    primes = primes_in_range(lo, hi) if hi >= lo else []
    good = [p for p in primes if disc % p]
    skipped = [p for p in primes if disc % p == 0]

    done = {}
    if args.resume and args.out and Path(args.out).exists():
        for cert in _read_records(args.out):
            if cert.p in good and verify_certificate(setup, cert):
                done[cert.p] = cert
        log.info("resuming: %d of %d primes already certified", len(done), len(good))
    todo = [p for p in good if p not in done]
    try:
        fresh = certify_primes(setup, todo, seed=args.seed, jobs=args.jobs)
    except ClaimFalsified as exc:
        print(f"FATAL: gcd(alpha) != 1: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    except VerificationFailed as exc:
        print(f"FATAL: certificate failed verification: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    certs = sorted([*done.values(), *fresh], key=lambda c: c.p)
    lines = [c.to_json() for c in certs]
    lines.append(_summary_line(lo, hi, args.seed, certs, skipped))
    text = "\n".join(lines) + "\n"
    if args.out:
        tmp = Path(str(args.out) + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, args.out)
    else:
        sys.stdout.write(text)
    print(f"certified {len(certs)} primes in [{lo}, {hi}]; skipped (bad reduction): "
          f"{skipped if skipped else 'none'}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    setup = _load(args.setup)
    certs = _read_records(args.certificates)
    failed = 0
    for cert in certs:
        verdict = verify_certificate(setup, cert)
        if not verdict:
            failed += 1
            print(f"p={cert.p}: FAIL {verdict.reason}", file=sys.stderr)
    print(f"{len(certs) - failed}/{len(certs)} certificates verified", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_independence(args) -> int:
    if args.coeff_bound < 1 or args.prime_bound < 2:
        print("usage error: --coeff-bound must be >= 1 and --prime-bound >= 2", file=sys.stderr)
        return EXIT_PARSE
    setup = _load(args.setup)
    try:
        report = independence_evidence(setup, args.prime_bound, args.coeff_bound, seed=args.seed)
    except BudgetExceeded as exc:
        print(f"enumeration budget exceeded: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    print(report.render())
    return EXIT_OK


def _fmt_point(Q) -> str:
    return "O" if Q is None else f"({Q[0]}, {Q[1]})"


def cmd_structure(args) -> int:
    setup = _load(args.setup)
    p = args.p
    if not is_prime(p) or p > MAX_MODULUS:
        print(f"usage error: {p} is not a prime <= 2^62", file=sys.stderr)
        return EXIT_PARSE
    try:
        E, pts = setup.reduce(p)
    except BadReduction:
        print(f"bad reduction at p={p} (p divides the discriminant {setup.discriminant})", file=sys.stderr)
        return EXIT_BAD_REDUCTION
    S = structure(E, args.seed)
    coords = [coordinates(Q, S) for Q in pts]
    L = kernel_lattice(coords, S.n1, S.n2)
    alpha = alpha_triple(L)
    out = [
        f"p = {p}",
        f"curve mod p: a = {E.coefficients}",
        f"N = {S.order} = " + " * ".join(f"{q}^{e}" if e > 1 else str(q) for q, e in S.factorization),
        f"(n1, n2) = ({S.n1}, {S.n2})" + ("  cyclic" if S.n1 == 1 else ""),
        f"G1 = {_fmt_point(S.g1)}   G2 = {_fmt_point(S.g2)}   e(G1, G2) = {S.zeta}",
    ]
    for i, (Q, c) in enumerate(zip(pts, coords), 1):
        out.append(f"P{i} mod p = {_fmt_point(Q)} = {c[0]}*G1 + {c[1]}*G2")
    out.append("relation lattice (HNF rows):")
    out += [f"  {list(row)}" for row in L.basis]
    out.append(f"det = {L.det}")
    out.append(f"alpha = {alpha}   gcd = {math.gcd(*alpha)}")
    print("\n".join(out))
    try:
        check_gcd_one(alpha, p)
    except ClaimFalsified as exc:
        print(f"FATAL: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_OK


def cmd_oracles(args) -> int:
    from . import oracles

    setup = _load(args.setup)
    failures = 0
    primes = [p for p in primes_in_range(2, args.max_p) if setup.discriminant % p]
    for p in primes:
        E, pts = setup.reduce(p)
        S = structure(E, args.seed)
        L = kernel_lattice([coordinates(Q, S) for Q in pts], S.n1, S.n2)
        problems = oracles.check_prime(E, S, L, pts, alpha_triple(L))
        status = "ok" if not problems else "; ".join(problems)
        failures += bool(problems)
        print(f"p={p:<6} N={S.order:<6} (n1,n2)=({S.n1},{S.n2})  det={L.det:<6} {status}")
    print(f"{len(primes) - failures}/{len(primes)} primes agree with brute force")
    return EXIT_VERIFY if failures else EXIT_OK


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def _bounded_prime_limit(text):
    value = _positive_int(text)
    if value > MAX_MODULUS:
        raise argparse.ArgumentTypeError(f"{text} exceeds the 2^62 modulus cap")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracezero",
        description="Trace-zero certificates for three points on an elliptic curve over Q.",
        epilog="Good reduction is judged against the given (possibly non-minimal) model.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("setup", help="setup file (JSON: a1..a6 and three points)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("certify", help="certify every good prime in a range")
    common(p)
    p.add_argument("--min-p", type=_positive_int, default=2)
    p.add_argument("--max-p", type=_bounded_prime_limit, default=100)
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--out", help="record stream (one JSON certificate per line); stdout if omitted")
    p.add_argument("--resume", action="store_true", help="reuse verified records already in --out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="re-verify a certificate stream")
    common(p)
    p.add_argument("certificates")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("independence", help="search for short global relations")
    common(p)
    p.add_argument("--prime-bound", type=int, default=2000)
    p.add_argument("--coeff-bound", type=int, default=10**4)
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("structure", help="show every intermediate quantity at one prime")
    common(p)
    p.add_argument("p", type=int)
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("oracles", help="compare the fast pipeline with brute force at small primes")
    common(p)
    p.add_argument("--max-p", type=_bounded_prime_limit, default=100)
    p.set_defaults(func=cmd_oracles)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SetupError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
