"""Exact integer and modular arithmetic kernels.

Python ``int`` and :class:`fractions.Fraction` provide the arbitrary precision
integers and reduced rationals; residues mod p are plain ``int`` values in
``[0, p)`` with the modulus passed alongside.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import EvenModulus, NonInvertible, NotDivisible

#: Largest modulus accepted for prime sweeps.
MAX_MODULUS = 2**62

# Deterministic for every n < 3.3e24, which covers the whole 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 10**6

Factorization = tuple  # tuple[tuple[int, int], ...], primes strictly increasing


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) >= 0`` and ``a*x + b*y = g``."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _sub_mul(u, k, v):
    return tuple(a - k * b for a, b in zip(u, v))


def lagrange_reduce(b1, b2):
    """Gauss-Lagrange reduction of a rank-2 integer basis (any ambient dim)."""
    b1, b2 = tuple(b1), tuple(b2)
    if _dot(b1, b1) > _dot(b2, b2):
        b1, b2 = b2, b1
    while True:
        n1 = _dot(b1, b1)
        if n1 == 0:
            raise ValueError("degenerate basis")
        b2 = _sub_mul(b2, round(Fraction(_dot(b1, b2), n1)), b1)
        if _dot(b2, b2) >= n1:
            return b1, b2
        b1, b2 = b2, b1


def size_reduce(v, b1, b2):
    """Move ``v`` close to the origin by subtracting a combination of ``b1, b2``.

    Nearest-plane rounding against the Lagrange-reduced basis; the result
    differs from ``v`` by an element of the lattice spanned by ``b1, b2``.
    """
    b1, b2 = lagrange_reduce(b1, b2)
    mu = Fraction(_dot(b1, b2), _dot(b1, b1))
    b2_star = tuple(y - mu * x for x, y in zip(b1, b2))
    v = tuple(v)
    c2 = round(_dot(v, b2_star) / _dot(b2_star, b2_star))
    v = _sub_mul(v, c2, b2)
    c1 = round(Fraction(_dot(v, b1), _dot(b1, b1)))
    return _sub_mul(v, c1, b1)


def bezout_triple_target(alpha: Sequence[int], target: int) -> tuple[int, int, int]:
    """Integers ``(a1, a2, a3)`` with ``sum(alpha_i * a_i) == target``.

    The coefficients are size-reduced against the kernel of
    ``a -> sum(alpha_i * a_i)`` so certificate matrices stay small.
    Raises :class:`NotDivisible` if ``gcd(alpha)`` does not divide ``target``.
    """
    a1, a2, a3 = alpha
    if not all(a > 0 for a in alpha):
        raise ValueError(f"alpha entries must be positive, got {alpha}")
    g12, x, y = ext_gcd(a1, a2)
    g, u, w = ext_gcd(g12, a3)
    if target % g:
        raise NotDivisible(f"gcd{tuple(alpha)} = {g} does not divide {target}")
    k = target // g
    sol = (x * u * k, y * u * k, w * k)
    k1 = (a2 // g12, -(a1 // g12), 0)
    k2 = (x * a3 // g, y * a3 // g, -(g12 // g))
    sol = size_reduce(sol, k1, k2)
    assert _dot(sol, alpha) == target
    return sol


def mod_inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise NonInvertible(f"0 has no inverse mod {p}")
    try:
        return pow(a, -1, p)
    except ValueError as exc:
        raise NonInvertible(f"{a} is not invertible mod {p}") from exc


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def mod_sqrt(a: int, p: int) -> int | None:
    """Square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks).

    Returns the representative ``min(r, p - r)``, or ``None`` for a
    non-residue.
    """
    if p == 2:
        raise EvenModulus("mod_sqrt needs an odd prime; branch on p == 2")
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return min(r, p - r)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 2**64 (and well beyond)."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in _MR_BASES:
        x = pow(base, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    sieve = bytearray([1]) * (_TRIAL_LIMIT + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(_TRIAL_LIMIT) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, _TRIAL_LIMIT + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p <= hi."""
    if hi > MAX_MODULUS:
        raise ValueError(f"upper bound {hi} exceeds the 2**62 cap")
    lo = max(lo, 2)
    if hi <= _TRIAL_LIMIT:
        import bisect

        table = _small_primes()
        return list(table[bisect.bisect_left(table, lo) : bisect.bisect_right(table, hi)])
    return [n for n in range(lo, hi + 1) if is_prime(n)]


def _pollard_brent(n: int, rng: random.Random) -> int:
    """A nontrivial factor of the odd composite ``n``."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> Factorization:
    """Prime factorization of ``1 <= n`` as ``((p1, e1), (p2, e2), ...)``.

    Trial division by primes below 10**6, then Pollard-Brent rho on the
    remaining cofactor. Every reported prime passes :func:`is_prime`.
    """
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    counts: dict[int, int] = {}
    for q in _small_primes():
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            counts[q] = e
    if n > 1 and is_prime(n):
        counts[n] = counts.get(n, 0) + 1
    elif n > 1:
        rng = random.Random(n)
        stack = [n]
        while stack:
            m = stack.pop()
            if is_prime(m):
                counts[m] = counts.get(m, 0) + 1
                continue
            r = math.isqrt(m)
            if r * r == m:
                stack += [r, r]
                continue
            d = _pollard_brent(m, rng)
            stack += [d, m // d]
    return tuple(sorted(counts.items()))


def factor_product(fact: Factorization) -> int:
    out = 1
    for q, e in fact:
        out *= q**e
    return out


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Combine pairwise coprime congruences into a residue mod the product."""
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        g, s, _ = ext_gcd(m, n)
        if g != 1:
            raise ValueError("moduli must be pairwise coprime")
        x = (x + (r - x) * s % n * m) % (m * n)
        m *= n
    return x
