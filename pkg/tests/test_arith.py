import math
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tracezero.arith import (
    bezout_triple_target,
    crt,
    ext_gcd,
    factor_product,
    factorize,
    is_prime,
    mod_inv,
    mod_sqrt,
    primes_in_range,
)
from tracezero.errors import EvenModulus, NonInvertible, NotDivisible


def _spf_sieve(n):
    spf = list(range(n + 1))
    for i in range(2, math.isqrt(n) + 1):
        if spf[i] == i:
            for j in range(i * i, n + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


def test_ext_gcd_examples():
    assert ext_gcd(7, 0) == (7, 1, 0)
    assert ext_gcd(-7, 0) == (7, -1, 0)
    g, x, y = ext_gcd(12, 8)
    assert g == 4 and 12 * x + 8 * y == 4
    assert ext_gcd(1, 99) == (1, 1, 0)


@given(st.integers(-10**30, 10**30), st.integers(-10**30, 10**30))
def test_ext_gcd_identity(a, b):
    g, x, y = ext_gcd(a, b)
    assert g >= 0 and a * x + b * y == g
    if g:
        assert a % g == 0 and b % g == 0
    assert g == math.gcd(a, b)


def test_bezout_examples():
    for alpha in [(1, 7, 9), (2, 3, 5), (4, 6, 9), (1, 1, 1), (6, 10, 15)]:
        a = bezout_triple_target(alpha, 3)
        assert sum(x * y for x, y in zip(alpha, a)) == 3
    assert bezout_triple_target((1, 1, 1), 3) in {(1, 1, 1)}
    with pytest.raises(NotDivisible):
        bezout_triple_target((2, 4, 6), 3)
    with pytest.raises(ValueError):
        bezout_triple_target((0, 1, 1), 3)


@given(st.tuples(*[st.integers(1, 10**6)] * 3), st.integers(-50, 50))
def test_bezout_identity(alpha, k):
    target = 3 * math.gcd(*alpha) * k
    a = bezout_triple_target(alpha, target)
    assert sum(x * y for x, y in zip(alpha, a)) == target


@given(st.tuples(*[st.integers(1, 10**6)] * 3))
def test_bezout_coefficients_stay_small(alpha):
    if math.gcd(*alpha) != 1:
        return
    a = bezout_triple_target(alpha, 3)
    assert max(map(abs, a)) <= max(alpha)


def test_mod_inv_examples():
    assert mod_inv(1, 101) == 1
    assert mod_inv(3, 7) == 5
    assert mod_inv(100, 101) == 100
    with pytest.raises(NonInvertible):
        mod_inv(0, 7)


@pytest.mark.parametrize("p", [3, 5, 7, 13, 17, 97, 257, 65537])
def test_mod_sqrt_exhaustive(p):
    squares = {}
    for r in range(p):
        squares.setdefault(r * r % p, set()).add(r)
    for a in range(p):
        r = mod_sqrt(a, p)
        if a in squares:
            assert r in squares[a] and r == min(r, p - r)
        else:
            assert r is None


def test_mod_sqrt_examples():
    assert mod_sqrt(0, 11) == 0
    assert mod_sqrt(2, 7) == 3
    assert mod_sqrt(3, 7) is None
    with pytest.raises(EvenModulus):
        mod_sqrt(1, 2)


@given(st.integers(1, 2**61), st.sampled_from([2**61 - 1, 10**9 + 7, 998244353, 1000000009]))
def test_mod_sqrt_of_square(a, p):
    a %= p
    assert mod_sqrt(a * a, p) in {a, p - a}
    if a:
        assert a * mod_inv(a, p) % p == 1


def test_factorize_examples():
    assert factorize(1) == ()
    assert factorize(5077) == ((5077, 1),)
    assert factorize(10) == ((2, 1), (5, 1))


def test_factorize_exhaustive_to_a_million():
    spf = _spf_sieve(10**6)
    for n in range(1, 10**6 + 1):
        f = factorize(n)
        m, expected = n, []
        while m > 1:
            q, e = spf[m], 0
            while m % q == 0:
                m //= q
                e += 1
            expected.append((q, e))
        assert f == tuple(expected), n


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2**63))
def test_factorize_large(n):
    f = factorize(n)
    assert factor_product(f) == n
    assert [q for q, _ in f] == sorted({q for q, _ in f})
    assert all(is_prime(q) for q, _ in f)
    assert dict(f) == sympy.factorint(n)


def test_factorize_hard_semiprimes():
    rng = random.Random(5)
    for _ in range(5):
        a = sympy.nextprime(rng.randrange(2**29, 2**31))
        b = sympy.nextprime(rng.randrange(2**29, 2**31))
        assert factorize(a * b) == tuple(sorted(sympy.factorint(a * b).items()))
    assert factorize(4294967291**2) == ((4294967291, 2),)


def test_is_prime_against_sieve_and_sympy():
    table = set(primes_in_range(2, 10**5))
    assert all(is_prime(n) == (n in table) for n in range(10**5 + 1))
    rng = random.Random(11)
    for _ in range(2000):
        n = rng.randrange(2**40, 2**64)
        assert is_prime(n) == sympy.isprime(n)
    # strong pseudoprimes to several small bases
    for n in (3215031751, 2152302898747, 3474749660383, 341550071728321, 3825123056546413051):
        assert not is_prime(n)


def test_primes_in_range():
    assert len(primes_in_range(2, 100)) == 25
    assert primes_in_range(5077, 5077) == [5077]
    assert primes_in_range(10, 9) == []
    with pytest.raises(ValueError):
        primes_in_range(2, 2**62 + 1)


def test_crt():
    assert crt([2, 3], [3, 5]) == 8
    assert crt([], []) == 0
