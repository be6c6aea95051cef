from math import gcd

import pytest
from hypothesis import given, strategies as st

from orbitcensus.arith import ArithError
from orbitcensus.bound import CAVEAT, bound, is_rigorous


def _rigorous_oracle(N):
    # trial division: prime power or squarefree
    exps, m, q = [], N, 2
    while q * q <= m:
        e = 0
        while m % q == 0:
            m //= q
            e += 1
        if e:
            exps.append(e)
        q += 1
    if m > 1:
        exps.append(1)
    return len(exps) <= 1 or max(exps) == 1


def test_examples():
    r = bound(256)
    assert (r.bound, r.rigorous, r.factorization, r.per_prime_lo) == (10, True, [(2, 8)], [10])
    assert bound(1).bound == 1 and bound(1).rigorous
    r = bound(30)
    assert (r.bound, r.per_prime_lo, r.rigorous) == (8, [2, 2, 2], True)


def test_rejects_zero():
    with pytest.raises(ArithError):
        bound(0)


def test_caveat_for_mixed_level():
    r = bound(11**2 * 31**2)
    assert not r.rigorous
    assert r.notes == [CAVEAT]
    assert r.bound == r.per_prime_lo[0] * r.per_prime_lo[1]


@pytest.mark.parametrize("q", [2, 3, 5, 7, 11, 13, 97])
def test_primes(q):
    assert bound(q).bound == 2


def test_rigorous_flag_exhaustive():
    for N in range(1, 10_001):
        assert is_rigorous(N) == _rigorous_oracle(N), N


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_multiplicative(a, b):
    if gcd(a, b) != 1:
        b = b // gcd(a, b) or 1
        while gcd(a, b) != 1:
            b //= gcd(a, b)
    assert bound(a * b).bound == bound(a).bound * bound(b).bound


def test_to_dict_round_trip():
    d = bound(256).to_dict()
    assert d == {"N": 256, "factorization": [[2, 8]], "per_prime_lo": [10], "bound": 10,
                 "rigorous": True, "notes": []}
