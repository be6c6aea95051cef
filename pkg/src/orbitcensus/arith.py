"""Elementary exact number theory: divisor counts, valuations, Legendre and
Hilbert symbols, and the quadratic character attached to an extension of Q_p.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import factorint, isprime

MAX_LEVEL = 2**64


class ArithError(ValueError):
    pass


def check_prime(p: int) -> int:
    if p < 2 or p >= MAX_LEVEL or not isprime(p):
        raise ArithError(f"{p} is not a prime below 2^64")
    return p


@dataclass(frozen=True)
class PrimePower:
    p: int
    n: int

    def __post_init__(self):
        check_prime(self.p)
        if self.n < 0:
            raise ArithError(f"negative exponent {self.n}")

    @property
    def value(self) -> int:
        return self.p**self.n

    def __str__(self):
        return f"{self.p}^{self.n}"


def factor(N: int) -> list[tuple[int, int]]:
    """Sorted list of (prime, exponent) pairs; N = 1 gives []."""
    if N < 1:
        raise ArithError(f"cannot factor {N}")
    if N >= MAX_LEVEL:
        raise ArithError(f"{N} exceeds 64 bits")
    return sorted(factorint(N).items())


def sigma0(a: int) -> int:
    if a < 1:
        raise ArithError(f"sigma0 needs a positive integer, got {a}")
    out = 1
    for _, e in factor(a):
        out *= e + 1
    return out


def valuation(x: int, p: int) -> int:
    if x == 0:
        raise ArithError("valuation of 0")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def unit_part(x: int, p: int) -> tuple[int, int]:
    """Write x = p^v * u with p not dividing u."""
    v = valuation(x, p)
    return v, x // p**v


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for odd prime p, in {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def smallest_nonresidue(p: int) -> int:
    for u in range(2, p):
        if legendre(u, p) == -1:
            return u
    raise ArithError(f"no non-residue mod {p}")


def primitive_root(m: int) -> int:
    """Smallest generator of (Z/m)^x for m = p^k with p odd, or m in {2, 4}."""
    if m in (2, 4):
        return m - 1
    (p, _), = factor(m)
    if p == 2:
        raise ArithError(f"(Z/{m})^x is not cyclic")
    phi = m // p * (p - 1)
    qs = [q for q, _ in factor(phi)]
    for g in range(2, m):
        if gcd(g, p) == 1 and all(pow(g, phi // q, m) != 1 for q in qs):
            return g
    raise ArithError(f"no primitive root mod {m}")


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Local Hilbert symbol (a, b)_p for nonzero rational integers a, b."""
    if a == 0 or b == 0:
        raise ArithError("Hilbert symbol of zero")
    check_prime(p)
    alpha, u = unit_part(a, p)
    beta, v = unit_part(b, p)
    if p != 2:
        sign = (-1) ** (alpha * beta * ((p - 1) // 2))
        return sign * legendre(u, p) ** beta * legendre(v, p) ** alpha

    def eps(x):
        return ((x - 1) // 2) % 2

    def omega(x):
        return ((x * x - 1) // 8) % 2

    e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if e % 2 else 1
