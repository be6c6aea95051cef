"""Brute-force structure of finite abelian groups.

A group is handed over as integer codes for its elements together with a
vectorized multiplication on numpy arrays of codes. From that we recover

* the structure of each Sylow subgroup from torsion counts,
* an explicit basis of each Sylow subgroup (greedy lifting), and
* invariant factors with generators, plus discrete logarithms.

Everything is exact; the only numerics are int64 arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, lcm, prod
from typing import Callable

import numpy as np

from .arith import factor

Mul = Callable[[np.ndarray, np.ndarray], np.ndarray]


class CapacityError(RuntimeError):
    """Raised when an enumeration would exceed the configured budget."""


def vpow(mul: Mul, x: np.ndarray, e: int, identity: int) -> np.ndarray:
    """Elementwise x**e for e >= 0 by square and multiply."""
    x = np.asarray(x, dtype=np.int64)
    result = np.full_like(x, identity)
    base = x
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def spow(mul: Mul, x: int, e: int, identity: int) -> int:
    return int(vpow(mul, np.array([x], dtype=np.int64), e, identity)[0])


def torsion_structure(mul: Mul, elements: np.ndarray, p: int, identity: int) -> list[int]:
    """Exponents m_i (descending) with P = prod Z/p^m_i, from the counts
    t_k = #{x : x^(p^k) = 1}, which pin down a finite abelian p-group."""
    y = np.asarray(elements, dtype=np.int64)
    counts = [int(np.count_nonzero(y == identity))]
    while counts[-1] < len(y):
        y = vpow(mul, y, p, identity)
        counts.append(int(np.count_nonzero(y == identity)))
    # ranks[k-1] = number of cyclic factors of order >= p^k
    ranks = []
    for k in range(1, len(counts)):
        ratio = counts[k] // counts[k - 1]
        if ratio * counts[k - 1] != counts[k]:
            raise ArithmeticError("torsion counts are not a p-group profile")
        r = 0
        while ratio > 1:
            if ratio % p:
                raise ArithmeticError("torsion counts are not powers of p")
            ratio //= p
            r += 1
        ranks.append(r)
    exps = []
    for k in range(len(ranks), 0, -1):
        nxt = ranks[k] if k < len(ranks) else 0
        exps.extend([k] * (ranks[k - 1] - nxt))
    return exps


@dataclass
class PGroupBasis:
    """Basis g_1..g_k of an abelian p-group with orders p^m_1 >= ... >= p^m_k,
    and a table code -> coordinates for every element of the group."""
    p: int
    exps: list[int]
    gens: list[int]
    table: dict[int, tuple[int, ...]]

    @property
    def orders(self) -> list[int]:
        return [self.p**m for m in self.exps]


def pgroup_basis(mul: Mul, elements: np.ndarray, p: int, identity: int) -> PGroupBasis:
    """Greedy basis: repeatedly take an element of maximal order modulo the
    subgroup H built so far, then correct it by a p^m-th root inside H so its
    order equals its order modulo H (possible because of the maximal choice)."""
    elements = np.sort(np.asarray(elements, dtype=np.int64))
    total = len(elements)
    h_codes = np.array([identity], dtype=np.int64)
    h_coords = np.zeros((1, 0), dtype=np.int64)
    gens: list[int] = []
    exps: list[int] = []
    while len(h_codes) < total:
        member = np.isin(elements, h_codes)
        level = np.where(member, 0, -1)
        y = elements
        j = 0
        while (level < 0).any():
            y = vpow(mul, y, p, identity)
            j += 1
            hit = (level < 0) & np.isin(y, h_codes)
            level[hit] = j
        m = int(level.max())
        x = int(elements[int(np.argmax(level == m))])
        pm = p**m
        h = spow(mul, x, pm, identity)
        pos = int(np.flatnonzero(h_codes == h)[0])
        coeffs = h_coords[pos]
        g = x
        for gi, ci, mi in zip(gens, coeffs, exps):
            if ci % pm:
                raise ArithmeticError("greedy lift failed: coordinate not divisible")
            g = mul(np.array([g]), np.array([spow(mul, gi, (-(int(ci) // pm)) % p**mi, identity)]))[0]
            g = int(g)
        if spow(mul, g, pm, identity) != identity:
            raise ArithmeticError("lifted generator has wrong order")
        new_codes = [h_codes]
        new_coords = [np.hstack([h_coords, np.zeros((len(h_codes), 1), dtype=np.int64)])]
        cur = h_codes
        for t in range(1, pm):
            cur = mul(cur, np.full_like(cur, g))
            new_codes.append(cur)
            col = np.full((len(cur), 1), t, dtype=np.int64)
            new_coords.append(np.hstack([h_coords, col]))
        h_codes = np.concatenate(new_codes)
        h_coords = np.vstack(new_coords)
        if len(np.unique(h_codes)) != len(h_codes):
            raise ArithmeticError("generator intersects the span of previous ones")
        gens.append(g)
        exps.append(m)
    table = {int(c): tuple(int(v) for v in row) for c, row in zip(h_codes, h_coords)}
    return PGroupBasis(p, exps, gens, table)


@dataclass
class AbelianGroup:
    """Finite abelian group with invariant factors d_1 | ... | d_k, generators
    realizing them, and a discrete log into Z/d_1 x ... x Z/d_k."""
    order: int
    invariant_factors: list[int]
    generators: list[int]
    mul: Mul = field(repr=False)
    identity: int = field(repr=False)
    sylow: dict[int, PGroupBasis] = field(repr=False, default_factory=dict)
    torsion_exps: dict[int, list[int]] = field(repr=False, default_factory=dict)

    @classmethod
    def from_sylows(cls, mul: Mul, identity: int, sylows: dict[int, np.ndarray]) -> "AbelianGroup":
        bases = {}
        tors = {}
        for ell, elems in sorted(sylows.items()):
            if len(elems) == 1:
                continue
            tors[ell] = torsion_structure(mul, elems, ell, identity)
            bases[ell] = pgroup_basis(mul, elems, ell, identity)
            if sorted(bases[ell].exps, reverse=True) != tors[ell]:
                raise ArithmeticError(f"basis and torsion counts disagree at {ell}")
        k = max((len(b.exps) for b in bases.values()), default=0)
        factors = []
        gens = []
        # column j (0 = largest) of every Sylow basis merges into one factor
        for j in range(k):
            d = 1
            g = identity
            for b in bases.values():
                if j < len(b.exps):
                    d *= b.orders[j]
                    g = int(mul(np.array([g]), np.array([b.gens[j]]))[0])
            factors.append(d)
            gens.append(g)
        factors.reverse()
        gens.reverse()
        order = prod(factors) if factors else 1
        return cls(order, factors, gens, mul, identity, bases, tors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def power(self, x: int, e: int) -> int:
        return spow(self.mul, x, e % self.exponent if self.exponent > 1 else 0, self.identity)

    def times(self, x: int, y: int) -> int:
        return int(self.mul(np.array([x]), np.array([y]))[0])

    def element(self, coords) -> int:
        x = self.identity
        for g, c in zip(self.generators, coords):
            x = self.times(x, self.power(g, int(c)))
        return x

    def log(self, x: int) -> tuple[int, ...]:
        """Coordinates of x with respect to the invariant-factor generators."""
        n = self.order
        k = len(self.invariant_factors)
        coords = [0] * k
        moduli = [1] * k
        for ell, b in self.sylow.items():
            la = prod(b.orders)
            rest = n // la
            # x^(rest * inv(rest)) is the ell-component of x
            idem = rest * pow(rest, -1, la)
            xl = self.power(x, idem)
            try:
                c = b.table[xl]
            except KeyError:
                raise ValueError(f"{x} is not an element of the group") from None
            for j, (cj, oj) in enumerate(zip(c, b.orders)):
                col = k - 1 - j
                coords[col], moduli[col] = _crt(coords[col], moduli[col], cj, oj)
        if self.element(coords) != x:
            raise ValueError(f"{x} is not an element of the group")
        return tuple(coords)

    def element_order(self, x: int) -> int:
        c = self.log(x)
        return lcm(1, *(d // gcd(d, ci) for d, ci in zip(self.invariant_factors, c)))


def _crt(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    m = m1 * m2
    t = ((r2 - r1) * pow(m1, -1, m2)) % m2
    return (r1 + m1 * t) % m, m


def sylow_by_powering(mul: Mul, elements: np.ndarray, order: int, identity: int) -> dict[int, np.ndarray]:
    """Sylow subgroups as images of x -> x^(order / ell^a); fine for small groups."""
    out = {}
    for ell, a in factor(order):
        out[ell] = np.unique(vpow(mul, elements, order // ell**a, identity))
    return out


def residue_unit_group(m: int) -> AbelianGroup:
    """(Z/m)^x by brute force; codes are the residues themselves."""
    if m < 1:
        raise ValueError("modulus must be positive")
    elems = np.array([a for a in range(m) if gcd(a, m) == 1], dtype=np.int64)
    if m == 1:
        elems = np.array([0], dtype=np.int64)

    def mul(x, y):
        return (x * y) % m

    ident = 1 % m
    return AbelianGroup.from_sylows(mul, ident, sylow_by_powering(mul, elems, len(elems), ident))
