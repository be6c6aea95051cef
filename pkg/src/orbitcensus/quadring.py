"""Quadratic extensions E/Q_p and the finite rings O_E / p_E^n.

Elements of O_E are written a + b*beta with beta^2 = T*beta - M. The ideal
p_E^n is a full-rank sublattice of Z^2 kept in Hermite normal form with basis
(Da, 0), (s, Db); canonical representatives have 0 <= a < Da, 0 <= b < Db and
are encoded as the integer a*Db + b, so code order is lexicographic on (a, b).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod

import numpy as np

from .arith import (ArithError, check_prime, hilbert_symbol, legendre,
                    primitive_root, smallest_nonresidue, unit_part)
from .groups import AbelianGroup, CapacityError, vpow

DEFAULT_BUDGET = 2_000_000

P2_FIELDS = (-3, -1, 3, 2, -2, 6, -6)


class UnsupportedError(ValueError):
    pass


@dataclass(frozen=True)
class QuadExt:
    p: int
    d: int
    e: int
    f: int
    delta: int
    cond_eps: int

    @property
    def ramified(self) -> bool:
        return self.e == 2

    @property
    def label(self) -> str:
        if self.e == 1:
            return f"Q{self.p}(unr)"
        return f"Q{self.p}(sqrt({self.d}))"

    def __str__(self):
        return self.label


def normalize_d(p: int, d: int) -> int:
    """Canonical representative of the square class of d in Q_p."""
    if d == 0:
        raise ArithError("d must be nonzero")
    v, u = unit_part(d, p)
    v %= 2
    if p == 2:
        r = u % 8
        if v == 0:
            table = {1: None, 3: 3, 5: -3, 7: -1}
        else:
            table = {1: 2, 3: 6, 5: -6, 7: -2}
        out = table[r]
    else:
        unit = 1 if legendre(u, p) == 1 else smallest_nonresidue(p)
        out = None if (v == 0 and unit == 1) else (unit if v == 0 else p * unit)
    if out is None:
        raise ArithError(f"{d} is a square in Q_{p}")
    return out


def quad_ext(p: int, d: int) -> QuadExt:
    """E = Q_p(sqrt(d)) with d normalized to the canonical representative."""
    check_prime(p)
    d = normalize_d(p, d)
    if p == 2:
        if d == -3:
            return QuadExt(2, d, 1, 2, 0, 0)
        delta = 2 if d in (-1, 3) else 3
        return QuadExt(2, d, 2, 1, delta, delta)
    if d % p:
        return QuadExt(p, d, 1, 2, 0, 0)
    return QuadExt(p, d, 2, 1, 1, 1)


def extensions(p: int) -> list[QuadExt]:
    """All quadratic extensions of Q_p, unramified first."""
    if p == 2:
        return [quad_ext(2, d) for d in P2_FIELDS]
    u = smallest_nonresidue(p)
    return [quad_ext(p, u), quad_ext(p, p), quad_ext(p, p * u)]


def unramified(p: int) -> QuadExt:
    return extensions(p)[0]


def is_q3_sqrt_m3(E: QuadExt) -> bool:
    return E.p == 3 and E.e == 2 and normalize_d(3, -3) == E.d


def epsilon_eval(E: QuadExt, x: int) -> int:
    """Value of the quadratic character of Q_p^x cut out by E at x."""
    if x % E.p == 0 and x != E.p:
        raise ArithError(f"{x} is neither a unit nor p")
    return hilbert_symbol(x, E.d, E.p)


def default_poly(E: QuadExt) -> tuple[int, int]:
    """(T, M) with beta^2 = T*beta - M and Z_p[beta] = O_E."""
    if E.p == 2 and E.e == 1:
        return (-1, 1)  # beta = zeta_3
    return (0, -E.d)


def _uniformizer(E: QuadExt) -> tuple[int, int]:
    if E.e == 1:
        return (E.p, 0)
    if E.p == 2 and E.delta == 2:
        return (1, 1)
    return (0, 1)


def _hnf(vectors: list[tuple[int, int]]) -> tuple[int, int, int]:
    """(Da, Db, s) with the lattice spanned by the vectors equal to
    Z*(Da, 0) + Z*(s, Db), 0 <= s < Da."""
    g, x = 0, (0, 0)
    for v in vectors:
        if v[1] == 0:
            continue
        d, s, t = _xgcd(g, v[1])
        x = (s * x[0] + t * v[0], d)
        g = d
    if g < 0:
        g, x = -g, (-x[0], -x[1])
    if g == 0:
        raise ArithError("degenerate lattice")
    da = 0
    for v in vectors:
        da = gcd(da, v[0] - (v[1] // g) * x[0])
    if da == 0:
        raise ArithError("degenerate lattice")
    return da, g, x[0] % da


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class QuotientRing:
    """O_E / p_E^n with vectorized arithmetic on integer codes."""

    def __init__(self, E: QuadExt, n: int, poly: tuple[int, int] | None = None,
                 budget: int = DEFAULT_BUDGET):
        if n < 1:
            raise ValueError("level must be >= 1")
        size = E.p ** (E.f * n)
        if size > budget:
            raise CapacityError(f"|O_E/p^{n}| = {size} exceeds budget {budget} for {E}")
        self.E = E
        self.n = n
        self.p = E.p
        self.T, self.M = poly if poly is not None else default_poly(E)
        self._check_poly()
        self.pi = _uniformizer(E)
        gens = self._ideal_generators(n)
        self.Da, self.Db, self.s = _hnf(gens)
        if self.Da * self.Db != size:
            raise ArithError("ideal lattice has wrong index")
        for g in [(self.Da, 0), (self.s, self.Db)]:
            if self.reduce_pair(*self._mul_pair(g, (0, 1))) != (0, 0):
                raise ArithError("ideal lattice not closed under beta")
        self.size = size
        self.norm_modulus = E.p ** -(-n // E.e)

    def _check_poly(self):
        E = self.E
        disc = self.T * self.T - 4 * self.M
        if E.p == 2 and E.e == 1:
            if (self.T % 2, self.M % 2) != (1, 1):
                raise ArithError("beta does not generate the unramified ring of integers")
            if normalize_d(2, disc) != E.d:
                raise ArithError("polynomial does not define E")
            return
        if normalize_d(E.p, disc) != E.d:
            raise ArithError("polynomial does not define E")
        if E.e == 1 and unit_part(disc, E.p)[0] != 0:
            raise ArithError("beta does not generate O_E")
        if E.e == 2 and (self.T, self.M) != (0, -E.d):
            raise ArithError("ramified rings use beta = sqrt(d)")

    def _mul_pair(self, x, y):
        a1, b1 = x
        a2, b2 = y
        return (a1 * a2 - b1 * b2 * self.M, a1 * b2 + a2 * b1 + b1 * b2 * self.T)

    def _ideal_generators(self, n):
        x = (1, 0)
        for _ in range(n):
            x = self._mul_pair(x, self.pi)
        # p^n lies in p_E^n; adding it strips non-p factors of the norm of pi
        pn = self.p**n
        return [x, self._mul_pair(x, (0, 1)), (pn, 0), (0, pn)]

    def reduce_pair(self, a: int, b: int) -> tuple[int, int]:
        t = b // self.Db
        b -= t * self.Db
        a = (a - t * self.s) % self.Da
        return a, b

    # codes ---------------------------------------------------------------
    def code(self, a: int, b: int = 0) -> int:
        a, b = self.reduce_pair(a, b)
        return a * self.Db + b

    def pair(self, code: int) -> tuple[int, int]:
        return divmod(int(code), self.Db)

    def reduce_arrays(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        t = B // self.Db
        B = B - t * self.Db
        A = (A - t * self.s) % self.Da
        return A * self.Db + B

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        a1, b1 = np.divmod(x, self.Db)
        a2, b2 = np.divmod(y, self.Db)
        bb = b1 * b2
        A = a1 * a2 - bb * self.M
        B = a1 * b2 + a2 * b1 + bb * self.T
        return self.reduce_arrays(A, B)

    def add(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        a1, b1 = np.divmod(x, self.Db)
        a2, b2 = np.divmod(y, self.Db)
        return self.reduce_arrays(a1 + a2, b1 + b2)

    def conj(self, x: np.ndarray) -> np.ndarray:
        a, b = np.divmod(x, self.Db)
        return self.reduce_arrays(a + b * self.T, -b)

    def norm(self, x: np.ndarray) -> np.ndarray:
        """Norm to Z / p^ceil(n/e)."""
        a, b = np.divmod(np.asarray(x, dtype=np.int64), self.Db)
        return (a * a + a * b * self.T + b * b * self.M) % self.norm_modulus

    def exact_norm(self, a: int, b: int) -> int:
        return a * a + a * b * self.T + b * b * self.M

    def one(self) -> int:
        return self.code(1, 0)

    def from_rational(self, a: int) -> int:
        return self.code(a, 0)

    def reduce_code_to(self, code: int, other: "QuotientRing") -> int:
        """Image of an element under O/p^n -> O/p^m (other has level m <= n)."""
        if other.E != self.E or (other.T, other.M) != (self.T, self.M):
            raise ValueError("rings over different extensions")
        if other.n > self.n:
            raise ValueError("can only reduce to a lower level")
        return other.code(*self.pair(code))

    def pi_power(self, j: int) -> tuple[int, int]:
        x = (1, 0)
        for _ in range(j):
            x = self._mul_pair(x, self.pi)
        return x

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def is_unit(self, x: np.ndarray) -> np.ndarray:
        return self.norm(x) % self.p != 0

    def units(self) -> np.ndarray:
        x = self.elements()
        return x[self.is_unit(x)]

    def one_units(self) -> np.ndarray:
        """Codes of 1 + pi*O, enumerated directly as 1 + pi*y."""
        if self.n == 1:
            return np.array([self.one()], dtype=np.int64)
        sub = QuotientRing(self.E, self.n - 1, (self.T, self.M), budget=self.size)
        ys = sub.elements()
        ya, yb = np.divmod(ys, sub.Db)
        pa, pb = self.pi
        A = 1 + ya * pa - yb * pb * self.M
        B = ya * pb + yb * pa + yb * pb * self.T
        return np.unique(self.reduce_arrays(A, B))

    def residue_reps(self) -> np.ndarray:
        """Codes of unit representatives a + b*beta of the residue field."""
        if self.E.f == 2:
            pts = [(a, b) for a in range(self.p) for b in range(self.p)]
        else:
            pts = [(a, 0) for a in range(self.p)]
        codes = np.array([self.code(a, b) for a, b in pts], dtype=np.int64)
        return codes[self.is_unit(codes)]

    @cached_property
    def unit_group(self) -> AbelianGroup:
        """R^x = (Teichmuller lifts of F_q^x) x (1-units), by brute force."""
        one_units = self.one_units()
        s = len(one_units)
        teich = np.unique(vpow(self.mul, self.residue_reps(), s, self.one()))
        q1 = self.p**self.E.f - 1
        if len(teich) != q1:
            raise ArithError("Teichmuller subgroup has wrong size")
        from .groups import sylow_by_powering
        sylows = sylow_by_powering(self.mul, teich, q1, self.one()) if q1 > 1 else {}
        sylows[self.p] = one_units
        return AbelianGroup.from_sylows(self.mul, self.one(), sylows)

    def unit_count(self) -> int:
        return int(np.count_nonzero(self.is_unit(self.elements())))

    def kernel_generators(self, m: int) -> list[int]:
        """Generators of ker(R^x -> (O/p^m)^x): 1 + pi^j r over m <= j < n."""
        if m <= 0:
            return list(self.unit_group.generators)
        basis = [(1, 0), (0, 1)] if self.E.f == 2 else [(1, 0)]
        out = []
        for j in range(m, self.n):
            pj = self.pi_power(j)
            for r in basis:
                a, b = self._mul_pair(pj, r)
                out.append(self.code(1 + a, b))
        return out

    def __repr__(self):
        return f"QuotientRing({self.E}, n={self.n}, moduli=({self.Da}, {self.Db}))"


def make_ring(E: QuadExt, n: int, poly=None, budget: int = DEFAULT_BUDGET) -> QuotientRing:
    return QuotientRing(E, n, poly, budget)


@dataclass
class AbGroupStructure:
    invariant_factors: list[int]
    generators: list[tuple[int, int]] | None = None

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)


def unit_group(R: QuotientRing) -> AbGroupStructure:
    G = R.unit_group
    return AbGroupStructure(list(G.invariant_factors), [R.pair(g) for g in G.generators])


def invariant_factors(cyclic_orders: list[int]) -> list[int]:
    """Invariant factors of a product of cyclic groups of the given orders."""
    from .arith import factor
    primary: dict[int, list[int]] = {}
    for c in cyclic_orders:
        if c <= 1:
            continue
        for ell, a in factor(c):
            primary.setdefault(ell, []).append(ell**a)
    k = max((len(v) for v in primary.values()), default=0)
    cols = [1] * k
    for v in primary.values():
        v.sort(reverse=True)
        for j, x in enumerate(v):
            cols[j] *= x
    return sorted(cols)


def _ab(n: int) -> tuple[int, int]:
    b = (n - 1) // 2
    return n - 1 - b, b


def predicted_structure(E: QuadExt, n: int) -> AbGroupStructure:
    """Closed-form structure of (O_E/p_E^n)^x as a list of cyclic orders,
    returned as invariant factors."""
    if n < 1:
        raise UnsupportedError("level must be >= 1")
    p = E.p
    q = p**E.f
    if n == 1:
        return AbGroupStructure(invariant_factors([q - 1]))
    a, b = _ab(n)
    if E.e == 1:
        if p != 2:
            cyc = [q - 1, p ** (n - 1), p ** (n - 1)]
        else:
            cyc = [3, 2, 2 ** (n - 2), 2 ** (n - 1)]
    elif p != 2:
        if is_q3_sqrt_m3(E):
            cyc = [2, 3, 3 ** (a - 1), 3**b]
        else:
            cyc = [p - 1, p**a, p**b]
    elif E.d == -1:
        if n == 2:
            cyc = [2]
        else:
            cyc = [4, 2 ** (b - 1), 2 ** (a - 1)]
    elif n == 2:
        cyc = [2]
    elif n == 3:
        cyc = [4]
    elif n == 4:
        cyc = [4, 2]
    elif E.d == 3:
        cyc = [2, 2 ** (a - 1), 2**b]
    else:
        cyc = [2, 2 ** (b - 1), 2**a]
    return AbGroupStructure(invariant_factors(cyc))


def rational_unit_generators(p: int) -> list[int]:
    """Integers generating Z_p^x topologically."""
    if p == 2:
        return [-1, 5]
    return [primitive_root(p * p)]
