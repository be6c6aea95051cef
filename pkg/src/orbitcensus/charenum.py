"""Characters of (O_E / p_E^n)^x.

A character is an exponent vector (c_1, ..., c_k) against the invariant-factor
generators g_i of the unit group, so theta(g_i) = c_i / d_i in Q/Z. Values are
carried as integers modulo the group exponent D; nothing is floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm

import numpy as np

from .groups import residue_unit_group
from .quadring import (DEFAULT_BUDGET, QuadExt, QuotientRing, epsilon_eval,
                       make_ring, rational_unit_generators)

CHUNK = 1 << 20


class CharacterSpace:
    """The character group of R^x for one quotient ring R."""

    def __init__(self, R: QuotientRing):
        self.R = R
        self.G = R.unit_group
        self.d = np.array(self.G.invariant_factors, dtype=np.int64)
        self.k = len(self.d)
        self.D = self.G.exponent
        self.w = self.D // self.d if self.k else self.d

    # elementary evaluation ------------------------------------------------
    def log(self, code: int) -> np.ndarray:
        return np.array(self.G.log(code), dtype=np.int64)

    def weights_for(self, codes) -> np.ndarray:
        """Matrix W (k x len(codes)) so that exps @ W mod D are the values."""
        if not self.k:
            return np.zeros((0, len(codes)), dtype=np.int64)
        return np.stack([self.log(c) * self.w for c in codes], axis=1)

    def values(self, exps: np.ndarray, codes) -> np.ndarray:
        exps = np.atleast_2d(np.asarray(exps, dtype=np.int64))
        if not len(codes):
            return np.zeros((len(exps), 0), dtype=np.int64)
        if not self.k:
            return np.zeros((len(exps), len(codes)), dtype=np.int64)
        return (exps @ self.weights_for(codes)) % self.D

    def value(self, exps, code: int) -> Fraction:
        return Fraction(int(self.values(np.array(exps), [code])[0, 0]), self.D)

    def order(self, exps: np.ndarray) -> np.ndarray:
        exps = np.atleast_2d(np.asarray(exps, dtype=np.int64))
        if not self.k:
            return np.ones(len(exps), dtype=np.int64)
        return np.lcm.reduce(self.d // np.gcd(self.d, exps), axis=1)

    # filtration and restriction data --------------------------------------
    @cached_property
    def kernel_weights(self) -> list[np.ndarray]:
        return [self.weights_for(self.R.kernel_generators(m)) for m in range(self.R.n)]

    def conductor(self, exps: np.ndarray) -> np.ndarray:
        """Smallest m with theta trivial on ker(R^x -> (O/p^m)^x)."""
        exps = np.atleast_2d(np.asarray(exps, dtype=np.int64))
        cond = np.zeros(len(exps), dtype=np.int64)
        for W in self.kernel_weights:
            if W.shape[1]:
                cond += ((exps @ W) % self.D != 0).any(axis=1)
        return cond

    @cached_property
    def rational_generators(self) -> list[int]:
        return rational_unit_generators(self.R.p)

    @cached_property
    def eps_targets(self) -> np.ndarray:
        E = self.R.E
        half = self.D // 2
        out = []
        for a in self.rational_generators:
            e = epsilon_eval(E, a)
            if e == -1 and self.D % 2:
                out.append(-1)  # unreachable: no character takes the value 1/2
            else:
                out.append(0 if e == 1 else half)
        return np.array(out, dtype=np.int64)

    def restriction_matches_eps(self, exps: np.ndarray) -> np.ndarray:
        codes = [self.R.from_rational(a) for a in self.rational_generators]
        vals = self.values(exps, codes)
        return (vals == self.eps_targets).all(axis=1)

    def rational_image(self) -> set[int]:
        m = self.R.norm_modulus
        return {self.R.from_rational(a) for a in range(1, m + 1) if a % self.R.p}

    # Galois conjugation -----------------------------------------------------
    @cached_property
    def conj_matrix(self) -> np.ndarray:
        gens = self.G.generators
        images = [int(self.R.conj(np.array([g]))[0]) for g in gens]
        return np.stack([self.log(c) for c in images]) if self.k else np.zeros((0, 0), dtype=np.int64)

    def conjugate(self, exps: np.ndarray) -> np.ndarray:
        """Exponents of theta o sigma."""
        exps = np.atleast_2d(np.asarray(exps, dtype=np.int64))
        if not self.k:
            return exps.copy()
        # theta(sigma g_i) = sum_l c_l * log_l(sigma g_i) * w_l / D
        vals = (exps * self.w) @ self.conj_matrix.T % self.D
        if (vals % self.w).any():
            raise ArithmeticError("conjugate character is not integral")
        return vals // self.w

    # norm map -----------------------------------------------------------------
    def norm_characters(self, extra_level: int = 0) -> np.ndarray:
        """Exponent vectors of all phi o Norm that are characters of R^x.

        phi runs over characters of (Z/p^M)^x with M = ceil(n/e) + extra_level;
        with extra_level > 0 the norm of a representative is not well defined
        modulo p^M, so phi o Norm is kept only when it kills 1 + p_E^n."""
        R = self.R
        M = -(-R.n // R.E.e) + extra_level
        mod = R.p**M
        Z = residue_unit_group(mod)
        f = np.array(Z.invariant_factors, dtype=np.int64)
        if not len(f):
            return np.zeros((1, self.k), dtype=np.int64)
        F = Z.exponent

        def zlog(x):
            return np.array(Z.log(x % mod), dtype=np.int64) * (F // f)

        gens_pairs = [R.pair(g) for g in self.G.generators]
        Ng = np.stack([zlog(R.exact_norm(a, b)) for a, b in gens_pairs], axis=1) if self.k else None
        # 1 + pi^j r for n <= j < e*M must map to 0
        basis = [(1, 0), (0, 1)] if R.E.f == 2 else [(1, 0)]
        checks = []
        for j in range(R.n, R.E.e * M):
            pj = R.pi_power(j)
            for r in basis:
                a, b = R._mul_pair(pj, r)
                checks.append(zlog(R.exact_norm(1 + a, b)))
        phis = _grid(f)
        keep = np.ones(len(phis), dtype=bool)
        if checks:
            keep &= ((phis @ np.stack(checks, axis=1)) % F == 0).all(axis=1)
        phis = phis[keep]
        if not self.k:
            return np.zeros((1, 0), dtype=np.int64)
        # value of phi(N(g_i)) as a fraction of F; convert to exponent mod d_i
        num = (phis @ Ng) % F
        scaled = num * self.d
        if (scaled % F).any():
            raise ArithmeticError("phi o Norm is not a character of R^x")
        return np.unique((scaled // F) % self.d, axis=0)

    @cached_property
    def norm_set(self) -> set[tuple[int, ...]]:
        extra = 1 if self.R.p == 2 else 0
        return {tuple(int(v) for v in row) for row in self.norm_characters(extra)}

    def factors_through_norm(self, exps: np.ndarray) -> np.ndarray:
        exps = np.atleast_2d(np.asarray(exps, dtype=np.int64))
        return np.array([tuple(int(v) for v in row) in self.norm_set for row in exps], dtype=bool)

    # enumeration ---------------------------------------------------------------
    def all_characters(self):
        """All exponent vectors, in lexicographic order, in chunks."""
        total = int(np.prod(self.d)) if self.k else 1
        for start in range(0, total, CHUNK):
            idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
            if not self.k:
                yield np.zeros((len(idx), 0), dtype=np.int64)
            else:
                yield np.stack(np.unravel_index(idx, tuple(self.d)), axis=1).astype(np.int64)

    def eps_characters(self) -> np.ndarray:
        """All characters whose restriction to Z_p^x is epsilon_E."""
        if (self.eps_targets < 0).any():
            return np.zeros((0, self.k), dtype=np.int64)
        parts = [c[self.restriction_matches_eps(c)] for c in self.all_characters()]
        return np.concatenate(parts) if parts else np.zeros((0, self.k), dtype=np.int64)

    def character(self, exps) -> "Character":
        return Character(self, tuple(int(c) % int(d) for c, d in zip(exps, self.d)))


def _grid(f: np.ndarray) -> np.ndarray:
    total = int(np.prod(f))
    idx = np.arange(total, dtype=np.int64)
    return np.stack(np.unravel_index(idx, tuple(f)), axis=1).astype(np.int64)


@dataclass(frozen=True)
class Character:
    space: CharacterSpace = field(repr=False, compare=False)
    exps: tuple[int, ...]

    @property
    def order(self) -> int:
        return int(self.space.order(np.array([self.exps]))[0]) if self.exps else 1

    def __call__(self, code: int) -> Fraction:
        return self.space.value(self.exps, code)


@dataclass
class CharOrbit:
    representative: tuple[int, ...]
    size: int
    order: int
    conductor: int
    norm_factoring: bool
    identify_conjugate: bool
    field: str

    def to_dict(self) -> dict:
        return {
            "field": self.field,
            "representative": list(self.representative),
            "size": self.size,
            "order": self.order,
            "conductor": self.conductor,
            "norm_factoring": self.norm_factoring,
            "identify_conjugate": self.identify_conjugate,
        }


def _encode(exps: np.ndarray, d: np.ndarray) -> np.ndarray:
    if not len(d):
        return np.zeros(len(exps), dtype=np.int64)
    return np.ravel_multi_index(tuple(exps.T), tuple(d))


def galois_orbits(space: CharacterSpace, chars: np.ndarray,
                  identify_conjugate: bool = False) -> list[CharOrbit]:
    """Partition a character set under theta ~ theta^k (k prime to the order),
    and also theta ~ theta o sigma when identify_conjugate is set. Each orbit
    is represented by its lexicographically least exponent vector."""
    chars = np.asarray(chars, dtype=np.int64)
    if chars.ndim == 1:
        chars = chars[None, :]
    if not len(chars):
        return []
    chars = np.unique(chars, axis=0) if space.k else chars[:1]
    keys = _encode(chars, space.d)
    present = set(int(x) for x in keys)
    seen: set[int] = set()
    orders = space.order(chars)
    conds = space.conductor(chars)
    norms = space.factors_through_norm(chars)
    out = []
    for row, key, o, c, nf in zip(chars, keys, orders, conds, norms):
        if int(key) in seen:
            continue
        o = int(o)
        ks = np.array([k for k in range(1, o + 1) if gcd(k, o) == 1], dtype=np.int64)
        members = (ks[:, None] * row[None, :]) % space.d if space.k else np.zeros((1, 0), dtype=np.int64)
        if identify_conjugate:
            members = np.vstack([members, space.conjugate(members)])
        mkeys = set(int(x) for x in _encode(members, space.d))
        if not mkeys <= present:
            raise ValueError("character set is not closed under the identifications")
        seen |= mkeys
        out.append(CharOrbit(tuple(int(v) for v in row), len(mkeys), o, int(c), bool(nf),
                             identify_conjugate, space.R.E.label))
    return out


@dataclass
class CharCensus:
    """Orbits of epsilon-restricted characters of one ring, by conductor."""
    E: QuadExt
    n: int
    identify_conjugate: bool
    orbits: list[CharOrbit]

    def primitive(self, m: int | None = None) -> list[CharOrbit]:
        m = self.n if m is None else m
        return [o for o in self.orbits if o.conductor == m]


_SPACES: dict[tuple, CharacterSpace] = {}


def character_space(E: QuadExt, n: int, budget: int = DEFAULT_BUDGET) -> CharacterSpace:
    key = (E, n)
    if key not in _SPACES:
        _SPACES[key] = CharacterSpace(make_ring(E, n, budget=budget))
    return _SPACES[key]


def eps_census(E: QuadExt, n: int, identify_conjugate: bool = False,
               budget: int = DEFAULT_BUDGET) -> CharCensus:
    S = character_space(E, n, budget)
    return CharCensus(E, n, identify_conjugate, galois_orbits(S, S.eps_characters(), identify_conjugate))


def count_primitive_orbits(E: QuadExt, n: int, identify_conjugate: bool = False,
                           budget: int = DEFAULT_BUDGET) -> int:
    return len(eps_census(E, n, identify_conjugate, budget).primitive())


def conductor(R: QuotientRing, theta: Character) -> int:
    return int(theta.space.conductor(np.array([theta.exps]))[0])


def restriction_matches_eps(R: QuotientRing, theta: Character) -> bool:
    return bool(theta.space.restriction_matches_eps(np.array([theta.exps]))[0])


def factors_through_norm(R: QuotientRing, theta: Character) -> bool:
    return bool(theta.space.factors_through_norm(np.array([theta.exps]))[0])


def norm_orbits_by_conductor(E: QuadExt, n: int, budget: int = DEFAULT_BUDGET) -> dict[int, int]:
    """{conductor: number of orbits} of epsilon-restricted characters that
    factor through the norm, among characters of conductor <= n."""
    census = eps_census(E, n, budget=budget)
    out: dict[int, int] = {}
    for o in census.orbits:
        if o.norm_factoring:
            out[o.conductor] = out.get(o.conductor, 0) + 1
    return dict(sorted(out.items()))


def character_lcm(orders) -> int:
    return lcm(1, *orders)


class DirichletSpace:
    """Characters of (Z/p^d)^x, with the same exponent-vector conventions."""

    def __init__(self, p: int, d: int):
        self.p = p
        self.level = d
        self.modulus = p**d
        self.G = residue_unit_group(self.modulus)
        self.d = np.array(self.G.invariant_factors, dtype=np.int64)
        self.k = len(self.d)
        self.D = self.G.exponent
        self.w = self.D // self.d if self.k else self.d

    def _weights(self, xs) -> np.ndarray:
        return np.stack([np.array(self.G.log(x % self.modulus), dtype=np.int64) * self.w
                         for x in xs], axis=1)

    def kernel_generators(self, m: int) -> list[int]:
        """Generators of {x = 1 mod p^m} inside (Z/p^d)^x."""
        if m >= self.level:
            return []
        if m == 0 or (self.p == 2 and m == 1):
            return list(self.G.generators)
        return [(1 + self.p**m) % self.modulus]

    def characters(self) -> np.ndarray:
        if not self.k:
            return np.zeros((1, 0), dtype=np.int64)
        return _grid(self.d)

    def order(self, exps: np.ndarray) -> np.ndarray:
        exps = np.atleast_2d(exps)
        if not self.k:
            return np.ones(len(exps), dtype=np.int64)
        return np.lcm.reduce(self.d // np.gcd(self.d, exps), axis=1)

    def conductor(self, exps: np.ndarray) -> np.ndarray:
        exps = np.atleast_2d(exps)
        cond = np.zeros(len(exps), dtype=np.int64)
        if not self.k:
            return cond
        for m in range(self.level):
            gens = self.kernel_generators(m)
            cond += ((exps @ self._weights(gens)) % self.D != 0).any(axis=1)
        return cond

    def orbits(self, chars: np.ndarray) -> list[tuple[tuple[int, ...], int, int]]:
        """(representative, size, order) of each power-map orbit in chars."""
        chars = np.atleast_2d(np.asarray(chars, dtype=np.int64))
        if not len(chars):
            return []
        if not self.k:
            return [((), 1, 1)]
        chars = np.unique(chars, axis=0)
        seen: set[tuple[int, ...]] = set()
        out = []
        for row, o in zip(chars, self.order(chars)):
            key = tuple(int(v) for v in row)
            if key in seen:
                continue
            o = int(o)
            members = {tuple(int(v) for v in (k * row) % self.d)
                       for k in range(1, o + 1) if gcd(k, o) == 1}
            seen |= members
            out.append((key, len(members), o))
        return out


def primitive_closed_form(E: QuadExt, n: int) -> int | None:
    """Published number of primitive eps-restricted character orbits of
    conductor n, or None where no published row covers (E, n)."""
    from .arith import sigma0
    from .quadring import is_q3_sqrt_m3
    p = E.p
    if n < 1:
        return None
    if E.e == 1:
        if p != 2:
            return sigma0(p + 1)
        return 4 if n >= 3 else None
    if p != 2:
        if n == 1:
            return 1
        if is_q3_sqrt_m3(E):
            return 1 if n == 2 else (0 if n % 2 else 3)
        return 0 if n % 2 else 1
    if E.delta == 2:
        if n in (3, 4):
            return 1
        return (0 if n % 2 else 2) if n >= 6 else None
    if n == 5:
        return 3
    return (0 if n % 2 else 1) if n >= 6 else None


def normmap_closed_form(E: QuadExt) -> dict[int, int]:
    """Published {conductor: orbit count} of eps-restricted characters of the
    form phi o Norm. The trivial character only qualifies when eps_E is
    trivial on units, i.e. for unramified E."""
    p = E.p
    if E.e == 1:
        return {0: 1, 2: 1, 3: 2} if p == 2 else {0: 1, 1: 1}
    if p != 2:
        return {1: 1} if p % 4 == 1 else {}
    return {5: 2} if E.d in (2, -6) else {}
