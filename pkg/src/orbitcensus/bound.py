"""Lower bound for the number of Galois orbits of non-CM newforms of level N:
the product over q | N of LO(q^v), v = v_q(N)."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Any

from .arith import ArithError, factor
from .signcensus import lo_closed_form

CAVEAT = ("N is neither a prime power nor squarefree. Local orbits at different "
          "primes can be linked through a shared coefficient field, so the product is "
          "not a proven lower bound for NCM(N, k).")


@dataclass
class BoundReport:
    N: int
    factorization: list[tuple[int, int]]
    per_prime_lo: list[int]
    bound: int
    rigorous: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "factorization": [[q, v] for q, v in self.factorization],
            "per_prime_lo": self.per_prime_lo,
            "bound": self.bound,
            "rigorous": self.rigorous,
            "notes": self.notes,
        }


def is_rigorous(N: int) -> bool:
    fac = factor(N)
    return len(fac) <= 1 or all(v == 1 for _, v in fac)


def bound(N: int) -> BoundReport:
    if N < 1:
        raise ArithError(f"level must be positive, got {N}")
    fac = factor(N)
    lo = [lo_closed_form(q, v) for q, v in fac]
    rigorous = is_rigorous(N)
    notes = [] if rigorous else [CAVEAT]
    return BoundReport(N, fac, lo, prod(lo), rigorous, notes)
