"""Grid audit: unit-group structures, primitive-character counts, norm-factoring
characters, type counts and LO values, each compared with its closed form."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from sympy import primerange

from .charenum import (count_primitive_orbits, norm_orbits_by_conductor, normmap_closed_form,
                       primitive_closed_form)
from .discrepancies import lookup
from .groups import CapacityError
from .quadring import DEFAULT_BUDGET, extensions, make_ring, predicted_structure, unit_group
from .signcensus import census_audit_lo
from .typecensus import CENSUS_BUDGET, census_audit_lt

GRID_PRIMES = (2, 3, 5, 7, 13)
NMAX_ODD = 6
NMAX_TWO = 9


def grid_primes(pmax: int | None = None) -> list[int]:
    if pmax is None:
        return list(GRID_PRIMES)
    return list(primerange(2, pmax + 1))


def nmax_for(p: int, nmax: int | None) -> int:
    if nmax is not None:
        return nmax
    return NMAX_TWO if p == 2 else NMAX_ODD


@dataclass
class Section:
    name: str
    rows: list[dict[str, Any]] = field(default_factory=list)

    @property
    def unexpected(self) -> list[dict[str, Any]]:
        return [r for r in self.rows if not r["match"] and not r.get("known_discrepancy")]

    @property
    def known(self) -> list[dict[str, Any]]:
        return [r for r in self.rows if not r["match"] and r.get("known_discrepancy")]

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "rows": self.rows,
                "unexpected_mismatches": len(self.unexpected), "known_discrepancies": len(self.known)}


def unit_group_section(primes, nmax=None, budget=DEFAULT_BUDGET) -> Section:
    sec = Section("unit-groups")
    for p in primes:
        for E in extensions(p):
            n = 1
            while nmax is None or n <= nmax:
                try:
                    R = make_ring(E, n, budget=budget)
                except CapacityError:
                    break
                got = unit_group(R).invariant_factors
                want = predicted_structure(E, n).invariant_factors
                sec.rows.append({"field": E.label, "n": n, "computed": got, "predicted": want,
                                 "match": got == want})
                n += 1
    return sec


def primitive_section(primes, nmax=None, budget=CENSUS_BUDGET) -> Section:
    sec = Section("primitive-characters")
    for p in primes:
        for E in extensions(p):
            for n in range(1, nmax_for(p, nmax) + 1):
                want = primitive_closed_form(E, n)
                if want is None:
                    continue
                try:
                    plain = count_primitive_orbits(E, n, False, budget)
                    conj = count_primitive_orbits(E, n, True, budget)
                except CapacityError:
                    break
                settings = [s for s, v in (("power maps", plain), ("power maps + conjugation", conj))
                            if v == want]
                row = {"field": E.label, "n": n, "published": want, "power_maps": plain,
                       "with_conjugation": conj, "identify_conjugate_matching": settings,
                       "match": bool(settings)}
                if not settings:
                    entry = lookup("PRIM", p, n) if E.e == 1 else None
                    row["known_discrepancy"] = entry.key if entry else None
                sec.rows.append(row)
    return sec


def normmap_section(primes, nmax=None, budget=CENSUS_BUDGET) -> Section:
    sec = Section("norm-factoring")
    for p in primes:
        for E in extensions(p):
            expected = normmap_closed_form(E)
            for n in range(1, nmax_for(p, nmax) + 1):
                try:
                    got = norm_orbits_by_conductor(E, n, budget)
                except CapacityError:
                    break
                want = {c: v for c, v in expected.items() if c <= n}
                sec.rows.append({"field": E.label, "n": n, "computed": got, "published": want,
                                 "match": got == want})
    return sec


def lt_section(primes, nmax=None, budget=CENSUS_BUDGET) -> Section:
    sec = Section("LT")
    for p in primes:
        for n in range(0, nmax_for(p, nmax) + 1):
            try:
                a = census_audit_lt(p, n, budget=budget)
            except CapacityError:
                break
            sec.rows.append({"p": p, "n": n, "published": a.closed, "enumerated": a.enumerated,
                             "match": a.match, "mismatches": a.mismatches,
                             "known_discrepancy": a.known_discrepancy})
    return sec


def lo_section(primes, nmax=None, budget=CENSUS_BUDGET) -> Section:
    sec = Section("LO")
    for p in primes:
        for n in range(0, nmax_for(p, nmax) + 1):
            try:
                a = census_audit_lo(p, n, budget=budget)
            except CapacityError:
                break
            sec.rows.append({"p": p, "n": n, "published": a.lo_closed, "derived": a.lo_derived,
                             "match": not a.mismatch, "known_discrepancy": a.known_discrepancy,
                             "multiplicities": [s.sign_multiplicity for s in a.signed_types]})
    return sec


@dataclass
class AuditReport:
    sections: list[Section]

    @property
    def unexpected(self) -> int:
        return sum(len(s.unexpected) for s in self.sections)

    @property
    def ok(self) -> bool:
        return self.unexpected == 0

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "unexpected_mismatches": self.unexpected,
                "sections": [s.to_dict() for s in self.sections]}


def run_audit(pmax: int | None = None, nmax: int | None = None) -> AuditReport:
    primes = grid_primes(pmax)
    return AuditReport([
        unit_group_section(primes, nmax),
        primitive_section(primes, nmax),
        normmap_section(primes, nmax),
        lt_section(primes, nmax),
        lo_section(primes, nmax),
    ])
