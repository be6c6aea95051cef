"""Galois orbits of inertial types of level p^n with trivial nebentypus.

Four families are enumerated from characters:

* principal series pi(chi, chi^-1), chi of exact conductor n/2 on Z_p^x;
* Steinberg and its twists by quadratic characters of Z_p^x;
* supercuspidals Ind theta from a quadratic E, theta restricted to Z_p^x equal
  to eps_E and not of the form phi o Norm;
* for p = 2, the sporadic (projectively S_4) types, which come from a fixed
  list of levels rather than from an enumeration.

Type coincidences between different inducing fields cannot be detected from
characters alone, so they enter as explicit exclusion rules (see EXCLUSIONS).
"""
from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Any

from .arith import check_prime, sigma0
from .charenum import DirichletSpace, character_space, galois_orbits
from .quadring import QuadExt, extensions

CENSUS_BUDGET = 5_000_000

UNRAMIFIED = "Unramified"
PS = "PrincipalSeries"
ST = "SteinbergTwist"
SC = "Supercuspidal"
SPORADIC = "Sporadic"
KINDS = (UNRAMIFIED, PS, ST, SC, SPORADIC)

# (level, curve tag, twist r); the tag at level 2^6 covers r = 2 and r = -2
SPORADIC_TYPES = (
    (3, "E2-", -1),
    (4, "E2+", 1),
    (6, "E2±2", 2),
    (6, "E2±2", -2),
    (7, "E1", 1),
    (7, "E1", -1),
    (7, "E1", 2),
    (7, "E1", -2),
)

COLUMNS_ODD = ("Unr", "PS", "St", "SCU", "SCR")
COLUMNS_TWO = ("Unr", "PS", "St", "SCU", "SCR(2)", "SCR(3)", "Sporadic")


def columns(p: int) -> tuple[str, ...]:
    return COLUMNS_TWO if p == 2 else COLUMNS_ODD


@dataclass
class TypeOrbit:
    kind: str
    p: int
    level: int
    field: str | None = None
    representative: tuple[int, ...] = ()
    group: tuple[int, ...] = ()
    order: int = 1
    size: int = 1
    char_conductor: int = 0
    tag: str | None = None
    minimal: bool = True
    minimal_parent: "TypeOrbit | None" = dc_field(default=None, repr=False)
    ext: QuadExt | None = dc_field(default=None, repr=False, compare=False)

    @property
    def column(self) -> str:
        if self.kind == UNRAMIFIED:
            return "Unr"
        if self.kind == PS:
            return "PS"
        if self.kind == ST:
            return "St"
        if self.kind == SPORADIC:
            return "Sporadic"
        if self.ext.e == 1:
            return "SCU"
        return f"SCR({self.ext.delta})" if self.p == 2 else "SCR"

    def sort_key(self):
        return (KINDS.index(self.kind), self.column, self.field or "", self.tag or "",
                self.representative)

    def brief(self) -> dict[str, Any]:
        return {"kind": self.kind, "level": self.level, "field": self.field,
                "representative": list(self.representative), "tag": self.tag}

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "column": self.column,
            "p": self.p,
            "level": self.level,
            "field": self.field,
            "group": list(self.group),
            "representative": list(self.representative),
            "order": self.order,
            "orbit_size": self.size,
            "char_conductor": self.char_conductor,
            "tag": self.tag,
            "minimal": self.minimal,
            "minimal_parent": self.minimal_parent.brief() if self.minimal_parent else None,
        }


def level_of(kind: str, *, cond_chi: int | None = None, ext: QuadExt | None = None,
             cond_theta: int | None = None, tag: str | None = None,
             claimed: int | None = None) -> int:
    """Conductor exponent of a type from its defining data."""
    if kind == UNRAMIFIED:
        level = 0
    elif kind == PS:
        if cond_chi is None or cond_chi < 1:
            raise ValueError("principal series needs a ramified chi")
        level = 2 * cond_chi
    elif kind == ST:
        if cond_chi is None or cond_chi < 0:
            raise ValueError("Steinberg twist needs the conductor of chi")
        level = 1 if cond_chi == 0 else 2 * cond_chi
        if cond_chi == 0 and claimed is not None and claimed != 1:
            raise ValueError(f"untwisted Steinberg has level 1, not {claimed}")
    elif kind == SC:
        if ext is None or cond_theta is None:
            raise ValueError("supercuspidal needs the field and cond(theta)")
        level = 2 * cond_theta if ext.e == 1 else cond_theta + ext.cond_eps
    elif kind == SPORADIC:
        levels = {t: lv for lv, t, _ in SPORADIC_TYPES}
        if tag not in levels:
            raise ValueError(f"unknown sporadic tag {tag!r}")
        level = levels[tag]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if claimed is not None and claimed != level:
        raise ValueError(f"{kind} data gives level {level}, not {claimed}")
    return level


# exclusion rules: (name, predicate on (E, cond_theta, order), reason)
EXCLUSIONS = (
    ("ramified-cond1-p3mod4",
     lambda E, c, o: E.p % 4 == 3 and E.e == 2 and c == 1,
     "inertial type coincides with an unramified supercuspidal one"),
    ("delta3-cond5-quadratic",
     lambda E, c, o: E.p == 2 and E.delta == 3 and c == 5 and o == 2,
     "a twist by phi o Norm brings it to conductor 3, matching an unramified supercuspidal type"),
    ("delta3-cond5-order4",
     lambda E, c, o: E.p == 2 and E.delta == 3 and c == 5 and o == 4,
     "triply imprimitive; the type is already induced from Q2(sqrt(3))"),
)


def excluded_by(E: QuadExt, cond_theta: int, order: int) -> str | None:
    for name, rule, _ in EXCLUSIONS:
        if rule(E, cond_theta, order):
            return name
    return None


def _unramified_type(p: int) -> TypeOrbit:
    return TypeOrbit(UNRAMIFIED, p, 0)


def _steinberg(p: int) -> TypeOrbit:
    return TypeOrbit(ST, p, 1)


def _dirichlet_types(p: int, n: int) -> list[TypeOrbit]:
    if n % 2 or n < 2:
        return []
    dlev = n // 2
    S = DirichletSpace(p, dlev)
    chars = S.characters()
    chars = chars[S.conductor(chars) == dlev]
    out = []
    for rep, size, order in S.orbits(chars):
        quadratic = order <= 2
        parent = _unramified_type(p) if quadratic else None
        out.append(TypeOrbit(PS, p, level_of(PS, cond_chi=dlev), None, rep,
                             tuple(int(x) for x in S.d), order, size, dlev,
                             minimal=not quadratic, minimal_parent=parent))
        if order == 2:
            out.append(TypeOrbit(ST, p, level_of(ST, cond_chi=dlev), None, rep,
                                 tuple(int(x) for x in S.d), order, size, dlev,
                                 minimal=False, minimal_parent=_steinberg(p)))
    return out


def supercuspidal_candidates(E: QuadExt, cond_theta: int, identify_conjugate: bool = False,
                             budget: int = CENSUS_BUDGET):
    """Primitive eps-restricted theta-orbits of conductor cond_theta, split
    into (kept, norm_factoring, excluded-with-rule)."""
    S = character_space(E, cond_theta, budget)
    orbits = galois_orbits(S, S.eps_characters(), identify_conjugate)
    kept, normed, excluded = [], [], []
    for o in orbits:
        if o.conductor != cond_theta:
            continue
        if o.norm_factoring:
            normed.append(o)
            continue
        rule = excluded_by(E, cond_theta, o.order)
        if rule:
            excluded.append((o, rule))
        else:
            kept.append(o)
    return kept, normed, excluded


def _supercuspidal_types(p: int, n: int, identify_conjugate: bool, budget: int) -> list[TypeOrbit]:
    out = []
    for E in extensions(p):
        if E.e == 1:
            if n % 2:
                continue
            c = n // 2
        else:
            c = n - E.cond_eps
        if c < 1:
            continue
        kept, _, _ = supercuspidal_candidates(E, c, identify_conjugate, budget)
        S = character_space(E, c, budget)
        for o in kept:
            t = TypeOrbit(SC, p, level_of(SC, ext=E, cond_theta=c), E.label, o.representative,
                          tuple(int(x) for x in S.d), o.order, o.size, c, ext=E)
            if p == 2 and E.delta == 2 and c == 4:
                # quadratic twist of the conductor-3 type from the same field
                t.minimal = False
                t.minimal_parent = TypeOrbit(SC, p, level_of(SC, ext=E, cond_theta=3), E.label,
                                             char_conductor=3, ext=E)
            out.append(t)
    return out


def _sporadic_types(n: int) -> list[TypeOrbit]:
    root = TypeOrbit(SPORADIC, 2, 3, tag="E2-")
    out = []
    for lv, tag, r in SPORADIC_TYPES:
        if lv != n:
            continue
        t = TypeOrbit(SPORADIC, 2, lv, tag=tag, representative=(r,))
        if tag in ("E2+", "E2±2"):
            t.minimal = False
            t.minimal_parent = root
        out.append(t)
    return out


def enumerate_types(p: int, n: int, identify_conjugate: bool = False,
                    budget: int = CENSUS_BUDGET) -> list[TypeOrbit]:
    """Every type orbit of level exactly p^n, in deterministic order."""
    check_prime(p)
    if n < 0:
        raise ValueError("level must be non-negative")
    if n == 0:
        return [_unramified_type(p)]
    out = []
    if n == 1:
        out.append(_steinberg(p))
    out += _dirichlet_types(p, n)
    out += _supercuspidal_types(p, n, identify_conjugate, budget)
    if p == 2:
        out += _sporadic_types(n)
    return sorted(out, key=TypeOrbit.sort_key)


def breakdown(types: list[TypeOrbit], p: int) -> dict[str, int]:
    out = {c: 0 for c in columns(p)}
    for t in types:
        out[t.column] += 1
    return out


# closed forms ---------------------------------------------------------------

_TABLE_TWO = {
    1: {"St": 1},
    2: {"SCU": 1},
    3: {"Sporadic": 1},
    4: {"PS": 1, "St": 1, "SCU": 1, "Sporadic": 1},
    5: {"SCR(2)": 2},
    6: {"PS": 2, "St": 2, "SCU": 2, "SCR(2)": 2, "Sporadic": 2},
    7: {"Sporadic": 4},
    8: {"PS": 2, "SCU": 4, "SCR(2)": 4},
}


def lt_closed_form(p: int, n: int) -> dict[str, int]:
    """Published per-column counts of type orbits of level p^n, with 'total'."""
    check_prime(p)
    if n < 0:
        raise ValueError("level must be non-negative")
    out = {c: 0 for c in columns(p)}
    if n == 0:
        out["Unr"] = 1
    elif p == 2:
        if n in _TABLE_TWO:
            out.update(_TABLE_TWO[n])
        elif n % 2:
            out["SCR(3)"] = 4
        else:
            out.update({"PS": 2, "SCU": 4, "SCR(2)": 4})
    elif n == 1:
        out["St"] = 1
    elif n == 2:
        out.update({"PS": sigma0(p - 1) - 1, "St": 1, "SCU": sigma0(p + 1) - 2})
    elif n % 2:
        out["SCR"] = 4 if p == 3 else 2
    else:
        out.update({"PS": sigma0(p - 1), "SCU": sigma0(p + 1)})
    out["total"] = sum(out.values())
    return out


@dataclass
class LTAudit:
    p: int
    n: int
    closed: dict[str, int]
    enumerated: dict[str, int]
    types: list[TypeOrbit]
    known_discrepancy: str | None = None

    @property
    def mismatches(self) -> list[str]:
        return [c for c in columns(self.p) if self.closed[c] != self.enumerated[c]]

    @property
    def match(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "n": self.n,
            "closed": self.closed,
            "enumerated": self.enumerated,
            "match": self.match,
            "mismatches": self.mismatches,
            "known_discrepancy": self.known_discrepancy,
            "types": [t.to_dict() for t in self.types],
        }


def census_audit_lt(p: int, n: int, identify_conjugate: bool = False,
                    budget: int = CENSUS_BUDGET) -> LTAudit:
    from .discrepancies import lookup
    types = enumerate_types(p, n, identify_conjugate, budget)
    enum = breakdown(types, p)
    enum["total"] = len(types)
    audit = LTAudit(p, n, lt_closed_form(p, n), enum, types)
    if not audit.match:
        entry = lookup("LT", p, n)
        audit.known_discrepancy = entry.key if entry else None
    return audit

