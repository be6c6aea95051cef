"""Command-line interface.

Exit codes: 0 success (data anomalies are reported in the output), 1 failed
audit or data source failure, 2 usage error, 3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any

from .arith import ArithError
from .groups import CapacityError
from .lmfdbclient import NewformDataError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _cell(v: Any) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v, ensure_ascii=False)
    if v is None:
        return ""
    return str(v)


def render(rows: list[dict[str, Any]], fmt: str, payload: Any = None) -> str:
    if fmt == "json":
        return json.dumps(rows if payload is None else payload, indent=2, ensure_ascii=False) + "\n"
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        cols += [c for c in r if c not in cols]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _prime(s: str) -> int:
    from .arith import check_prime
    try:
        return check_prime(int(s))
    except (ValueError, ArithError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _nonneg(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {s}")
    return v


def _positive(s: str) -> int:
    v = _nonneg(s)
    if v == 0:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def cmd_lt(a) -> tuple[list, Any, int]:
    from .typecensus import census_audit_lt, lt_closed_form
    closed = lt_closed_form(a.p, a.n)
    if not a.brute:
        return [{"p": a.p, "n": a.n, **closed}], None, EXIT_OK
    audit = census_audit_lt(a.p, a.n)
    rows = [{"p": a.p, "n": a.n, "source": "closed", **audit.closed},
            {"p": a.p, "n": a.n, "source": "enumerated", **audit.enumerated}]
    payload = {k: v for k, v in audit.to_dict().items() if k != "types"}
    return rows, payload, EXIT_OK


def cmd_lo(a):
    from .signcensus import census_audit_lo, lo_closed_form
    if not a.derived:
        return [{"p": a.p, "n": a.n, "lo": lo_closed_form(a.p, a.n)}], None, EXIT_OK
    audit = census_audit_lo(a.p, a.n)
    row = {"p": a.p, "n": a.n, "lo_closed": audit.lo_closed, "lo_derived": audit.lo_derived,
           "mismatch": audit.mismatch, "known_discrepancy": audit.known_discrepancy}
    return [row], audit.to_dict(), EXIT_OK


def cmd_types(a):
    from .signcensus import signed
    from .typecensus import enumerate_types
    types = enumerate_types(a.p, a.n)
    rows = []
    for t in types:
        s = signed(t)
        d = t.to_dict()
        rows.append({"kind": d["kind"], "column": d["column"], "level": d["level"],
                     "field": d["field"], "tag": d["tag"], "representative": d["representative"],
                     "order": d["order"], "orbit_size": d["orbit_size"], "minimal": d["minimal"],
                     "sign_multiplicity": s.sign_multiplicity})
    payload = [t.to_dict() for t in types]
    return rows, payload, EXIT_OK


def cmd_audit(a):
    from .audit import run_audit
    report = run_audit(a.pmax, a.nmax)
    rows = []
    for s in report.sections:
        rows.append({"section": s.name, "rows": len(s.rows), "unexpected": len(s.unexpected),
                     "known": len(s.known),
                     "known_keys": sorted({r["known_discrepancy"] for r in s.known})})
    return rows, report.to_dict(), EXIT_OK if report.ok else EXIT_FAIL


def cmd_bound(a):
    from .bound import bound
    rep = bound(a.N)
    row = {"N": rep.N, "bound": rep.bound, "rigorous": rep.rigorous,
           "factorization": rep.factorization, "per_prime_lo": rep.per_prime_lo,
           "notes": " ".join(rep.notes)}
    return [row], rep.to_dict(), EXIT_OK


def cmd_compare(a):
    from .lmfdbclient import compare
    source = "fixture" if a.offline else "live"
    kw = {} if a.offline else {"cache_dir": a.cache_dir}
    rep = compare(a.N, a.k, source, **kw)
    row = {"N": rep.N, "k": rep.k, "ncm": rep.ncm, "bound": rep.bound.bound,
           "satisfied": rep.satisfied, "rigorous": rep.bound.rigorous, "dims": rep.dims,
           "source": rep.source, "anomalies": rep.anomalies}
    return [row], rep.to_dict(), EXIT_OK


def cmd_unitgroup(a):
    from .quadring import make_ring, predicted_structure, quad_ext, unit_group
    try:
        E = quad_ext(a.p, a.d)
    except ArithError as exc:
        raise UsageError(str(exc)) from None
    R = make_ring(E, a.n)
    got = unit_group(R)
    want = predicted_structure(E, a.n).invariant_factors
    row = {"field": E.label, "n": a.n, "computed": got.invariant_factors, "predicted": want,
           "match": got.invariant_factors == want, "generators": got.generators}
    return [row], row, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbitcensus", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("table", "csv", "json"), default="table")
    ap.add_argument("--cache-dir", type=Path, default=None,
                    help="directory for cached live responses")
    # the same options after the subcommand; SUPPRESS keeps the global value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--cache-dir", type=Path, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lt", parents=[common], help="type-orbit counts LT(p^n)")
    s.add_argument("p", type=_prime)
    s.add_argument("n", type=_nonneg)
    s.add_argument("--brute", action="store_true", help="also enumerate and compare")
    s.set_defaults(func=cmd_lt)

    s = sub.add_parser("lo", parents=[common], help="LO(p^n)")
    s.add_argument("p", type=_prime)
    s.add_argument("n", type=_nonneg)
    s.add_argument("--derived", action="store_true", help="also derive from the type census")
    s.set_defaults(func=cmd_lo)

    s = sub.add_parser("types", parents=[common], help="list the type orbits of level p^n")
    s.add_argument("p", type=_prime)
    s.add_argument("n", type=_nonneg)
    s.add_argument("--json", action="store_true", help="shorthand for --format json")
    s.set_defaults(func=cmd_types)

    s = sub.add_parser("audit", parents=[common], help="reproduce all tables on a grid")
    s.add_argument("--pmax", type=_positive, default=None)
    s.add_argument("--nmax", type=_positive, default=None)
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("bound", parents=[common], help="lower bound for NCM(N, k)")
    s.add_argument("N", type=_positive)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("compare", parents=[common], help="compare the bound with newform data")
    s.add_argument("N", type=_positive)
    s.add_argument("k", type=_positive)
    s.add_argument("--offline", action="store_true", help="use bundled fixtures")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("unitgroup", parents=[common], help="(O_E/p^n)^x by enumeration vs closed form")
    s.add_argument("p", type=_prime)
    s.add_argument("d", type=int)
    s.add_argument("n", type=_positive)
    s.set_defaults(func=cmd_unitgroup)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    if getattr(a, "json", False):
        a.format = "json"
    try:
        rows, payload, code = a.func(a)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"{ap.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ArithError as exc:
        print(f"{ap.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NewformDataError as exc:
        print(f"data source: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(render(rows, a.format, payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
