"""Regenerate the bundled newform fixtures with PARI/GP (through cypari2).

Each file lists the Galois orbits of newforms in S_k(Gamma_0(N)): dimension,
CM flag, Atkin-Lehner eigenvalue at each p | N, the coefficient field, and the
first trace coefficients. Labels follow the N.k.a.x convention, with orbits
ordered by dimension and then by the trace coefficients.

    python3 scripts/make_fixtures.py [--out src/orbitcensus/fixtures]
"""
from __future__ import annotations

import argparse
import string
from pathlib import Path

import cypari2

from orbitcensus.lmfdbclient import FixtureFile, OrbitRecord, dump_fixture, fixture_name

GRID = [(N, k) for N in (1, 9, 11, 30, 256) for k in (12, 16)]
NTRACES = 20


def _letters(i: int) -> str:
    out = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        out = string.ascii_lowercase[r] + out
    return out


def orbits(pari, N: int, k: int) -> list[OrbitRecord]:
    mf = pari.mfinit([N, k], 0)
    forms = pari.mfeigenbasis(mf)
    fields = pari.mffields(mf)
    primes = [int(q) for q in pari.factor(N)[0]] if N > 1 else []
    al = {}
    for q in primes:
        Q = q ** int(pari.valuation(N, q))
        al[q] = pari.mfatkineigenvalues(mf, Q)
    rows = []
    for i, f in enumerate(forms):
        coefs = pari.mfcoefs(f, NTRACES)
        traces = [int(pari.trace(c)) if str(pari.type(c)) == "t_POLMOD" else int(c) * int(pari.poldegree(fields[i]))
                  for c in list(coefs)[1:]]
        signs = {}
        for q in primes:
            vals = {int(v) for v in al[q][i]}
            if len(vals) != 1:
                raise RuntimeError(f"Atkin-Lehner sign not constant on orbit {i} at {q}")
            signs[str(q)] = vals.pop()
        rows.append({
            "dim": int(pari.poldegree(fields[i])),
            "cm": int(pari.mfisCM(f)) != 0,
            "al_signs": signs,
            "field_poly": str(fields[i]).replace("y", "x"),
            "traces": traces,
        })
    rows.sort(key=lambda r: (r["dim"], r["traces"]))
    return [OrbitRecord(label=f"{N}.{k}.a.{_letters(j)}", **r) for j, r in enumerate(rows)]


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/orbitcensus/fixtures"))
    args = ap.parse_args(argv)
    pari = cypari2.Pari()
    pari.allocatemem(2 * 10**9)
    ver = str(pari.version())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for N, k in GRID:
        fx = FixtureFile(level=N, weight=k, orbits=orbits(pari, N, k),
                         provenance=f"computed with PARI/GP {ver} via cypari2 (mfinit, mfsplit, mfisCM, mfatkineigenvalues)")
        path = out / fixture_name(N, k)
        path.write_text(dump_fixture(fx))
        print(path, len(fx.orbits))


if __name__ == "__main__":
    main()
