"""Newform Galois orbits for (Gamma_0(N), k) and the comparison with the bound.

Two sources:

* ``fixture``: JSON files bundled in ``orbitcensus/fixtures`` (never touches
  the network);
* ``live``: the LMFDB web API at ``$LMFDB_BASE_URL`` (default the public
  site). Responses are cached, one JSON file per (N, k), in the same format
  as the fixtures. Requests are serialized and spaced at least 500 ms apart.

File format (schema 1)::

    {"schema": 1, "level": N, "weight": k, "provenance": "...",
     "orbits": [{"label": "N.k.a.x", "dim": d, "cm": false,
                 "al_signs": {"2": -1}, "field_poly": "x^2 - 370",
                 "traces": [tr a_1, tr a_2, ...]}, ...]}
"""
from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import httpx

from .bound import BoundReport, bound
from .discrepancies import lookup

SCHEMA = 1
DEFAULT_BASE_URL = "https://www.lmfdb.org/api"
MIN_INTERVAL = 0.5
PAGE = 100


class NewformDataError(RuntimeError):
    pass


class TransportError(NewformDataError):
    pass


class MissingFixtureError(NewformDataError):
    pass


class ParseError(NewformDataError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class OrbitRecord:
    label: str
    dim: int
    cm: bool
    al_signs: dict[str, int] = field(default_factory=dict)
    field_poly: str | None = None
    traces: list[int] = field(default_factory=list)


NewformOrbitRecord = OrbitRecord


@dataclass
class FixtureFile:
    level: int
    weight: int
    orbits: list[OrbitRecord]
    provenance: str = ""


def fixture_name(N: int, k: int) -> str:
    return f"{N}.{k}.json"


def _expect(obj: dict, key: str, typ, where: str):
    if key not in obj:
        raise ParseError(f"{where}.{key}", "missing")
    val = obj[key]
    if typ is int and isinstance(val, bool) or not isinstance(val, typ):
        raise ParseError(f"{where}.{key}", f"expected {getattr(typ, '__name__', typ)}, got {val!r}")
    return val


def parse_fixture(text: str, N: int | None = None, k: int | None = None) -> FixtureFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("<document>", str(exc)) from None
    if not isinstance(raw, dict):
        raise ParseError("<document>", "top level must be an object")
    if raw.get("schema", SCHEMA) != SCHEMA:
        raise ParseError("schema", f"unsupported version {raw.get('schema')!r}")
    level = _expect(raw, "level", int, "")
    weight = _expect(raw, "weight", int, "")
    if N is not None and level != N:
        raise ParseError("level", f"expected {N}, got {level}")
    if k is not None and weight != k:
        raise ParseError("weight", f"expected {k}, got {weight}")
    orbits = []
    for i, o in enumerate(_expect(raw, "orbits", list, "")):
        where = f"orbits[{i}]"
        if not isinstance(o, dict):
            raise ParseError(where, "expected an object")
        dim = _expect(o, "dim", int, where)
        if dim < 1:
            raise ParseError(f"{where}.dim", f"must be positive, got {dim}")
        signs = _expect(o, "al_signs", dict, where)
        for q, s in signs.items():
            if s not in (1, -1) or isinstance(s, bool):
                raise ParseError(f"{where}.al_signs.{q}", f"expected +1 or -1, got {s!r}")
        poly = o.get("field_poly")
        if poly is not None and not isinstance(poly, str):
            raise ParseError(f"{where}.field_poly", "expected a string")
        traces = o.get("traces", [])
        if not isinstance(traces, list) or not all(isinstance(t, int) for t in traces):
            raise ParseError(f"{where}.traces", "expected a list of integers")
        orbits.append(OrbitRecord(_expect(o, "label", str, where), dim,
                                  _expect(o, "cm", bool, where), dict(signs), poly, list(traces)))
    return FixtureFile(level, weight, orbits, raw.get("provenance", ""))


def dump_fixture(fx: FixtureFile) -> str:
    doc = {"schema": SCHEMA, "level": fx.level, "weight": fx.weight,
           "provenance": fx.provenance, "orbits": [asdict(o) for o in fx.orbits]}
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def fixtures_dir() -> Path:
    return Path(str(resources.files("orbitcensus") / "fixtures"))


def load_fixture(N: int, k: int, directory: Path | None = None) -> FixtureFile:
    path = (directory or fixtures_dir()) / fixture_name(N, k)
    if not path.is_file():
        raise MissingFixtureError(f"no fixture for level {N}, weight {k}")
    return parse_fixture(path.read_text(), N, k)


class LiveClient:
    """Single-flight, rate-limited reader of the LMFDB newform API."""

    _lock = threading.Lock()
    _last = 0.0

    def __init__(self, base_url: str | None = None, cache_dir: Path | None = None,
                 transport: httpx.BaseTransport | None = None, timeout: float = 30.0):
        self.base_url = (base_url or os.environ.get("LMFDB_BASE_URL") or DEFAULT_BASE_URL).rstrip("/")
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.transport = transport
        self.timeout = timeout

    def _get(self, client: httpx.Client, params: dict) -> dict:
        cls = type(self)
        with cls._lock:
            wait = cls._last + MIN_INTERVAL - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            try:
                r = client.get(f"{self.base_url}/mf_newforms/", params=params)
                r.raise_for_status()
            except httpx.HTTPError as exc:
                raise TransportError(f"request to {self.base_url} failed: {exc}") from exc
            finally:
                cls._last = time.monotonic()
        try:
            return r.json()
        except ValueError as exc:
            raise ParseError("<response>", f"not JSON: {exc}") from None

    def fetch(self, N: int, k: int) -> FixtureFile:
        if self.cache_dir:
            cached = self.cache_dir / fixture_name(N, k)
            if cached.is_file():
                return parse_fixture(cached.read_text(), N, k)
        rows: list[dict] = []
        fields = "label,dim,is_cm,atkin_lehner_eigenvals,level,weight"
        with httpx.Client(transport=self.transport, timeout=self.timeout) as client:
            while True:
                payload = self._get(client, {"level": N, "weight": k, "char_order": 1,
                                             "_format": "json", "_fields": fields,
                                             "_offset": len(rows)})
                data = payload.get("data") if isinstance(payload, dict) else None
                if not isinstance(data, list):
                    raise ParseError("data", "missing list of records")
                rows += data
                if len(data) < PAGE or not payload.get("next"):
                    break
        fx = FixtureFile(N, k, [_from_api(r, i, N, k) for i, r in enumerate(rows)],
                         f"LMFDB API at {self.base_url}")
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            target = self.cache_dir / fixture_name(N, k)
            tmp = target.with_suffix(".tmp")
            tmp.write_text(dump_fixture(fx))
            tmp.replace(target)
        return fx


def _from_api(r: Any, i: int, N: int, k: int) -> OrbitRecord:
    where = f"data[{i}]"
    if not isinstance(r, dict):
        raise ParseError(where, "expected an object")
    if r.get("level", N) != N or r.get("weight", k) != k:
        raise ParseError(where, f"record for level {r.get('level')}, weight {r.get('weight')}")
    signs = {}
    for pair in r.get("atkin_lehner_eigenvals") or []:
        if not (isinstance(pair, list) and len(pair) == 2 and pair[1] in (1, -1)):
            raise ParseError(f"{where}.atkin_lehner_eigenvals", f"bad entry {pair!r}")
        signs[str(pair[0])] = pair[1]
    dim = _expect(r, "dim", int, where)
    if dim < 1:
        raise ParseError(f"{where}.dim", f"must be positive, got {dim}")
    return OrbitRecord(_expect(r, "label", str, where), dim, _expect(r, "is_cm", bool, where), signs)


def fetch_orbits(N: int, k: int, source: str = "fixture", cache_dir: Path | None = None,
                 fixture_dir: Path | None = None, client: LiveClient | None = None) -> list[OrbitRecord]:
    if source == "fixture":
        return load_fixture(N, k, fixture_dir).orbits
    if source == "live":
        return (client or LiveClient(cache_dir=cache_dir)).fetch(N, k).orbits
    raise ValueError(f"unknown source {source!r}")


@dataclass
class ComparisonReport:
    N: int
    k: int
    ncm: int
    dims: list[int]
    bound: BoundReport
    satisfied: bool
    source: str
    cm_orbits: int = 0
    anomalies: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {"N": self.N, "k": self.k, "ncm": self.ncm, "dims": self.dims,
                "cm_orbits": self.cm_orbits, "bound": self.bound.to_dict(),
                "satisfied": self.satisfied, "source": self.source, "anomalies": self.anomalies}


def compare(N: int, k: int, source: str = "fixture", **kw) -> ComparisonReport:
    orbits = fetch_orbits(N, k, source, **kw)
    noncm = sorted(o.dim for o in orbits if not o.cm)
    b = bound(N)
    rep = ComparisonReport(N, k, len(noncm), noncm, b, b.bound <= len(noncm), source,
                           sum(o.cm for o in orbits))
    if not rep.satisfied:
        rep.anomalies.append({"kind": "bound-exceeds-ncm", "bound": b.bound, "ncm": rep.ncm,
                              "rigorous": b.rigorous,
                              "note": "weight may be below the threshold where the bound applies"})
    entry = lookup("NCM", N, k)
    if entry and rep.satisfied and rep.ncm > b.bound:
        rep.anomalies.append({"kind": "gap", "gap": rep.ncm - b.bound, "bound": b.bound,
                              "ncm": rep.ncm, "registry": entry.key})
    return rep
