import json
import time

import httpx
import pytest

from orbitcensus import lmfdbclient as lc
from orbitcensus.bound import bound
from orbitcensus.lmfdbclient import (LiveClient, MissingFixtureError, ParseError, TransportError,
                                     compare, dump_fixture, fetch_orbits, fixture_name,
                                     fixtures_dir, load_fixture, parse_fixture)

FIXTURES = sorted(fixtures_dir().glob("*.json"))


def test_fixture_grid_is_complete():
    assert {p.name for p in FIXTURES} == {fixture_name(N, k) for N in (1, 9, 11, 30, 256)
                                          for k in (12, 16)}


def test_level_256_weight_12():
    orbits = fetch_orbits(256, 12, "fixture")
    assert len(orbits) == 17
    assert sum(o.cm for o in orbits) == 5
    assert sorted(o.dim for o in orbits if not o.cm) == [2, 2, 4, 4, 6, 6, 8, 8, 8, 10, 10, 12]


def test_level_9_weight_16():
    orbits = fetch_orbits(9, 16, "fixture")
    cm = [o for o in orbits if o.cm]
    assert [o.dim for o in cm] == [1]
    two = [o for o in orbits if not o.cm and o.dim == 2]
    assert len(two) == 1
    f = two[0]
    # a_4 = a_2^2 - 2^15 for weight 16, and tr(a_2) = 0, so tr(a_4) = 2 a_2^2 - 2^16
    assert f.traces[1] == 0
    a2_sq = (f.traces[3] + 2**16) // 2
    assert a2_sq == 119880
    assert f.field_poly == "x^2 - 370" and 119880 % 370 == 0 and 119880 // 370 == 18**2


def test_level_1_weight_12():
    orbits = fetch_orbits(1, 12, "fixture")
    assert len(orbits) == 1
    delta = orbits[0]
    assert not delta.cm and delta.dim == 1
    assert delta.traces[:6] == [1, -24, 252, -1472, 4830, -6048]


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.name)
def test_round_trip_is_byte_exact(path):
    text = path.read_text()
    assert dump_fixture(parse_fixture(text)) == text


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.name)
def test_fixture_records_are_consistent(path):
    fx = parse_fixture(path.read_text())
    N = fx.level
    for o in fx.orbits:
        assert o.dim >= 1
        assert o.label.startswith(f"{N}.{fx.weight}.a.")
        assert o.traces[0] == o.dim
        qs = {q for q in range(2, N + 1) if N % q == 0 and all(q % r for r in range(2, q))}
        assert set(map(int, o.al_signs)) == qs
    # dimensions add up to the dimension of the new subspace: at least check labels are unique
    assert len({o.label for o in fx.orbits}) == len(fx.orbits)


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d.pop("level"), ".level"),
    (lambda d: d["orbits"][0].update(dim=0), "orbits[0].dim"),
    (lambda d: d["orbits"][0].update(dim="2"), "orbits[0].dim"),
    (lambda d: d["orbits"][0].update(cm=1), "orbits[0].cm"),
    (lambda d: d["orbits"][0]["al_signs"].update({"3": 2}), "orbits[0].al_signs.3"),
    (lambda d: d["orbits"][0].update(traces=[1.5]), "orbits[0].traces"),
    (lambda d: d.update(schema=2), "schema"),
])
def test_parse_errors_name_the_field(mutate, field):
    doc = json.loads((fixtures_dir() / "9.12.json").read_text())
    mutate(doc)
    with pytest.raises(ParseError) as exc:
        parse_fixture(json.dumps(doc))
    assert exc.value.field == field


def test_parse_rejects_wrong_level_and_garbage():
    text = (fixtures_dir() / "9.12.json").read_text()
    with pytest.raises(ParseError):
        parse_fixture(text, N=10)
    with pytest.raises(ParseError):
        parse_fixture("{not json")


def test_missing_fixture():
    with pytest.raises(MissingFixtureError):
        fetch_orbits(17, 2, "fixture")
    with pytest.raises(ValueError):
        fetch_orbits(1, 12, "elsewhere")


def _api_record(i, N=11, k=16, cm=False):
    return {"label": f"{N}.{k}.a.{chr(97 + i % 26)}{i}", "dim": 1 + i % 3, "is_cm": cm,
            "atkin_lehner_eigenvals": [[11, 1 if i % 2 else -1]], "level": N, "weight": k}


class _Api:
    def __init__(self, total):
        self.records = [_api_record(i, cm=(i == 0)) for i in range(total)]
        self.calls = []

    def __call__(self, request: httpx.Request) -> httpx.Response:
        self.calls.append((time.monotonic(), dict(request.url.params)))
        off = int(request.url.params.get("_offset", 0))
        page = self.records[off:off + lc.PAGE]
        body = {"data": page}
        if off + lc.PAGE < len(self.records):
            body["next"] = f"/api/mf_newforms/?_offset={off + lc.PAGE}"
        return httpx.Response(200, json=body)


def test_live_pagination_and_cache(tmp_path):
    api = _Api(130)
    client = LiveClient("http://mock/api", cache_dir=tmp_path, transport=httpx.MockTransport(api))
    fx = client.fetch(11, 16)
    assert len(fx.orbits) == 130
    assert [c[1]["_offset"] for c in api.calls] == ["0", "100"]
    params = api.calls[0][1]
    assert (params["level"], params["weight"], params["char_order"]) == ("11", "16", "1")
    # rate limit: at least 500 ms between requests
    assert api.calls[1][0] - api.calls[0][0] >= lc.MIN_INTERVAL - 1e-3
    cached = tmp_path / fixture_name(11, 16)
    assert cached.is_file()
    # second read is served from the cache
    again = client.fetch(11, 16)
    assert len(api.calls) == 2
    assert again.orbits == fx.orbits
    assert dump_fixture(parse_fixture(cached.read_text())) == cached.read_text()


def test_live_compare_via_client(tmp_path):
    api = _Api(5)
    client = LiveClient("http://mock/api", transport=httpx.MockTransport(api))
    orbits = fetch_orbits(11, 16, "live", client=client)
    assert sum(not o.cm for o in orbits) == 4


def test_live_transport_error():
    def boom(request):
        raise httpx.ConnectError("unreachable", request=request)
    client = LiveClient("http://mock/api", transport=httpx.MockTransport(boom))
    with pytest.raises(TransportError):
        client.fetch(11, 16)


def test_live_http_status_error():
    client = LiveClient("http://mock/api", transport=httpx.MockTransport(lambda r: httpx.Response(503)))
    with pytest.raises(TransportError):
        client.fetch(11, 16)


def test_live_malformed_payload():
    bad = {"data": [{"label": "x", "dim": 0, "is_cm": False}]}
    client = LiveClient("http://mock/api", transport=httpx.MockTransport(lambda r: httpx.Response(200, json=bad)))
    with pytest.raises(ParseError) as exc:
        client.fetch(11, 16)
    assert exc.value.field == "data[0].dim"
    client = LiveClient("http://mock/api", transport=httpx.MockTransport(lambda r: httpx.Response(200, json={})))
    with pytest.raises(ParseError) as exc:
        client.fetch(11, 16)
    assert exc.value.field == "data"


def test_base_url_from_environment(monkeypatch):
    monkeypatch.setenv("LMFDB_BASE_URL", "http://elsewhere/api/")
    assert LiveClient().base_url == "http://elsewhere/api"


def test_compare_256_12():
    rep = compare(256, 12, "fixture")
    assert (rep.ncm, rep.bound.bound, rep.satisfied, rep.cm_orbits) == (12, 10, True, 5)
    assert rep.dims == [2, 2, 4, 4, 6, 6, 8, 8, 8, 10, 10, 12]
    assert rep.anomalies == [{"kind": "gap", "gap": 2, "bound": 10, "ncm": 12, "registry": "ncm-256-12"}]


def test_compare_30_12_reports_violation_as_anomaly():
    rep = compare(30, 12, "fixture")
    assert rep.bound.bound == 8
    assert rep.ncm == 6
    assert not rep.satisfied
    assert rep.anomalies[0]["kind"] == "bound-exceeds-ncm"


def test_compare_11_16():
    rep = compare(11, 16, "fixture")
    assert rep.bound.bound == 2 <= rep.ncm
    assert rep.satisfied and rep.anomalies == []


@pytest.mark.parametrize("path", [p for p in FIXTURES if int(p.name.split(".")[1]) >= 16],
                         ids=lambda p: p.name)
def test_bound_holds_from_weight_16(path):
    N, k = (int(x) for x in path.name.split(".")[:2])
    if not bound(N).rigorous:
        pytest.skip("bound not proven for this level")
    rep = compare(N, k, "fixture")
    assert rep.satisfied, f"bound {rep.bound.bound} > NCM {rep.ncm} at ({N}, {k})"
