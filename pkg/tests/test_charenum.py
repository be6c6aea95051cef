from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import divisors_naive, lcm_orders, orbit_count_by_orders
from orbitcensus.charenum import (DirichletSpace, character_space, conductor, count_primitive_orbits,
                                  eps_census, factors_through_norm, galois_orbits,
                                  norm_orbits_by_conductor, normmap_closed_form,
                                  restriction_matches_eps)
from orbitcensus.quadring import extensions, make_ring, quad_ext, unramified

GRID = [(E, n) for p in (3, 5) for E in extensions(p) for n in (1, 2, 3)] + \
       [(E, n) for E in extensions(2) for n in range(1, 7)]


def _ids(v):
    return str(v)


def test_character_values_are_exact_fractions():
    S = character_space(unramified(5), 2)
    theta = S.character([1] * S.k)
    g = S.G.generators[-1]
    assert theta(g).denominator == S.d[-1]
    # homomorphism: theta(xy) = theta(x) + theta(y) in Q/Z
    R = S.R
    u = R.units()[:50]
    for x, y in zip(u, u[::-1]):
        xy = int(R.mul(np.array([x]), np.array([y]))[0])
        assert (theta(xy) - theta(int(x)) - theta(int(y))) % 1 == 0


def test_order_kills_character():
    S = character_space(quad_ext(2, -1), 5)
    for exps in next(S.all_characters()):
        o = int(S.order(exps)[0])
        assert not ((o * exps) % S.d).any()
        assert o == lcm_orders(S.d, exps)


def test_conductor_examples():
    S = character_space(unramified(5), 3)
    R = S.R
    trivial = S.character([0] * S.k)
    assert conductor(R, trivial) == 0
    # the prime-to-p factor is the residue-field part: it has level 1
    residue = [0] * S.k
    residue[-1] = 25  # order 24 inside the cyclic factor of order 24*25
    chi = S.character(residue)
    assert chi.order == 24
    assert conductor(R, chi) == 1


def test_restriction_examples():
    S = character_space(unramified(3), 2)
    R = S.R
    # trivial on rational units, unramified eps is trivial
    assert restriction_matches_eps(R, S.character([0] * S.k))
    S2 = character_space(quad_ext(2, 2), 5)
    five = S2.R.from_rational(5)
    chars = next(S2.all_characters())
    vals = S2.values(chars, [five])[:, 0]
    assert not S2.restriction_matches_eps(chars[vals == 0]).any()
    # ramified field with eps nontrivial on units: trivial theta fails
    S3 = character_space(quad_ext(5, 5), 2)
    assert not restriction_matches_eps(S3.R, S3.character([0] * S3.k))


def test_norm_examples():
    S = character_space(unramified(2), 3)
    assert factors_through_norm(S.R, S.character([0] * S.k))
    assert norm_orbits_by_conductor(unramified(2), 3) == {0: 1, 2: 1, 3: 2}
    assert norm_orbits_by_conductor(quad_ext(2, 2), 5) == {5: 2}
    census = eps_census(quad_ext(2, 2), 5)
    assert [o.order for o in census.orbits if o.norm_factoring] == [2, 2]


@pytest.mark.parametrize("E", [E for p in (2, 3, 5, 7) for E in extensions(p)], ids=_ids)
def test_normmap_closed_form_on_grid(E):
    n_top = 6 if E.p == 2 else 3
    want = normmap_closed_form(E)
    for n in range(1, n_top + 1):
        assert norm_orbits_by_conductor(E, n) == {c: v for c, v in want.items() if c <= n}


def test_norm_characters_are_characters_of_norm():
    # phi o N: value on each unit equals phi(N(u)) computed directly
    for E, n in [(quad_ext(5, 5), 2), (unramified(3), 2), (quad_ext(2, -1), 4)]:
        S = character_space(E, n)
        R = S.R
        sample = R.units()[:: max(1, len(R.units()) // 40)]
        norms = R.norm(sample) % R.norm_modulus
        for exps in S.norm_characters():
            vals = S.values(exps, list(sample))[0]
            # equal norms give equal values
            by_norm = {}
            for nv, v in zip(norms, vals):
                assert by_norm.setdefault(int(nv), int(v)) == int(v)


@pytest.mark.parametrize("m", [1, 2, 6, 12, 30, 64, 81])
def test_cyclic_orbit_count(m):
    # characters of Z/m: one orbit per order d | m
    orders = [m // gcd(m, c) for c in range(m)]
    assert orbit_count_by_orders(orders) == divisors_naive(m)
    S = DirichletSpace(m + 1, 1) if m in (6, 12, 30) else None
    if S is not None:  # (Z/p)^x is cyclic of order p - 1
        assert len(S.orbits(S.characters())) == divisors_naive(m)


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_dirichlet_cyclic_orbits(p):
    for dlev in (1, 2):
        S = DirichletSpace(p, dlev)
        orbs = S.orbits(S.characters())
        assert len(orbs) == divisors_naive(p ** (dlev - 1) * (p - 1))
        assert sum(size for _, size, _ in orbs) == p ** (dlev - 1) * (p - 1)


def test_dirichlet_conductor_two_adic():
    S = DirichletSpace(2, 4)
    chars = S.characters()
    conds = S.conductor(chars)
    # primitive characters mod 2^d: 0, 0, 1, 2, 4 for d = 0..4 (totient differences)
    counts = [int(np.count_nonzero(conds == c)) for c in range(5)]
    assert counts == [1, 0, 1, 2, 4]


def test_unramified_q5_level2():
    assert count_primitive_orbits(unramified(5), 2) == 4


@pytest.mark.parametrize("E, n, want", [
    (unramified(2), 3, 4), (unramified(2), 4, 4), (unramified(2), 5, 4),
    (quad_ext(3, -3), 2, 1),
    (quad_ext(2, 2), 5, 3), (quad_ext(2, -6), 5, 3),
])
def test_count_primitive_examples(E, n, want):
    assert count_primitive_orbits(E, n) == want


@pytest.mark.parametrize("E", extensions(5), ids=_ids)
def test_identify_conjugate_no_effect_p5(E):
    for n in (1, 2, 3):
        a = eps_census(E, n, False)
        b = eps_census(E, n, True)
        assert [o.representative for o in a.orbits] == [o.representative for o in b.orbits]


@pytest.mark.parametrize("E, n", GRID, ids=_ids)
def test_orbit_invariance(E, n):
    S = character_space(E, n)
    census = eps_census(E, n)
    for o in census.orbits:
        rep = np.array(o.representative)
        members = np.array([(k * rep) % S.d for k in range(1, o.order + 1) if gcd(k, o.order) == 1])
        assert len({tuple(m) for m in members}) == o.size
        assert (S.order(members) == o.order).all()
        assert (S.conductor(members) == o.conductor).all()
        assert (S.factors_through_norm(members) == o.norm_factoring).all()
        assert S.restriction_matches_eps(members).all()
        # representative is the least member
        assert tuple(rep) == min(tuple(int(v) for v in m) for m in members)


@pytest.mark.parametrize("E, n", GRID, ids=_ids)
def test_orbit_count_matches_order_oracle(E, n):
    S = character_space(E, n)
    chars = S.eps_characters()
    if not len(chars):
        return
    assert len(galois_orbits(S, chars)) == orbit_count_by_orders(S.order(chars))


@pytest.mark.parametrize("E, n", GRID, ids=_ids)
def test_eps_character_count_is_index(E, n):
    S = character_space(E, n)
    chars = S.eps_characters()
    if not len(chars):
        return
    image = S.rational_image()
    assert len(chars) * len(image) == S.R.unit_count()


def test_conjugation_is_involution_on_characters():
    for E in extensions(3):
        S = character_space(E, 3)
        chars = next(S.all_characters())
        assert (S.conjugate(S.conjugate(chars)) == chars).all()


@settings(max_examples=30)
@given(st.data())
def test_conductor_is_filtration_level(data):
    E = data.draw(st.sampled_from(extensions(2) + extensions(3)))
    n = data.draw(st.integers(1, 4))
    S = character_space(E, n)
    exps = np.array([data.draw(st.integers(0, int(d) - 1)) for d in S.d], dtype=np.int64)
    c = int(S.conductor(exps)[0])
    R = S.R
    # trivial on ker at level c, nontrivial at c - 1
    for m in range(n):
        gens = R.kernel_generators(m)
        trivial = not (S.values(exps, gens) % S.D).any() if gens else True
        assert trivial == (m >= c)
