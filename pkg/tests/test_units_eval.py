from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from adefans import units_eval as ue
from adefans.charlat import build_N, d4_unit, member_M
from adefans.rootsys import parse_system
from adefans.subsys import d4_catalog


def test_cubic_determinant_factorization_symbolic():
    a, b, c = sympy.symbols("a b c")
    M = sympy.Matrix([[a, b, c], [a ** 3, b ** 3, c ** 3], [1, 1, 1]])
    assert sympy.expand(M.det() - (a - b) * (b - c) * (c - a) * (a + b + c)) == 0


@given(st.fractions(), st.fractions(), st.fractions())
def test_cubic_det_exact(a, b, c):
    assert ue.cubic_det(a, b, c) == ue.cubic_det_factored(a, b, c)


@pytest.mark.parametrize("name", ["E6", "E7"])
def test_cross_ratio_identity(name, systems):
    s = systems(name)
    rng = random.Random(11)
    for idx in ue.sample_index_choices(s.rank, 10, rng):
        assert member_M(s, ue.projection_unit(s, idx))
        assert ue.unit_as_d4_unit(s, ue.projection_unit(s, idx)) is not None
        for _ in range(10):
            assert ue.cross_ratio_pullback_check(s, idx, ue.random_point(s, rng))


@pytest.mark.parametrize("name", ["D5", "D6", "D7"])
def test_forgetful_identity(name, systems):
    s = systems(name)
    rng = random.Random(3)
    for idx in itertools.permutations(range(1, s.rank + 1), 4):
        m = ue.forgetful_unit(s, idx)
        assert member_M(s, m) and ue.unit_as_d4_unit(s, m) is not None
        if rng.random() < 0.2:
            assert ue.forgetful_check(s, idx, ue.random_point(s, rng))


def test_orientation_sign_matters(systems):
    s = systems("E6")
    x = ue.ConfigPoint.of(s, [1, 4, 9, 16, 25, 37])
    idx = (2, 1, 3, 4, 5)
    assert ue.orientation_sign(idx) == -1
    cr = ue.projection_cross_ratio(x.coords, idx)
    assert cr == -ue.evaluate_unit(s, ue.projection_unit(s, idx), x)
    assert ue.cross_ratio_pullback_check(s, idx, x)


def test_domain_errors(systems):
    s = systems("E6")
    x = ue.ConfigPoint.of(s, [1, 1, 2, 3, 4, 5])
    assert not ue.is_admissible(s, x)
    with pytest.raises(ue.DomainError):
        ue.evaluate_unit(s, ue.projection_unit(s, (1, 2, 3, 4, 5)), x)
    with pytest.raises(ValueError):
        ue.ConfigPoint.of(s, [1, 2])


@given(st.sampled_from(["D5", "E6"]), st.integers(0, 10**6))
def test_evaluation_is_a_homomorphism(name, seed):
    s = parse_system(name)
    rng = random.Random(seed)
    x = ue.random_point(s, rng)
    cat = d4_catalog(s)
    u = d4_unit(s, rng.choice(cat), 1, 2)
    v = d4_unit(s, rng.choice(cat), 2, 3)
    uv = [a + b for a, b in zip(u, v)]
    assert ue.evaluate_unit(s, uv, x) == ue.evaluate_unit(s, u, x) * ue.evaluate_unit(s, v, x)
    assert ue.evaluate_unit(s, [-a for a in u], x) == 1 / ue.evaluate_unit(s, u, x)


@given(st.sampled_from(["D5", "E6", "E7"]), st.integers(0, 10**6))
def test_weyl_ratio_is_a_sign(name, seed):
    s = parse_system(name)
    rng = random.Random(seed)
    rec = rng.choice(d4_catalog(s))
    m = d4_unit(s, rec, 1, 3)
    pts = [ue.random_point(s, rng) for _ in range(20)]
    word = [rng.randrange(s.rank) for _ in range(rng.randint(0, 8))]
    r = ue.weyl_ratio_check(s, m, word, pts)
    assert r.ok and r.constant in (Fraction(1), Fraction(-1))
    if not word:
        assert r.constant == 1


def test_valuation_bookkeeping(systems):
    s = systems("D6")
    N = build_N(s)
    for rec in d4_catalog(s)[:5]:
        m = d4_unit(s, rec, 1, 2)
        for a in range(len(s)):
            e = [0] * len(s)
            e[a] = 1
            # pairing with the image of the root indicator is the exponent of that root
            assert N.pair(m, N.psi_of(e)) == m[a]
