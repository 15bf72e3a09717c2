from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, strategies as st

from adefans.fancore import (FanData, build_F, build_G, cones_meet_properly, dual_basis_certificate,
                             equivariance_report, intersection_fan_certificate, is_fan, is_strictly_simplicial,
                             random_weyl_word, rays_convexly_disjoint, sampled_is_fan,
                             strict_simpliciality_report, subfan_report)
from adefans.rootsys import parse_system


def double_factorial(k):
    return math.prod(range(k, 0, -2))


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_dn_matches_m0n_counts(n, systems):
    # F(D_n) against the tropical M_{0,n}: (2n-5)!! maximal cones, 2^{n-1}-n-1 rays
    s = systems(f"D{n}")
    F = build_F(s)
    assert len(F.cones) == double_factorial(2 * n - 5)
    assert len(F.rays) == 2 ** (n - 1) - n - 1
    assert all(len(c) == n - 3 for c in F.cones)


@pytest.mark.parametrize("name,types,cones,size", [
    ("E6", {"A1": 36, "A2^3": 40}, 1215, 4),
])
def test_e6_census(name, types, cones, size, systems):
    F = build_F(systems(name))
    got = {}
    for lab in F.labels:
        got[lab] = got.get(lab, 0) + 1
    assert got == types
    assert len(F.cones) == cones and all(len(c) == size for c in F.cones)


@pytest.mark.parametrize("name", ["D5", "D6", "D7", "E6"])
def test_F_strictly_simplicial(name, systems):
    assert strict_simpliciality_report(build_F(systems(name))).ok


@pytest.mark.parametrize("name,count", [("D5", 12), ("D6", 60), ("D7", 360), ("E6", 432)])
def test_G_counts(name, count, systems):
    s = systems(name)
    G = build_G(s)
    assert len(G.cones) == count
    assert all(len(c) == G.rank for c in G.cones)
    assert strict_simpliciality_report(G).ok


@pytest.mark.parametrize("name", ["D5", "D6", "E6"])
def test_F_is_subfan_of_G(name, systems):
    s = systems(name)
    _, missing = subfan_report(build_F(s), build_G(s), s)
    assert missing == []


@pytest.mark.parametrize("name", ["D5", "D6"])
def test_pairwise_fan_exhaustive(name, systems):
    assert is_fan(build_F(systems(name))).ok


def test_pairwise_detects_overlap():
    rays = ((1, 0), (1, 2), (1, 1), (0, 1))
    fd = FanData("X", "bad", rays, ("",) * 4, (frozenset(),) * 4, ((0, 1), (2, 3)), 2)
    r = is_fan(fd)
    assert not r.ok and r.witness == (0, 1)
    ok = FanData("X", "good", ((1, 0), (1, 1), (0, 1)), ("",) * 3, (frozenset(),) * 3, ((0, 1), (1, 2)), 2)
    assert is_fan(ok).ok


def test_cones_meet_properly_basic():
    # common face first; two quadrants of the plane share the ray (1, 0)
    assert cones_meet_properly([[1, 0], [0, 1]], [[1, 0], [0, -1]], 1)
    assert not cones_meet_properly([[1, 0], [1, 2]], [[1, 1], [0, 1]], 0)


def test_strictly_simplicial_small():
    assert is_strictly_simplicial([[1, 0, 0], [1, 1, 0]])
    assert not is_strictly_simplicial([[1, 1], [1, -1]])
    assert is_strictly_simplicial([])


def test_convex_disjoint_rays():
    assert rays_convexly_disjoint([(1, 0), (-1, 1), (0, -1)])
    assert not rays_convexly_disjoint([(1, 0), (-1, 0)])


@pytest.mark.parametrize("name", ["D5", "D6", "E6"])
def test_equivariance_with_random_words(name, systems):
    s = systems(name)
    rng = random.Random(7)
    words = [random_weyl_word(s, rng) for _ in range(20)]
    assert equivariance_report(build_F(s), s, words).ok


@pytest.mark.parametrize("name", ["D5", "D6"])
def test_intersection_fan_exhaustive(name, systems):
    s = systems(name)
    assert intersection_fan_certificate(build_F(s), s, exhaustive=True).ok


def test_intersection_fan_e6_orbits(systems):
    s = systems("E6")
    r = intersection_fan_certificate(build_F(s), s)
    assert r.ok and r.orbit_representatives


@pytest.mark.parametrize("name", ["D5", "D6", "E6"])
def test_dual_basis(name, systems):
    s = systems(name)
    G = build_G(s)
    rep = dual_basis_certificate(G, s, G.cones[0])
    assert rep.ok and len(rep.witnesses) == G.rank


@given(st.integers(0, 10**6))
def test_sampled_pairs_e6(seed):
    s = parse_system("E6")
    assert sampled_is_fan(build_F(s), 30, seed).ok
