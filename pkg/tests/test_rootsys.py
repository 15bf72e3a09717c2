from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from adefans.rootsys import (UnsupportedSystem, build_root_system, parse_system, reflect, root_from_label,
                             root_label, supported_names, three_legged_roots, weyl_orbit)

NAMES = ["A3", "D4", "D5", "D6", "D7", "D8", "E6", "E7"]
POSITIVE = {"A3": 6, "D4": 12, "D5": 20, "D6": 30, "D7": 42, "D8": 56, "E6": 36, "E7": 63}


@pytest.mark.parametrize("name", NAMES)
def test_positive_root_counts(name, systems):
    assert len(systems(name)) == POSITIVE[name]


@pytest.mark.parametrize("name", NAMES)
def test_roots_have_norm_minus_two(name, systems):
    s = systems(name)
    assert all(s.pair(r, r) == -2 for r in s.positive_roots)
    for a, b in itertools.combinations(s.simple_roots, 2):
        assert s.pair(a, b) in (0, 1)


@pytest.mark.parametrize("name", NAMES)
def test_simple_reflections_permute_roots(name, systems):
    s = systems(name)
    for perm in s.generator_permutations():
        assert sorted(i for i, _ in perm) == list(range(len(s)))


@pytest.mark.parametrize("name", ["D5", "E6", "E7"])
def test_root_orbit_is_everything(name, systems):
    s = systems(name)
    acts = [lambda v, a=a: tuple(reflect(s, a, v)) for a in s.simple_roots]
    orbit = weyl_orbit(tuple(s.simple_roots[0]), acts)
    assert len(orbit) == 2 * len(s)


@pytest.mark.parametrize("name,count", [("D4", 2), ("D5", 5), ("D6", 9), ("D7", 14), ("D8", 20),
                                        ("E6", 15), ("E7", 35), ("A5", 0)])
def test_three_legged_counts(name, count):
    assert len(three_legged_roots(parse_system(name))) == count


@pytest.mark.parametrize("name", ["E6", "E7"])
def test_labels_round_trip(name, systems):
    s = systems(name)
    for i in range(len(s)):
        assert root_from_label(s, root_label(s, i)) == i


def test_e_labels():
    e6 = parse_system("E6")
    assert root_label(e6, e6.index([0, 1, -1, 0, 0, 0, 0])) == "12"
    assert root_label(e6, e6.index([1, 0, 0, 0, -1, -1, -1])) == "456"
    assert root_label(e6, e6.index([2, -1, -1, -1, -1, -1, -1])) == "7"


def test_unsupported():
    with pytest.raises(UnsupportedSystem):
        build_root_system("E", 8)
    with pytest.raises(UnsupportedSystem):
        parse_system("X9")
    assert "E7" in supported_names() and "D8" in supported_names()


@given(st.sampled_from(["D5", "E6", "E7"]), st.lists(st.integers(0, 6), min_size=1, max_size=20),
       st.integers(0, 10**6))
def test_reflections_are_isometries(name, word, seed):
    s = parse_system(name)
    word = [g % s.rank for g in word]
    rng = random.Random(seed)
    u = [rng.randint(-3, 3) for _ in range(s.dim)]
    v = [rng.randint(-3, 3) for _ in range(s.dim)]
    x, y = u, v
    for g in word:
        x = reflect(s, s.simple_roots[g], x)
        y = reflect(s, s.simple_roots[g], y)
    assert s.pair(x, y) == s.pair(u, v)
