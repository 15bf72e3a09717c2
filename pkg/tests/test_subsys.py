from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from adefans.fancore import random_weyl_word, apply_word_roots
from adefans.rootsys import parse_system
from adefans.subsys import (d4_catalog, enumerate_subsystems, fourtuple_decomposition,
                            is_fano_simplex, isotropic_subspace_count, orthogonal_root_sets, perp,
                            recognize_type, reflection_closure)

# classical subsystem counts (lines, tritangent planes and friends)
COUNTS = [("E6", "A1", 36), ("E6", "A2", 120), ("E6", "A2^3", 40), ("E6", "D4", 45),
          ("E6", "A5", 36), ("E6", "D5", 27), ("E7", "A1", 63), ("E7", "A2", 336),
          ("E7", "D4", 315), ("E7", "A7", 36), ("E7", "E6", 28), ("E7", "D6", 63),
          ("D5", "D4", 5), ("D6", "D4", 15), ("D8", "D4", 70)]


@pytest.mark.parametrize("name,label,count", COUNTS)
def test_subsystem_counts(name, label, count, systems):
    assert len(enumerate_subsystems(systems(name), label)) == count


@pytest.mark.parametrize("name", ["E6", "E7"])
def test_perp_types(name, systems):
    s = systems(name)
    want = {"E6": "A5", "E7": "D6"}[name]
    for a in range(len(s)):
        assert recognize_type(s, perp(s, [a])) == want


@pytest.mark.parametrize("name", ["D5", "E6", "E7"])
def test_fourtuples_partition(name, systems):
    s = systems(name)
    P = s.pairings
    for rec in d4_catalog(s):
        assert sorted(x for F in rec.fourtuples for x in F) == sorted(rec.roots)
        for F in rec.fourtuples:
            assert all(P[a][b] == 0 for a, b in itertools.combinations(F, 2))


def test_fourtuple_decomposition_is_forced(systems):
    s = systems("D4")
    d4 = frozenset(range(len(s)))
    parts = fourtuple_decomposition(s, d4)
    assert len(parts) == 3 and all(len(F) == 4 for F in parts)


def test_fano_count_matches_isotropic_subspaces(systems):
    e7 = systems("E7")
    sevens = orthogonal_root_sets(e7, 7)
    assert len(sevens) == isotropic_subspace_count(3, 3) == 135
    assert all(is_fano_simplex(e7, t) for t in sevens[:5])


def test_isotropic_counts_small():
    # (2^k + 1) products: Lagrangian counts in dimensions 2 and 4
    assert isotropic_subspace_count(1, 1) == 3
    assert isotropic_subspace_count(2, 2) == 15


def test_closure():
    s = parse_system("E6")
    a, b = s.simple_index[0], s.simple_index[1]
    assert recognize_type(s, reflection_closure(s, [a, b])) == "A2"


@given(st.sampled_from([("E6", "A2^3"), ("E6", "D4"), ("E7", "A7"), ("D6", "A3")]), st.integers(0, 10**6))
def test_enumeration_is_weyl_invariant(case, seed):
    name, label = case
    s = parse_system(name)
    subs = set(enumerate_subsystems(s, label))
    w = random_weyl_word(s, random.Random(seed), 15)
    assert {apply_word_roots(s, w, t) for t in subs} == subs
