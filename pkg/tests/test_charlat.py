from __future__ import annotations

import random

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import invariant_factors

from adefans import intlinalg as il
from adefans.charlat import (DIVISIBILITY, PSI_RELATIONS, build_N, check_psi_relation, check_restriction,
                             d4_span_check, d4_unit, dn_relation_check, member_M, phi_matrix, rank_M,
                             restriction_maps, root_data)
from adefans.fanmaps import standard_subsystem
from adefans.rootsys import parse_system
from adefans.subsys import d4_catalog, enumerate_subsystems

RANKS = {"D4": 2, "D5": 5, "D6": 9, "D7": 14, "D8": 20, "E6": 15, "E7": 35}


@pytest.mark.parametrize("name", ["D4", "D5", "D6", "E6"])
def test_phi_unimodular_by_sympy(name, systems):
    s = systems(name)
    P = phi_matrix(root_data(s))
    r = s.rank
    inv = [int(d) for d in invariant_factors(sympy.Matrix(P), domain=sympy.ZZ) if d != 0]
    assert len(inv) == r * (r + 1) // 2 and all(abs(d) == 1 for d in inv)


@pytest.mark.parametrize("name", sorted(RANKS))
def test_psi_is_a_cokernel(name, systems):
    s = systems(name)
    N = build_N(s)
    assert N.rank == RANKS[name] == rank_M(s)
    assert all(not any(row) for row in il.matmul([list(r) for r in N.psi], [list(r) for r in N.phi]))
    assert il.is_unimodular_rows([list(r) for r in N.psi])
    assert all(member_M(s, row) for row in N.psi)


@given(st.sampled_from(["D5", "E6"]), st.integers(0, 10**6))
def test_membership_of_combinations(name, seed):
    s = parse_system(name)
    N = build_N(s)
    rng = random.Random(seed)
    c = [rng.randint(-3, 3) for _ in range(N.rank)]
    m = il.matvec(il.transpose([list(r) for r in N.psi]), c)
    assert member_M(s, m)
    assert N.m_coords(m) == c
    # a single root indicator is never a unit
    e = [0] * len(s)
    e[rng.randrange(len(s))] = 1
    assert not member_M(s, e)


@pytest.mark.parametrize("rel", [r for r in PSI_RELATIONS if r.system == "E6"], ids=lambda r: r.text)
def test_e6_relations(rel, systems):
    assert check_psi_relation(systems("E6"), rel).ok


@pytest.mark.parametrize("rel", [r for r in PSI_RELATIONS if r.system == "E7"], ids=lambda r: r.text)
def test_e7_relations_sampled(rel, systems):
    assert check_psi_relation(systems("E7"), rel, limit=5).ok


@pytest.mark.parametrize("name,label,d", DIVISIBILITY)
def test_divisibility(name, label, d, systems):
    s = systems(name)
    N = build_N(s)
    for t in enumerate_subsystems(s, label)[:20]:
        assert il.content(N.psi_set(t)) % d == 0


@pytest.mark.parametrize("name", ["D5", "D6", "D7", "D8"])
def test_dn_relations(name, systems):
    assert dn_relation_check(systems(name))


@pytest.mark.parametrize("name", ["D5", "D6", "E6"])
def test_d4_units_span(name, systems):
    r = d4_span_check(systems(name))
    assert r.ok


def test_d4_units_antisymmetric(systems):
    s = systems("E6")
    for rec in d4_catalog(s)[:10]:
        for i, j in [(1, 2), (2, 3), (1, 3)]:
            u, v = d4_unit(s, rec, i, j), d4_unit(s, rec, j, i)
            assert all(a + b == 0 for a, b in zip(u, v))
            assert member_M(s, u)
    with pytest.raises(ValueError):
        d4_unit(s, d4_catalog(s)[0], 1, 1)


@pytest.mark.parametrize("big,small", [("E7", "E6"), ("E6", "D5"), ("D6", "D5")])
def test_restriction_is_dual_to_extension(big, small, systems):
    s = systems(big)
    sub = standard_subsystem(s, systems(small))
    assert check_restriction(restriction_maps(s, sub))
