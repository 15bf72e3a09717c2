from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from adefans import intlinalg as il
from adefans.fancore import build_F
from adefans.fanmaps import (NotPointed, PolyCone, cone_volume, equivariance_of_projection,
                             flatness_check, locate, projection_map, ray_image_table, refine_E6,
                             refinement_volumes, simplicial_volume, triangulate)


def brute_extreme_rays(ineqs, d):
    """Extreme rays of {x : A x >= 0} from every rank d-1 tight subsystem (sympy nullspaces)."""
    out = set()
    for rows in itertools.combinations(ineqs, d - 1):
        M = sympy.Matrix(rows)
        if M.rank() != d - 1:
            continue
        v = M.nullspace()[0]
        den = sympy.ilcm(*[x.q for x in v])
        w = [int(x * den) for x in v]
        for s in (w, [-x for x in w]):
            if all(sum(a * b for a, b in zip(h, s)) >= 0 for h in ineqs):
                out.add(tuple(il.primitive(s)))
    return out


cone_rows = st.integers(3, 4).flatmap(lambda d: st.tuples(
    st.just(d), st.lists(st.lists(st.integers(-3, 3), min_size=d, max_size=d), min_size=0, max_size=4)))


@given(cone_rows)
def test_double_description_matches_brute_force(case):
    d, extra = case
    ineqs = [[int(i == j) for j in range(d)] for i in range(d)] + [r for r in extra if any(r)]
    pc = PolyCone.from_inequalities(ineqs, [], d)
    assert set(pc.rays) == brute_extreme_rays(ineqs, d)
    for r in pc.rays:
        assert pc.contains(r)


def test_not_pointed():
    with pytest.raises(NotPointed):
        PolyCone.from_inequalities([[1, 0, 0]], [], 3)


def test_generators_round_trip():
    gens = [(1, 0, 0), (0, 1, 0), (1, 1, 1), (0, 0, 1), (1, 1, 0)]
    pc = PolyCone.from_generators(gens, 3)
    assert set(pc.rays) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert pc.dim == 3


def test_barycentric_volumes():
    chambers = []
    for perm in itertools.permutations(range(3)):
        chambers.append([tuple(int(x in perm[:j]) for x in range(3)) for j in range(1, 4)])
    vols = [simplicial_volume(c) for c in chambers]
    assert vols == [Fraction(1, 6)] * 6


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=6))
def test_triangulation_volume_is_additive(gens):
    gens = [g for g in gens if any(g)]
    if len(gens) < 3 or il.rank(gens) < 3:
        return
    pc = PolyCone.from_generators(gens, 3)
    tris = triangulate(pc)
    assert sum(simplicial_volume(t) for t in tris) == cone_volume(pc)
    # splitting along a generator does not change the total
    a = PolyCone.from_inequalities(list(pc.ineqs) + [[1, -1, 0]], [], 3)
    b = PolyCone.from_inequalities(list(pc.ineqs) + [[-1, 1, 0]], [], 3)
    parts = [cone_volume(c) for c in (a, b) if c.dim == 3]
    assert sum(parts) == cone_volume(pc)


MAPS = [("D5", "D4"), ("D6", "D5"), ("D7", "D6"), ("D8", "D7"), ("E6", "D5"), ("E7", "E6")]


@pytest.mark.parametrize("src,tgt", MAPS)
def test_projection_is_surjective_and_equivariant(src, tgt, systems):
    pi = projection_map(systems(src), systems(tgt))
    assert il.lattice_equal_full(il.transpose([list(r) for r in pi.matrix]), len(pi.matrix))
    assert equivariance_of_projection(pi)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_dn_zero_rays_match_forgetful_map(n, systems):
    # forgetting a point of M_{0,n+1} contracts the n divisors delta_{i, n+1}
    pi = projection_map(systems(f"D{n + 1}"), systems(f"D{n}"))
    t = ray_image_table(pi)
    assert sum(r.kind == "zero" for r in t) == n
    assert all(r.agrees for r in t)


def test_e6_to_d5_table(systems):
    t = ray_image_table(projection_map(systems("E6"), systems("D5")))
    kinds = {k: sum(r.kind == k for r in t) for k in ("zero", "ray", "interior")}
    assert kinds == {"zero": 16, "ray": 60, "interior": 0}
    assert all(r.agrees for r in t)


def test_identity_map(systems):
    e6 = systems("E6")
    t = ray_image_table(projection_map(e6, e6))
    assert all(r.kind == "ray" and r.targets == (r.ray,) and r.coeffs == (1,) for r in t)


@pytest.mark.parametrize("src,tgt", MAPS[:-1])
def test_flat_and_reduced(src, tgt, systems):
    pi = projection_map(systems(src), systems(tgt))
    r = flatness_check(pi, build_F(systems(src)), build_F(systems(tgt)))
    assert r.verdict == "FLAT+REDUCED"


def test_locate(systems):
    F = build_F(systems("E6"))
    c = F.cones[5]
    v = [sum(F.rays[i][k] * (j + 1) for j, i in enumerate(c)) for k in range(F.rank)]
    cone, coeffs = locate(F, v)
    assert dict(zip(cone, coeffs)) == {i: j + 1 for j, i in enumerate(c)}


def test_refine_e6_covers_parents(systems):
    sd = refine_E6(systems("E6"))
    assert len(sd.fan.rays) == 1021 and len(sd.added) == 945
    vols = refinement_volumes(sd)
    assert len(vols) == len(sd.parent.cones) and set(vols.values()) == {1}
