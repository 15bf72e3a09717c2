"""Integer linear algebra, checked against sympy as an independent oracle."""

from __future__ import annotations

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import invariant_factors

from adefans import intlinalg as il


def matrices(max_rows=5, max_cols=5, lo=-6, hi=6):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                               min_size=m, max_size=m)))


def sympy_divisors(A):
    inv = invariant_factors(sympy.Matrix(A), domain=sympy.ZZ)
    return [abs(int(d)) for d in inv if d != 0]


@given(matrices())
def test_smith_divisors_match_sympy(A):
    assert il.elementary_divisors(A) == sympy_divisors(A)


@given(matrices())
def test_smith_transforms(A):
    U, D, V = il.smith_normal_form(A)
    assert il.matmul(il.matmul(U, A), V) == D
    assert abs(il.det(U)) == 1 and abs(il.det(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(matrices(5, 5))
def test_det_matches_sympy(A):
    n = min(len(A), len(A[0]))
    sq = [row[:n] for row in A[:n]]
    assert il.det(sq) == int(sympy.Matrix(sq).det())


@given(matrices(4, 6))
def test_kernel_is_saturated(A):
    K = il.integer_kernel(A)
    n = len(A[0])
    assert len(K) == n - il.rank(A)
    for k in K:
        assert il.matvec(A, k) == [0] * len(A)
    if K:
        assert il.is_unimodular_rows(K)


@given(matrices(5, 4))
def test_hermite_same_lattice(A):
    H = il.hermite_rows(A)
    nz = [r for r in A if any(r)]
    if not nz:
        assert H == []
        return
    # equal lattices: each generating set has the same Smith divisors as the union
    assert il.elementary_divisors(H) == il.elementary_divisors(nz) == il.elementary_divisors(H + nz)


def test_primitive_and_content():
    assert il.primitive([4, -6, 0]) == [2, -3, 0]
    assert il.content([4, -6, 0]) == 2
    with pytest.raises(ValueError):
        il.primitive([0, 0])


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_batched_determinants(n, seed):
    rng = np.random.default_rng(seed)
    mats = rng.integers(-3, 4, size=(20, n, n))
    # include some unimodular matrices: products of elementary ones
    for k in range(0, 20, 3):
        M = np.eye(n, dtype=np.int64)
        for _ in range(6):
            i, j = rng.choice(n, 2, replace=False)
            M[i] += int(rng.integers(-2, 3)) * M[j]
        mats[k] = M
    got = il.batched_is_unimodular(mats)
    want = [abs(il.det(m.tolist())) == 1 for m in mats]
    assert list(got) == want
    p = il.BATCH_PRIMES[0]
    dets = il.batched_det_mod_p(mats, p)
    assert [int(d) for d in dets] == [il.det(m.tolist()) % p for m in mats]


def test_solve_rational():
    A = [[2, 1], [1, 3]]
    x = il.solve_rational(A, [3, 5])
    assert il.matvec([[2, 1], [1, 3]], [int(v * 5) for v in x]) == [15, 25]
    assert il.solve_rational([[1, 1], [1, 1]], [1, 2]) is None
