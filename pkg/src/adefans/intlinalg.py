"""Exact integer and rational linear algebra on Python ints.

Matrices are lists of rows of ints (or anything accepted by ``int``).  Nothing
in here touches floating point; the only numpy use is the modular rank, whose
result is a lower bound for the rational rank.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

Matrix = List[List[int]]

# largest prime below 2**31; products of two residues fit in int64
PRIME = 2147483629


def as_matrix(A: Iterable[Iterable[int]]) -> Matrix:
    return [[int(x) for x in row] for row in A]


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence[int]], v: Sequence[int]) -> List[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive(v: Sequence[int]) -> List[int]:
    """Divide a nonzero integer vector by the gcd of its entries."""
    g = content(v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return [int(x) // g for x in v]


def smith_normal_form(A: Sequence[Sequence[int]], transforms: bool = True
                      ) -> Tuple[Optional[Matrix], Matrix, Optional[Matrix]]:
    """Return (U, D, V) with U @ A @ V == D, D diagonal with d_1 | d_2 | ...

    U and V are unimodular.  With ``transforms=False`` only D is computed and
    U, V are returned as None.
    """
    D = as_matrix(A)
    m = len(D)
    n = len(D[0]) if m else 0
    U = identity(m) if transforms else None
    V = identity(n) if transforms else None

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        if q:
            rd, rs = D[dst], D[src]
            for k in range(n):
                if rs[k]:
                    rd[k] -= q * rs[k]
            if U is not None:
                ud, us = U[dst], U[src]
                for k in range(m):
                    if us[k]:
                        ud[k] -= q * us[k]

    def add_col(dst, src, q):  # col dst -= q * col src
        if q:
            for row in D:
                if row[src]:
                    row[dst] -= q * row[src]
            if V is not None:
                for row in V:
                    if row[src]:
                        row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // p
                    add_row(i, t, q)
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // p
                    add_col(j, t, q)
                    if D[t][j]:
                        done = False
            if done:
                # divisibility condition on the rest of the block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, -1)
                continue
            # move the smallest entry of row/col t to the pivot
            best = (abs(D[t][t]), t, t)
            for i in range(t + 1, m):
                if D[i][t] and abs(D[i][t]) < best[0]:
                    best = (abs(D[i][t]), i, t)
            for j in range(t + 1, n):
                if D[t][j] and abs(D[t][j]) < best[0]:
                    best = (abs(D[t][j]), t, j)
            swap_rows(t, best[1])
            swap_cols(t, best[2])
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def elementary_divisors(A: Sequence[Sequence[int]]) -> List[int]:
    """Nonzero Smith invariants of A (length = rank)."""
    if not A or not A[0]:
        return []
    _, D, _ = smith_normal_form(A, transforms=False)
    out = []
    for i in range(min(len(D), len(D[0]))):
        if D[i][i]:
            out.append(D[i][i])
    return out


def hermite_rows(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form: a basis of the row lattice in echelon form."""
    H = [list(map(int, r)) for r in rows if any(r)]
    if not H:
        return []
    n = len(H[0])
    out: Matrix = []
    col = 0
    while H and col < n:
        nz = [r for r in H if r[col]]
        rest = [r for r in H if not r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [a - q * b for a, b in zip(r, piv)]
                if r2[col]:
                    new.append(r2)
                elif any(r2):
                    rest.append(r2)
            nz = new
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        for k, r in enumerate(out):
            q = r[col] // piv[col]
            if q:
                out[k] = [a - q * b for a, b in zip(r, piv)]
        out.append(piv)
        H = rest
        col += 1
    return out


def rank(A: Sequence[Sequence[int]]) -> int:
    """Exact rank over Q by fraction-free elimination."""
    M = [list(map(int, r)) for r in A]
    if not M:
        return 0
    m, n = len(M), len(M[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        for i in range(r + 1, m):
            a = M[i][c]
            row_i, row_r = M[i], M[r]
            M[i] = [(p * row_i[k] - a * row_r[k]) // prev for k in range(n)]
        prev = p
        r += 1
        if r == m:
            break
    return r


def det(A: Sequence[Sequence[int]]) -> int:
    """Exact determinant (Bareiss)."""
    M = [list(map(int, r)) for r in A]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if M[i][k]), None)
            if piv is None:
                return 0
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank_mod_p(A, p: int = PRIME) -> int:
    """Rank over F_p.  Never exceeds the rational rank."""
    M = np.array(A, dtype=np.int64) % p
    if M.ndim != 2 or M.size == 0:
        return 0
    m, n = M.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            M[rows] = (M[rows] - np.outer(col[rows], M[r]) % p) % p
        r += 1
    return r


def rref_rational(A: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q and its pivot columns."""
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return [], []
    m, n = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return M[:r], pivots


def nullspace_rational(A: Sequence[Sequence], ncols: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of {x : A x = 0} over Q."""
    if not A:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref_rational(A)
    n = len(A[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def integer_kernel(A: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Matrix:
    """Saturated integer basis of {x in Z^n : A x = 0}."""
    n = len(A[0]) if A else (ncols or 0)
    if not A:
        return identity(n)
    # columns of V beyond rank span the kernel lattice, since U A V = D
    _, D, V = smith_normal_form(A)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(r, n)]


def solve_rational(A: Sequence[Sequence], b: Sequence) -> Optional[List[Fraction]]:
    """One solution of A x = b over Q, or None."""
    aug = [list(row) + [bb] for row, bb in zip(A, b)]
    n = len(A[0]) if A else 0
    R, piv = rref_rational(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, pc in zip(R, piv):
        x[pc] = row[n]
    return x


def is_unimodular_rows(rows: Sequence[Sequence[int]]) -> bool:
    """True iff the rows extend to a Z-basis (full rank, all Smith invariants 1)."""
    if not rows:
        return True
    divs = elementary_divisors(rows)
    return len(divs) == len(rows) and all(d == 1 for d in divs)


def lattice_equal_full(rows: Sequence[Sequence[int]], n: int) -> bool:
    """True iff the rows generate all of Z^n."""
    divs = elementary_divisors(rows) if rows else []
    return len(divs) == n and all(d == 1 for d in divs)


# primes below 2**31, used for batched modular determinants
BATCH_PRIMES = (2147483629, 2147483587, 2147483579, 2147483563, 2147483549,
                2147483543, 2147483497, 2147483489, 2147483477, 2147483423)


def _modpow_vec(base: np.ndarray, exp: int, p: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base % p
    while exp:
        if exp & 1:
            result = result * b % p
        b = b * b % p
        exp >>= 1
    return result


def batched_det_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants modulo p of a stack of square integer matrices, shape (B, n, n)."""
    M = np.array(mats, dtype=np.int64) % p
    B, n, _ = M.shape
    det = np.ones(B, dtype=np.int64)
    idx = np.arange(B)
    for c in range(n):
        nz = M[:, c:, c] != 0
        has = nz.any(axis=1)
        det[~has] = 0
        piv = np.argmax(nz, axis=1) + c
        swap = piv != c
        if swap.any():
            rc = M[idx, c].copy()
            M[idx, c] = M[idx, piv]
            M[idx, piv] = rc
            det = np.where(swap, (p - det) % p, det)
        pv = M[:, c, c].copy()
        pv[~has] = 1
        det = det * pv % p
        if c + 1 < n:
            inv = _modpow_vec(pv, p - 2, p)
            f = M[:, c + 1:, c] * inv[:, None] % p
            M[:, c + 1:, c:] = (M[:, c + 1:, c:] - f[:, :, None] * M[:, c, None, c:] % p) % p
    return det


def batched_is_unimodular(mats: np.ndarray, chunk: int = 4000) -> np.ndarray:
    """Exact test det == +-1 for a stack of square integer matrices.

    det is computed modulo enough primes that their product exceeds twice the
    Hadamard bound, so a residue of +-1 modulo all of them forces det = +-1.
    """
    mats = np.asarray(mats, dtype=np.int64)
    B = mats.shape[0]
    if B == 0:
        return np.zeros(0, dtype=bool)
    sq = mats.astype(np.float64) ** 2
    # Hadamard bound by rows or by columns, whichever is smaller
    by_rows = np.log2(np.maximum(np.sqrt(sq.sum(axis=2)), 1.0)).sum(axis=1)
    by_cols = np.log2(np.maximum(np.sqrt(sq.sum(axis=1)), 1.0)).sum(axis=1)
    log_bound = float(np.minimum(by_rows, by_cols).max()) + 1.0
    primes = []
    acc = 0.0
    for q in BATCH_PRIMES:
        primes.append(q)
        acc += np.log2(q)
        if acc > log_bound + 2:
            break
    else:
        raise ValueError("matrices too large for the batched determinant test")
    ok = np.ones(B, dtype=bool)
    for start in range(0, B, chunk):
        block = mats[start:start + chunk]
        plus = np.ones(len(block), dtype=bool)
        minus = np.ones(len(block), dtype=bool)
        for q in primes:
            d = batched_det_mod_p(block, q)
            plus &= d == 1
            minus &= d == q - 1
        ok[start:start + chunk] = plus | minus
    return ok
