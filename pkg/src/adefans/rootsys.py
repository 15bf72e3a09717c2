"""A-D-E root systems with an exact negative-definite pairing.

Coordinates follow the classical models:

* ``E_n``: the Picard lattice of the blow-up of the plane in ``n`` points,
  basis ``(h, e_1, ..., e_n)`` with ``h.h = 1``, ``e_i.e_j = -delta_ij``.
  Roots are the classes of square ``-2`` orthogonal to the canonical class.
* ``D_n``: ``Z^n`` with ``eps_i.eps_j = -delta_ij``; roots ``+-eps_i +- eps_j``.
* ``A_n``: ``Z^{n+1}`` with the same pairing; roots ``eps_i - eps_j``.

All roots have self-pairing ``-2``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Hashable, List, Sequence, Tuple

import numpy as np

from .intlinalg import det

Vector = Tuple[int, ...]

SUPPORTED = {
    "A": range(1, 9),
    "D": range(3, 9),
    "E": (6, 7),
}


class UnsupportedSystem(ValueError):
    pass


class OrbitTooLarge(RuntimeError):
    pass


def supported_names() -> List[str]:
    return [f"{k}{n}" for k, ns in SUPPORTED.items() for n in ns]


def pair(gram: Sequence[Sequence[int]], u: Sequence[int], v: Sequence[int]) -> int:
    return sum(gram[i][j] * u[i] * v[j]
               for i in range(len(u)) if u[i]
               for j in range(len(v)) if v[j])


def _diag_pair(diag: Sequence[int]) -> Callable[[Sequence[int], Sequence[int]], int]:
    def f(u, v):
        return sum(d * a * b for d, a, b in zip(diag, u, v))
    return f


@dataclass(frozen=True, eq=False)
class RootSystem:
    kind: str
    rank: int
    gram: Tuple[Tuple[int, ...], ...]
    positive_roots: Tuple[Vector, ...]
    simple_roots: Tuple[Vector, ...]
    # index of each simple root inside positive_roots
    simple_index: Tuple[int, ...]
    # simple-root coordinates of each positive root
    simple_coords: Tuple[Tuple[int, ...], ...]
    _index: Dict[Vector, int] = field(repr=False, compare=False)
    _diag: Tuple[int, ...] = field(repr=False, compare=False)

    @property
    def name(self) -> str:
        return f"{self.kind}{self.rank}"

    def __repr__(self):
        return f"RootSystem({self.name}, |pos|={len(self.positive_roots)})"

    def __len__(self):
        return len(self.positive_roots)

    @property
    def dim(self) -> int:
        return len(self.gram)

    def pair(self, u: Sequence[int], v: Sequence[int]) -> int:
        return sum(d * a * b for d, a, b in zip(self._diag, u, v))

    def index(self, v: Sequence[int]) -> int:
        """Index of the positive root equal to +-v."""
        v = tuple(v)
        i = self._index.get(v)
        if i is None:
            i = self._index.get(tuple(-x for x in v))
        if i is None:
            raise KeyError(f"{v} is not a root of {self.name}")
        return i

    def signed_index(self, v: Sequence[int]) -> Tuple[int, int]:
        v = tuple(v)
        i = self._index.get(v)
        if i is not None:
            return i, 1
        return self._index[tuple(-x for x in v)], -1

    def is_root(self, v: Sequence[int]) -> bool:
        v = tuple(v)
        return v in self._index or tuple(-x for x in v) in self._index

    def root_pairing(self, i: int, j: int) -> int:
        return self._pairings()[i][j]

    @lru_cache(maxsize=None)
    def _pairings(self) -> Tuple[Tuple[int, ...], ...]:
        R = self.positive_roots
        return tuple(tuple(self.pair(a, b) for b in R) for a in R)

    @property
    def pairings(self) -> Tuple[Tuple[int, ...], ...]:
        return self._pairings()

    @property
    def weyl_generators(self) -> List[List[List[int]]]:
        """Simple reflections as integer matrices acting on column vectors."""
        mats = []
        n = self.dim
        for a in self.simple_roots:
            cols = []
            for k in range(n):
                ek = [int(i == k) for i in range(n)]
                cols.append(reflect(self, a, ek))
            mats.append([[cols[j][i] for j in range(n)] for i in range(n)])
        return mats

    @lru_cache(maxsize=None)
    def generator_permutations(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        """For each simple reflection, the signed image (index, sign) of every positive root."""
        out = []
        for a in self.simple_roots:
            out.append(tuple(self.signed_index(reflect(self, a, r)) for r in self.positive_roots))
        return tuple(out)

    @lru_cache(maxsize=None)
    def dynkin_edges(self) -> Tuple[Tuple[int, int], ...]:
        S = self.simple_roots
        return tuple((i, j) for i in range(len(S)) for j in range(i + 1, len(S))
                     if self.pair(S[i], S[j]) != 0)

    def support(self, i: int) -> Tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.simple_coords[i]) if c)

    def height(self, i: int) -> int:
        return sum(self.simple_coords[i])


def reflect(sys: RootSystem, r: Sequence[int], v: Sequence[int]) -> List[int]:
    """The reflection v -> v + (r, v) r; for a root r this fixes r-perp and negates r."""
    c = sys.pair(r, v)
    return [x + c * y for x, y in zip(v, r)]


def _ambient(kind: str, rank: int) -> Tuple[List[int], List[Vector], List[Vector]]:
    """Diagonal of the ambient pairing, all roots, and simple roots."""
    if kind == "E":
        n = rank
        diag = [1] + [-1] * n
        K = [-3] + [1] * n
        # sum(b) = 3a and a^2 - sum(b^2) = -2 force |a| <= 2, |b_i| <= 2 for n <= 7
        box = np.array(list(itertools.product(range(-2, 3), repeat=n + 1)), dtype=np.int64)
        sq = (box * box * np.array(diag)).sum(axis=1)
        dotk = (box * np.array(diag) * np.array(K)).sum(axis=1)
        roots = {tuple(int(x) for x in row) for row in box[(sq == -2) & (dotk == 0)]}
        simple = []
        for i in range(1, n):
            v = [0] * (n + 1)
            v[i], v[i + 1] = 1, -1
            simple.append(tuple(v))
        v = [1] + [-1, -1, -1] + [0] * (n - 3)
        simple.append(tuple(v))
        return diag, sorted(roots), simple
    if kind == "D":
        n = rank
        diag = [-1] * n
        roots = []
        for i, j in itertools.combinations(range(n), 2):
            for si in (1, -1):
                for sj in (1, -1):
                    v = [0] * n
                    v[i], v[j] = si, sj
                    roots.append(tuple(v))
        simple = []
        for i in range(n - 1):
            v = [0] * n
            v[i], v[i + 1] = 1, -1
            simple.append(tuple(v))
        v = [0] * n
        v[n - 2], v[n - 1] = 1, 1
        simple.append(tuple(v))
        return diag, sorted(roots), simple
    if kind == "A":
        n = rank + 1
        diag = [-1] * n
        roots = []
        for i, j in itertools.permutations(range(n), 2):
            v = [0] * n
            v[i], v[j] = 1, -1
            roots.append(tuple(v))
        simple = []
        for i in range(n - 1):
            v = [0] * n
            v[i], v[i + 1] = 1, -1
            simple.append(tuple(v))
        return diag, sorted(roots), simple
    raise UnsupportedSystem(kind)


def _simple_coordinates(diag, simple, v) -> Tuple[int, ...]:
    """Solve v = sum c_i simple_i using the (nondegenerate) Gram matrix of the simple roots."""
    n = len(simple)
    f = _diag_pair(diag)
    G = [[f(a, b) for b in simple] for a in simple]
    rhs = [f(a, v) for a in simple]
    # Cramer's rule keeps this exact and dependency free (n <= 8)
    d = det(G)
    coords = []
    for k in range(n):
        Gk = [row[:k] + [rhs[i]] + row[k + 1:] for i, row in enumerate(G)]
        c = Fraction(det(Gk), d)
        if c.denominator != 1:
            raise ValueError(f"{v} is not in the root lattice")
        coords.append(int(c))
    return tuple(coords)


@lru_cache(maxsize=None)
def build_root_system(kind: str, rank: int) -> RootSystem:
    """Construct one of A_n (n<=8), D_n (3<=n<=8), E_6, E_7."""
    kind = kind.upper()
    if kind not in SUPPORTED or rank not in SUPPORTED[kind]:
        raise UnsupportedSystem(
            f"unsupported root system {kind}{rank}; supported: {', '.join(supported_names())}")
    diag, roots, simple = _ambient(kind, rank)
    positive = []
    for v in roots:
        c = _simple_coordinates(diag, simple, v)
        first = next(x for x in c if x)
        if first > 0:
            positive.append((v, c))
    positive.sort()
    pos = tuple(v for v, _ in positive)
    coords = tuple(c for _, c in positive)
    index = {v: i for i, v in enumerate(pos)}
    n = len(diag)
    gram = tuple(tuple(diag[i] if i == j else 0 for j in range(n)) for i in range(n))
    return RootSystem(
        kind=kind, rank=rank, gram=gram, positive_roots=pos,
        simple_roots=tuple(simple),
        simple_index=tuple(index[s] for s in simple),
        simple_coords=coords, _index=index, _diag=tuple(diag),
    )


def parse_system(name: str) -> RootSystem:
    name = name.strip().upper()
    if len(name) < 2 or not name[1:].isdigit():
        raise UnsupportedSystem(f"cannot parse root system name {name!r}")
    return build_root_system(name[0], int(name[1:]))


def weyl_orbit(seed: Hashable, actions: Sequence[Callable[[Hashable], Hashable]],
               cap: int = 10**7) -> List[Hashable]:
    """Breadth-first closure of ``seed`` under the given generator actions.

    Elements must already be canonical (hashable, equal iff the same element).
    Returned in discovery order, which is deterministic for deterministic actions.
    """
    seen = {seed}
    order = [seed]
    queue = deque([seed])
    while queue:
        x = queue.popleft()
        for act in actions:
            y = act(x)
            if y not in seen:
                seen.add(y)
                order.append(y)
                if len(order) > cap:
                    raise OrbitTooLarge(f"orbit exceeded cap of {cap} elements")
                queue.append(y)
    return order


def index_set_actions(sys: RootSystem) -> List[Callable[[frozenset], frozenset]]:
    """Simple reflections acting on sets of positive-root indices (i.e. on sets of A_1's)."""
    perms = [tuple(i for i, _ in p) for p in sys.generator_permutations()]
    return [lambda s, p=p: frozenset(p[i] for i in s) for p in perms]


def three_legged_support(i: int, sys: RootSystem) -> bool:
    """True iff the support of positive root ``i`` contains a vertex of degree 3 in the support."""
    supp = set(sys.support(i))
    deg = {k: 0 for k in supp}
    for a, b in sys.dynkin_edges():
        if a in supp and b in supp:
            deg[a] += 1
            deg[b] += 1
    return any(d >= 3 for d in deg.values())


def three_legged_roots(sys: RootSystem) -> List[int]:
    return [i for i in range(len(sys)) if three_legged_support(i, sys)]


def root_label(sys: RootSystem, i: int) -> str:
    """Short human-readable label: ij, ijk, i (for beta_i) in E_n; +-eps otherwise."""
    v = sys.positive_roots[i]
    if sys.kind == "E":
        a, e = v[0], v[1:]
        if a == 0:
            p = [k + 1 for k, x in enumerate(e) if x == 1]
            m = [k + 1 for k, x in enumerate(e) if x == -1]
            return f"{p[0]}{m[0]}"
        if a == 1:
            return "".join(str(k + 1) for k, x in enumerate(e) if x == -1)
        if a == 2:
            missing = [k + 1 for k, x in enumerate(e) if x == 0]
            # in E_6 the root 2h - e_1 - ... - e_6 is beta_7 of the ambient E_7
            return "".join(map(str, missing)) if missing else str(sys.rank + 1)
    terms = []
    for k, x in enumerate(v):
        if x:
            terms.append(("+" if x > 0 else "-") + f"e{k + 1}")
    return "".join(terms).lstrip("+")


def root_from_label(sys: RootSystem, label: str) -> int:
    """Inverse of ``root_label`` for E_n labels ``ij`` (e_i - e_j), ``ijk``, ``i`` (beta_i)."""
    if sys.kind != "E":
        raise ValueError("labels of this form exist only for E_n")
    n = sys.rank
    digits = [int(c) for c in label]
    v = [0] * (n + 1)
    if len(digits) == 2:
        i, j = digits
        v[i], v[j] = 1, -1
    elif len(digits) == 3:
        v[0] = 1
        for k in digits:
            v[k] = -1
    elif len(digits) == 1:
        v[0] = 2
        for k in range(1, n + 1):
            if k != digits[0]:
                v[k] = -1
    else:
        raise ValueError(label)
    return sys.index(v)
