"""The simplicial complex R(Delta) of distinguished subsystems.

Vertices:
  D_n:  D_I for 2 <= |I| < n/2, and D_I x D_{I^c} for |I| = n/2 (n even);
        equivalently the bipartitions of {1..n} with both parts of size >= 2.
  E_6:  A_1's and A_2^3's.
  E_7:  A_1's, A_2's, A_3^2's and A_7's.
A set of vertices is a simplex iff they are pairwise orthogonal or nested,
except that in E_7 the 7-sets of pairwise orthogonal A_1's are removed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .rootsys import RootSystem, index_set_actions
from .subsys import RootSet, enumerate_subsystems

VERTEX_TYPES = {
    "E6": ("A1", "A2^3"),
    "E7": ("A1", "A2", "A3^2", "A7"),
}

Simplex = FrozenSet[int]


@dataclass(frozen=True, eq=False)
class Complex:
    """R(Delta): vertex subsystems, their type labels, and maximal simplices."""
    sys: RootSystem
    vertices: Tuple[RootSet, ...]
    labels: Tuple[str, ...]
    maximal: Tuple[Tuple[int, ...], ...]
    _adj: Tuple[int, ...]

    def __len__(self):
        return len(self.vertices)

    def vertex_index(self, s: RootSet) -> int:
        return self._lookup()[s]

    @lru_cache(maxsize=None)
    def _lookup(self) -> Dict[RootSet, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def compatible(self, i: int, j: int) -> bool:
        return bool(self._adj[i] >> j & 1)

    def is_simplex(self, vs: Iterable[int]) -> bool:
        vs = sorted(set(vs))
        if not all(self.compatible(a, b) for a, b in itertools.combinations(vs, 2)):
            return False
        return not self.contains_fano(vs)

    def contains_fano(self, vs: Sequence[int]) -> bool:
        if self.sys.name != "E7":
            return False
        a1 = [v for v in vs if self.labels[v] == "A1"]
        return len(a1) >= 7 and any(
            all(self.compatible(a, b) for a, b in itertools.combinations(c, 2))
            for c in itertools.combinations(a1, 7))

    def faces(self, simplex: Sequence[int], include_empty: bool = False):
        start = 0 if include_empty else 1
        for k in range(start, len(simplex) + 1):
            yield from itertools.combinations(simplex, k)

    @lru_cache(maxsize=None)
    def all_simplices(self) -> Tuple[Tuple[int, ...], ...]:
        """Every nonempty simplex, sorted by (size, vertices)."""
        out = set()
        for m in self.maximal:
            for f in self.faces(m):
                out.add(f)
        return tuple(sorted(out, key=lambda f: (len(f), f)))

    @property
    def dim(self) -> int:
        return max(len(m) for m in self.maximal) - 1

    def vertex_actions(self):
        """Simple reflections acting on vertex indices."""
        look = self._lookup()
        acts = index_set_actions(self.sys)
        perms = []
        for act in acts:
            perms.append(tuple(look[act(v)] for v in self.vertices))
        return perms

    def link(self, v: int) -> "LinkComplex":
        return link(self, v)


# ---------------------------------------------------------------- vertices


def dn_vertex(sys: RootSystem, part: Iterable[int]) -> RootSet:
    """D_I (for |I| < n/2) or D_I x D_{I^c} (for |I| = n/2), I a set of 0-based coordinates."""
    n = sys.rank
    I = set(part)
    J = set(range(n)) - I
    R = sys.positive_roots

    def supp(v):
        return {k for k, x in enumerate(v) if x}

    roots = {i for i, v in enumerate(R) if supp(v) <= I}
    if 2 * len(I) == n:
        roots |= {i for i, v in enumerate(R) if supp(v) <= J}
    return frozenset(roots)


def bipartition_of(sys: RootSystem, s: RootSet) -> FrozenSet[FrozenSet[int]]:
    """The bipartition {I, I^c} labelling a vertex of R(D_n)."""
    n = sys.rank
    R = sys.positive_roots
    comps: List[set] = []
    for i in s:
        comps.append({k for k, x in enumerate(R[i]) if x})
    merged: List[set] = []
    for c in comps:
        hit = [m for m in merged if m & c]
        for m in hit:
            merged.remove(m)
            c = c | m
        merged.append(c)
    I = frozenset(min(merged, key=lambda m: (len(m), sorted(m))))
    return frozenset({I, frozenset(range(n)) - I})


def r_vertices(sys: RootSystem) -> List[Tuple[str, RootSet]]:
    if sys.kind == "D":
        n = sys.rank
        out = []
        for k in range(2, n // 2 + 1):
            for I in itertools.combinations(range(n), k):
                if 2 * k == n and 0 not in I:
                    continue
                label = f"D{k}" if 2 * k < n else f"D{k}^2"
                out.append((label, dn_vertex(sys, I)))
        return out
    if sys.name in VERTEX_TYPES:
        out = []
        for t in VERTEX_TYPES[sys.name]:
            out += [(t, s) for s in enumerate_subsystems(sys, t)]
        return out
    raise ValueError(f"R(Delta) is defined for D_n (n >= 4), E_6, E_7; not {sys.name}")


# ---------------------------------------------------------------- cliques


def _bron_kerbosch(adj: Sequence[int], n: int) -> List[int]:
    out: List[int] = []

    def bits(x):
        while x:
            low = x & -x
            yield low.bit_length() - 1
            x ^= low

    def rec(R, P, X):
        if not P and not X:
            out.append(R)
            return
        # pivot maximizing |P & N(u)|
        u = max(bits(P | X), key=lambda w: bin(P & adj[w]).count("1"))
        for v in list(bits(P & ~adj[u])):
            rec(R | (1 << v), P & adj[v], X & adj[v])
            P &= ~(1 << v)
            X |= 1 << v

    rec(0, (1 << n) - 1, 0)
    return out


def _mask_to_tuple(m: int) -> Tuple[int, ...]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return tuple(out)


@lru_cache(maxsize=None)
def build_R(sys: RootSystem) -> Complex:
    verts = r_vertices(sys)
    labels = tuple(t for t, _ in verts)
    sets = tuple(s for _, s in verts)
    n = len(sets)
    P = sys.pairings
    size = len(sys)
    perp_mask = []
    for i in range(size):
        m = 0
        for j in range(size):
            if P[i][j] == 0:
                m |= 1 << j
        perp_mask.append(m)
    masks = []
    perps = []
    for s in sets:
        m = 0
        pm = (1 << size) - 1
        for i in s:
            m |= 1 << i
            pm &= perp_mask[i]
        masks.append(m)
        perps.append(pm)
    adj = [0] * n
    for a in range(n):
        ma, pa = masks[a], perps[a]
        row = 0
        for b in range(n):
            if a == b:
                continue
            mb = masks[b]
            if (ma & mb) == ma or (ma & mb) == mb or (mb & ~pa) == 0:
                row |= 1 << b
        adj[a] = row
    cx = Complex(sys, sets, labels, tuple(), tuple(adj))
    cliques = _maximal_cliques_by_orbits(cx)
    if sys.name == "E7":
        cliques = _remove_fano(cx, cliques)
    cliques.sort(key=lambda c: (len(c), c))
    return Complex(sys, sets, labels, tuple(cliques), tuple(adj))


def _vertex_orbit_reps(cx: Complex) -> List[int]:
    perms = cx.vertex_actions()
    seen: set = set()
    reps = []
    for v in range(len(cx)):
        if v in seen:
            continue
        reps.append(v)
        orbit = {v}
        frontier = [v]
        while frontier:
            frontier = list({p[x] for x in frontier for p in perms} - orbit)
            orbit.update(frontier)
        seen |= orbit
    return reps


def _maximal_cliques_by_orbits(cx: Complex) -> List[Tuple[int, ...]]:
    """Maximal cliques of the compatibility graph.

    Every maximal clique is W-conjugate to one through a vertex-orbit
    representative, so it suffices to enumerate cliques in the neighbourhoods
    of those representatives and saturate under W.
    """
    adj = cx._adj
    perms = cx.vertex_actions()
    found = set()
    for v0 in _vertex_orbit_reps(cx):
        nbrs = _mask_to_tuple(adj[v0])
        local = {w: k for k, w in enumerate(nbrs)}
        ladj = []
        for w in nbrs:
            m = 0
            for u in _mask_to_tuple(adj[w] & adj[v0]):
                m |= 1 << local[u]
            ladj.append(m)
        for c in _bron_kerbosch(ladj, len(nbrs)):
            clique = frozenset([v0] + [nbrs[k] for k in _mask_to_tuple(c)])
            if clique in found:
                continue
            found.add(clique)
            frontier = [clique]
            while frontier:
                new = []
                for s in frontier:
                    for p in perms:
                        t = frozenset([p[x] for x in s])
                        if t not in found:
                            found.add(t)
                            new.append(t)
                frontier = new
    return [tuple(sorted(c)) for c in found]


def _remove_fano(cx: Complex, cliques: List[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    keep = set()
    stack = list(cliques)
    while stack:
        c = stack.pop()
        bad = None
        a1 = [v for v in c if cx.labels[v] == "A1"]
        if len(a1) >= 7:
            for f in itertools.combinations(a1, 7):
                if all(cx.compatible(a, b) for a, b in itertools.combinations(f, 2)):
                    bad = f
                    break
        if bad is None:
            keep.add(c)
        else:
            for v in bad:
                stack.append(tuple(x for x in c if x != v))
    # cliques without a Fano set are maximal simplices; a piece cut from a
    # Fano-containing clique is maximal unless some compatible vertex extends
    # it without creating a Fano set
    originals = set(cliques)
    out = []
    for c in keep:
        if c in originals:
            out.append(c)
            continue
        common = ~0
        for v in c:
            common &= cx._adj[v]
        if not any(not cx.contains_fano(sorted(c + (w,))) for w in _mask_to_tuple(common)):
            out.append(c)
    return out


# ---------------------------------------------------------------- links


@dataclass(frozen=True)
class LinkComplex:
    center: int
    vertices: Tuple[int, ...]
    maximal: Tuple[Tuple[int, ...], ...]


def link(cx: Complex, v: int) -> LinkComplex:
    """Simplices tau with v not in tau and tau + v a simplex."""
    maxes = set()
    for m in cx.maximal:
        if v in m:
            maxes.add(tuple(x for x in m if x != v))
    maxes.discard(())
    verts = sorted({x for m in maxes for x in m})
    return LinkComplex(v, tuple(verts), tuple(sorted(maxes)))


def simplex_orbits(cx: Complex, simplices: Iterable[Tuple[int, ...]]) -> List[List[Tuple[int, ...]]]:
    """Partition simplices into W-orbits (each simplex set must be W-stable)."""
    perms = cx.vertex_actions()
    remaining = {frozenset(s) for s in simplices}
    orbits = []
    while remaining:
        seed = min(remaining, key=lambda s: (len(s), sorted(s)))
        orbit = {seed}
        frontier = [seed]
        while frontier:
            new = []
            for s in frontier:
                for p in perms:
                    t = frozenset(p[x] for x in s)
                    if t not in orbit:
                        orbit.add(t)
                        new.append(t)
            frontier = new
        remaining -= orbit
        orbits.append(sorted(tuple(sorted(s)) for s in orbit))
    orbits.sort(key=lambda o: (len(o[0]), o[0]))
    return orbits
