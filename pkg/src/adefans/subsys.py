"""Root subsystems: closure, Dynkin type, enumeration up to the Weyl group, D_4 records.

A subsystem is stored as a frozenset of positive-root indices of the ambient
system (each index standing for the pair +-alpha).  Reflection-closed sets of
roots in a simply-laced system are exactly the closed subsystems, so the
Borel-de Siebenthal procedure (delete nodes of extended Dynkin diagrams,
iterate on the components) produces a representative of every class.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .rootsys import (RootSystem, index_set_actions, reflect, weyl_orbit)

RootSet = FrozenSet[int]

_KIND_ORDER = {"A": 0, "D": 1, "E": 2}


class UnclassifiableDiagram(RuntimeError):
    pass


# ---------------------------------------------------------------- closure


@lru_cache(maxsize=None)
def _reflection_table(sys: RootSystem) -> Tuple[Tuple[int, ...], ...]:
    """table[a][b] = positive index of s_a(b)."""
    R = sys.positive_roots
    return tuple(tuple(sys.index(reflect(sys, a, b)) for b in R) for a in R)


def reflection_closure(sys: RootSystem, seed: Iterable[int]) -> RootSet:
    """Smallest set of positive roots containing ``seed`` and stable under its own reflections."""
    table = _reflection_table(sys)
    out = set(seed)
    frontier = list(out)
    while frontier:
        new = []
        members = list(out)
        for a in frontier:
            row = table[a]
            for b in members:
                for c in (row[b], table[b][a]):
                    if c not in out:
                        out.add(c)
                        new.append(c)
        frontier = new
    return frozenset(out)


def closure_of_vectors(sys: RootSystem, vectors: Iterable[Sequence[int]]) -> RootSet:
    return reflection_closure(sys, (sys.index(v) for v in vectors))


def is_closed(sys: RootSystem, s: Iterable[int]) -> bool:
    s = frozenset(s)
    table = _reflection_table(sys)
    return all(table[a][b] in s for a in s for b in s)


# ---------------------------------------------------------------- Dynkin types


def simple_system(sys: RootSystem, s: RootSet) -> List[int]:
    """Indecomposable elements of a closed set of positive roots (its simple roots)."""
    R = sys.positive_roots
    vecs = {R[i]: i for i in s}
    out = []
    for a in sorted(s):
        va = R[a]
        decomposable = False
        for b in s:
            if b == a:
                continue
            diff = tuple(x - y for x, y in zip(va, R[b]))
            if diff in vecs:
                decomposable = True
                break
        if not decomposable:
            out.append(a)
    return out


def _components(sys: RootSystem, simple: Sequence[int]) -> List[List[int]]:
    P = sys.pairings
    left = list(simple)
    comps = []
    while left:
        comp = [left.pop(0)]
        grew = True
        while grew:
            grew = False
            for x in list(left):
                if any(P[x][y] for y in comp):
                    comp.append(x)
                    left.remove(x)
                    grew = True
        comps.append(sorted(comp))
    return comps


def _classify_component(sys: RootSystem, comp: Sequence[int]) -> Tuple[str, int]:
    P = sys.pairings
    n = len(comp)
    deg = {x: sum(1 for y in comp if y != x and P[x][y]) for x in comp}
    edges = sum(deg.values()) // 2
    if edges != n - 1:
        raise UnclassifiableDiagram(f"component {comp} is not a tree")
    branch = [x for x in comp if deg[x] >= 3]
    if not branch:
        if max(deg.values(), default=0) > 2:
            raise UnclassifiableDiagram(str(comp))
        return ("A", n)
    if len(branch) > 1 or deg[branch[0]] != 3:
        raise UnclassifiableDiagram(f"component {comp} has an unsupported branch")
    b = branch[0]
    legs = []
    for start in (y for y in comp if y != b and P[b][y]):
        length, prev, cur = 1, b, start
        while True:
            nxt = [y for y in comp if y not in (prev, cur) and P[cur][y]]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        legs.append(length)
    legs.sort()
    if legs[0] == 1 and legs[1] == 1:
        return ("D", n)
    if legs[0] == 1 and legs[1] == 2 and legs[2] in (2, 3, 4):
        return ("E", n)
    raise UnclassifiableDiagram(f"legs {legs}")


def format_label(factors: Iterable[Tuple[str, int]]) -> str:
    factors = sorted(factors, key=lambda f: (_KIND_ORDER[f[0]], f[1]))
    if not factors:
        return "0"
    parts = []
    for (k, r), grp in itertools.groupby(factors):
        m = len(list(grp))
        parts.append(f"{k}{r}" + (f"^{m}" if m > 1 else ""))
    return "x".join(parts)


def parse_label(label: str) -> str:
    """Normalize a type string such as ``A3xA3``, ``A2^3``, ``A1xA1xA1`` to canonical form."""
    label = label.replace(" ", "").replace("×", "x").replace("*", "x")
    if label in ("0", "", "empty"):
        return "0"
    factors = []
    for part in label.split("x"):
        base, _, mult = part.partition("^")
        k, r = base[0].upper(), int(base[1:])
        if k not in _KIND_ORDER:
            raise ValueError(f"bad type {label!r}")
        factors += [(k, r)] * (int(mult) if mult else 1)
    return format_label(factors)


def type_factors(sys: RootSystem, s: RootSet) -> List[Tuple[str, int]]:
    simple = simple_system(sys, s)
    return sorted((_classify_component(sys, c) for c in _components(sys, simple)),
                  key=lambda f: (_KIND_ORDER[f[0]], f[1]))


def recognize_type(sys: RootSystem, s: RootSet) -> str:
    """Canonical Dynkin label of a closed subsystem, e.g. ``A1xA5`` or ``A2^3``."""
    return format_label(type_factors(sys, s))


def refined_type(sys: RootSystem, s: RootSet) -> str:
    """Like :func:`recognize_type`, but splits the two classes of A_5 inside E_7.

    ``A5-`` is the class whose perpendicular is A_2, ``A5+`` the other one.
    """
    t = recognize_type(sys, s)
    if sys.name == "E7" and t == "A5":
        return "A5-" if recognize_type(sys, perp(sys, s)) == "A2" else "A5+"
    return t


# ---------------------------------------------------------------- relations


def perp(sys: RootSystem, s: Iterable[int]) -> RootSet:
    P = sys.pairings
    s = list(s)
    return frozenset(i for i in range(len(sys)) if all(P[i][j] == 0 for j in s))


def orthogonal(sys: RootSystem, s: Iterable[int], t: Iterable[int]) -> bool:
    P = sys.pairings
    t = list(t)
    return all(P[i][j] == 0 for i in s for j in t)


def nested(s: RootSet, t: RootSet) -> bool:
    return s <= t or t <= s


def compatible(sys: RootSystem, s: RootSet, t: RootSet) -> bool:
    """Orthogonal or nested: the simplex condition for a pair of subsystems."""
    return nested(s, t) or orthogonal(sys, s, t)


# ---------------------------------------------------------------- enumeration


def _highest_root(sys: RootSystem, comp_roots: RootSet) -> int:
    return max(comp_roots, key=lambda i: (sys.height(i), i))


@lru_cache(maxsize=None)
def subsystem_seeds(sys: RootSystem) -> Tuple[RootSet, ...]:
    """One or more representatives of every class of closed subsystems.

    Repeatedly delete one node from the ordinary or the extended diagram of
    one irreducible component.  The result is not reduced modulo W.
    """
    R = sys.positive_roots
    full = frozenset(range(len(sys)))
    seen = {full}
    queue = [full]
    while queue:
        s = queue.pop()
        simple = simple_system(sys, s)
        for comp in _components(sys, simple):
            comp_roots = reflection_closure(sys, comp)
            theta = R[_highest_root(sys, comp_roots)]
            others = [R[i] for i in simple if i not in comp]
            nodes = [R[i] for i in comp]
            extended = nodes + [tuple(-x for x in theta)]
            for diagram in (nodes, extended):
                for k in range(len(diagram)):
                    kept = others + diagram[:k] + diagram[k + 1:]
                    t = closure_of_vectors(sys, kept)
                    if t not in seen:
                        seen.add(t)
                        queue.append(t)
    seen.add(frozenset())
    return tuple(sorted(seen, key=lambda t: (-len(t), sorted(t))))


def canonical_order(sets: Iterable[RootSet]) -> List[RootSet]:
    return sorted(sets, key=lambda t: (len(t), sorted(t)))


@lru_cache(maxsize=None)
def _enumerate(sys: RootSystem, label: str) -> Tuple[RootSet, ...]:
    refine = label in ("A5+", "A5-")
    typ = "A5" if refine else parse_label(label)
    if typ == "0":
        return (frozenset(),)
    seeds = [s for s in subsystem_seeds(sys) if recognize_type(sys, s) == typ]
    if refine:
        seeds = [s for s in seeds if refined_type(sys, s) == label]
    found: set = set()
    actions = index_set_actions(sys)
    for s in seeds:
        if s in found:
            continue
        found.update(weyl_orbit(s, actions))
    return tuple(canonical_order(found))


def enumerate_subsystems(sys: RootSystem, label: str) -> List[RootSet]:
    """All subsystems of the given type (``A5+``/``A5-`` select the E_7 classes)."""
    return list(_enumerate(sys, label))


def subsystem_classes(sys: RootSystem) -> Dict[str, int]:
    """Number of subsystems of each type, as a sorted dictionary."""
    counts: Counter = Counter()
    for t in {recognize_type(sys, s) for s in subsystem_seeds(sys)}:
        counts[t] = len(_enumerate(sys, t))
    return dict(sorted(counts.items()))


# ---------------------------------------------------------------- D_4 records


@dataclass(frozen=True)
class D4Record:
    roots: RootSet
    fourtuples: Tuple[RootSet, RootSet, RootSet]

    def fourtuple_of(self, i: int) -> int:
        for k, F in enumerate(self.fourtuples):
            if i in F:
                return k
        raise KeyError(i)


def fourtuple_decomposition(sys: RootSystem, d4: RootSet) -> Tuple[RootSet, RootSet, RootSet]:
    """Split the 12 positive roots of a D_4 into its three orthogonal 4-sets.

    The orthogonality graph on D_4^+ is three disjoint copies of K_4, so the
    decomposition is forced.
    """
    P = sys.pairings
    roots = sorted(d4)
    if len(roots) != 12:
        raise ValueError("a D_4 has 12 positive roots")
    parts = []
    left = set(roots)
    while left:
        a = min(left)
        F = frozenset([a] + [b for b in left if b != a and P[a][b] == 0])
        if len(F) != 4 or any(P[x][y] for x in F for y in F if x != y):
            raise ValueError("not a D_4: orthogonality graph is not 3 K_4")
        parts.append(F)
        left -= F
    return tuple(parts)  # type: ignore[return-value]


@lru_cache(maxsize=None)
def _d4_catalog(sys: RootSystem) -> Tuple[D4Record, ...]:
    return tuple(D4Record(d, fourtuple_decomposition(sys, d))
                 for d in enumerate_subsystems(sys, "D4"))


def d4_catalog(sys: RootSystem) -> List[D4Record]:
    return list(_d4_catalog(sys))


def d4_containing(sys: RootSystem, roots: Iterable[int]) -> D4Record:
    """The D_4 record generated by the given roots (which must close up to a D_4)."""
    d = reflection_closure(sys, roots)
    if recognize_type(sys, d) != "D4":
        raise ValueError(f"closure has type {recognize_type(sys, d)}, not D4")
    return D4Record(d, fourtuple_decomposition(sys, d))


# ---------------------------------------------------------------- orthogonal A_1 sets


def orthogonal_root_sets(sys: RootSystem, size: int) -> List[Tuple[int, ...]]:
    """All sets of ``size`` pairwise orthogonal positive roots (clique search)."""
    P = sys.pairings
    n = len(sys)
    out = []

    def grow(current, candidates):
        if len(current) == size:
            out.append(tuple(current))
            return
        for k, c in enumerate(candidates):
            grow(current + [c], [d for d in candidates[k + 1:] if P[c][d] == 0])

    grow([], list(range(n)))
    return out


def is_fano_simplex(sys: RootSystem, a1s: Iterable[int]) -> bool:
    """True iff the seven given A_1's are pairwise orthogonal."""
    a1s = list(a1s)
    if len(a1s) != 7 or len(set(a1s)) != 7:
        raise ValueError("a Fano simplex is a set of exactly 7 distinct A_1's")
    P = sys.pairings
    return all(P[a][b] == 0 for a, b in itertools.combinations(a1s, 2))


def isotropic_subspace_count(n: int = 3, k: int = 3) -> int:
    """Number of k-dimensional totally isotropic subspaces of F_2^{2n} with the standard symplectic form.

    Brute force over spanning tuples, independent of any root system.
    """
    dim = 2 * n

    def form(u: int, v: int) -> int:
        s = 0
        for i in range(n):
            s ^= ((u >> i) & 1) & ((v >> (i + n)) & 1)
            s ^= ((u >> (i + n)) & 1) & ((v >> i) & 1)
        return s

    seen = set()

    def grow(span: frozenset, basis: Tuple[int, ...]):
        if len(basis) == k:
            seen.add(span)
            return
        for v in range(1, 1 << dim):
            if v in span or (basis and v < basis[-1]):
                continue
            if all(form(v, b) == 0 for b in basis):
                grow(span | {x ^ v for x in span}, basis + (v,))

    grow(frozenset([0]), ())
    return len(seen)
