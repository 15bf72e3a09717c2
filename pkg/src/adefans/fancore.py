"""The fans F(Delta), G(Delta), G'(E_7) and their certificates.

Rays of F are the first lattice points zeta(Theta) of psi(Theta) for the
vertices Theta of R(Delta); cones are the simplices of R(Delta).  G has one
maximal cone per n-gon (D_n), pentadiagram (E_6) or tetradiagram (E_7).

Most certificates are checked on one representative per W-orbit of cones and
transported by the Weyl group, whose action on N is computed exactly and
checked to permute rays, cones and D_4 data consistently
(:func:`equivariance_report`).  Strict simpliciality is checked on every cone.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import intlinalg as il
from .charlat import build_N, d4_unit
from .complexes import Complex, build_R, simplex_orbits
from .rootsys import RootSystem, index_set_actions, reflect
from .subsys import (D4Record, RootSet, d4_catalog, recognize_type, reflection_closure)


class FanError(RuntimeError):
    pass


# ---------------------------------------------------------------- fan data


@dataclass(frozen=True, eq=False)
class FanData:
    """A simplicial fan in N(Delta): primitive rays and maximal cones (ray index tuples)."""
    system: str
    name: str
    rays: Tuple[Tuple[int, ...], ...]
    labels: Tuple[str, ...]
    subsystems: Tuple[RootSet, ...]
    cones: Tuple[Tuple[int, ...], ...]
    rank: int
    meta: Dict[str, object] = field(default_factory=dict, compare=False)

    def cone_matrix(self, cone: Sequence[int]) -> List[List[int]]:
        return [list(self.rays[i]) for i in cone]


@lru_cache(maxsize=None)
def build_F(sys: RootSystem) -> FanData:
    N = build_N(sys)
    cx = build_R(sys)
    rays = []
    for v in cx.vertices:
        p = N.psi_set(v)
        if not any(p):
            raise FanError(f"psi of a vertex of R({sys.name}) vanishes")
        rays.append(tuple(il.primitive(p)))
    seen: Dict[Tuple[int, ...], int] = {}
    for i, r in enumerate(rays):
        for key in (r, tuple(-x for x in r)):
            if key in seen:
                raise FanError(f"vertices {seen[key]} and {i} give proportional rays")
        seen[r] = i
    return FanData(sys.name, "F", tuple(rays), cx.labels, cx.vertices, cx.maximal, N.rank,
                   {"construction": "simplices of R"})


# ---------------------------------------------------------------- Weyl action on N


def _n_matrix(sys: RootSystem, perm: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """Matrix A on N-coordinates with A psi = psi P for the root permutation P."""
    N = build_N(sys)
    A = il.transpose([N.psi_root(perm[t]) for t in N.basis_roots])
    for i in range(len(sys)):
        if il.matvec(A, N.psi_root(i)) != N.psi_root(perm[i]):
            raise FanError("W action on N is not well defined")
    return tuple(map(tuple, A))


@lru_cache(maxsize=None)
def weyl_n_matrices(sys: RootSystem) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
    """Simple reflections acting on N-coordinates: A_s psi = psi P_s."""
    return tuple(_n_matrix(sys, [i for i, _ in p]) for p in sys.generator_permutations())


def reflection_n_matrix(sys: RootSystem, root: int) -> Tuple[Tuple[int, ...], ...]:
    """The reflection in any positive root, acting on N-coordinates."""
    a = sys.positive_roots[root]
    return _n_matrix(sys, [sys.index(reflect(sys, a, r)) for r in sys.positive_roots])


def random_weyl_word(sys: RootSystem, rng: random.Random, length: int = 30) -> List[int]:
    return [rng.randrange(sys.rank) for _ in range(length)]


def apply_word_n(sys: RootSystem, word: Sequence[int], v: Sequence[int]) -> List[int]:
    mats = weyl_n_matrices(sys)
    v = list(v)
    for g in word:
        v = il.matvec(mats[g], v)
    return v


def apply_word_roots(sys: RootSystem, word: Sequence[int], s: Iterable[int]) -> RootSet:
    acts = index_set_actions(sys)
    s = frozenset(s)
    for g in word:
        s = acts[g](s)
    return s


@dataclass
class EquivarianceReport:
    rays_ok: bool
    cones_ok: bool
    d4_ok: bool
    checked_words: int

    @property
    def ok(self) -> bool:
        return self.rays_ok and self.cones_ok and self.d4_ok


def equivariance_report(fd: FanData, sys: RootSystem, words: Sequence[Sequence[int]] = ()) -> EquivarianceReport:
    """Generators (and the given words) map rays to rays, cones to cones, D_4 fourtuples to fourtuples."""
    look = {s: i for i, s in enumerate(fd.subsystems)}
    acts = index_set_actions(sys)
    mats = weyl_n_matrices(sys)
    rays_ok = True
    perms = []
    for g, act in enumerate(acts):
        perm = []
        for i, s in enumerate(fd.subsystems):
            j = look.get(act(s))
            if j is None or il.matvec(mats[g], fd.rays[i]) != list(fd.rays[j]):
                rays_ok = False
                j = -1
            perm.append(j)
        perms.append(perm)
    cone_set = set(fd.cones)
    cones_ok = rays_ok and all(tuple(sorted(p[x] for x in c)) in cone_set
                               for p in perms for c in fd.cones)
    for w in words:
        for i, s in enumerate(fd.subsystems):
            j = look.get(apply_word_roots(sys, w, s))
            if j is None or apply_word_n(sys, w, fd.rays[i]) != list(fd.rays[j]):
                rays_ok = False
    d4_ok = True
    cat = d4_catalog(sys)
    parts = {frozenset(r.fourtuples) for r in cat}
    for act in acts:
        for r in cat:
            if frozenset(act(F) for F in r.fourtuples) not in parts:
                d4_ok = False
    return EquivarianceReport(rays_ok, cones_ok, d4_ok, len(words))


# ---------------------------------------------------------------- strict simpliciality


def is_strictly_simplicial(gens: Sequence[Sequence[int]]) -> bool:
    """Generated by part of a lattice basis: all Smith invariants equal 1."""
    if not gens:
        return True
    return il.is_unimodular_rows(gens)


@dataclass
class SimplicialityReport:
    cones: int
    failures: List[int]

    @property
    def ok(self) -> bool:
        return not self.failures


def strict_simpliciality_report(fd: FanData) -> SimplicialityReport:
    """Checks every maximal cone (faces of a strictly simplicial cone are strictly simplicial)."""
    bad = []
    square = bool(fd.cones) and all(len(c) == fd.rank for c in fd.cones)
    if square and len(fd.cones) > 50:
        arr = np.array([fd.cone_matrix(c) for c in fd.cones], dtype=np.int64)
        ok = il.batched_is_unimodular(arr)
        bad = [int(i) for i in np.nonzero(~ok)[0]]
    else:
        for k, c in enumerate(fd.cones):
            if not is_strictly_simplicial(fd.cone_matrix(c)):
                bad.append(k)
    return SimplicialityReport(len(fd.cones), bad)


# ---------------------------------------------------------------- pairwise fan check


def _lp_feasible(A: List[List[Fraction]], b: List[Fraction]) -> bool:
    """Is {x >= 0 : A x = b} nonempty?  Phase-one simplex with Bland's rule, exact."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        r = [Fraction(x) for x in A[i]]
        bi = Fraction(b[i])
        if bi < 0:
            r = [-x for x in r]
            bi = -bi
        rows.append(r + [Fraction(int(j == i)) for j in range(m)] + [bi])
    basis = [n + i for i in range(m)]
    width = n + m
    # objective: minimize the sum of artificials -> reduced costs
    while True:
        cost = [Fraction(0)] * (width + 1)
        for i, bi in enumerate(basis):
            if bi >= n:
                for j in range(width + 1):
                    cost[j] -= rows[i][j]
        for j in range(n, width):
            if j in basis:
                cost[j] = Fraction(0)
            else:
                cost[j] += 1
        enter = next((j for j in range(width) if cost[j] < 0 and j not in basis), None)
        if enter is None:
            return -cost[width] == 0
        ratios = [(rows[i][width] / rows[i][enter], basis[i], i)
                  for i in range(m) if rows[i][enter] > 0]
        if not ratios:
            return -cost[width] == 0
        _, _, r = min(ratios)
        piv = rows[r][enter]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        basis[r] = enter


def cones_meet_properly(S: Sequence[Sequence[int]], T: Sequence[Sequence[int]],
                        common: int = 0) -> bool:
    """For simplicial cones cone(S), cone(T) whose first ``common`` generators agree,
    test cone(S) & cone(T) == cone(common generators)."""
    gens = [list(v) for v in S] + [list(v) for v in T[common:]]
    if il.rank_mod_p(gens) == len(gens):
        return True
    # look for lambda, mu >= 0 with sum lambda s = sum mu t and weight off the common face
    n = len(S[0])
    cols = [list(v) for v in S] + [[-x for x in v] for v in T]
    A = [[Fraction(cols[j][i]) for j in range(len(cols))] for i in range(n)]
    norm = [Fraction(0 if (j < common or len(S) <= j < len(S) + common) else 1)
            for j in range(len(cols))]
    A.append(norm)
    b = [Fraction(0)] * n + [Fraction(1)]
    return not _lp_feasible(A, b)


@dataclass
class FanCheck:
    ok: bool
    pairs_checked: int
    witness: Optional[Tuple[int, int]] = None


def _pair_ok(fd: FanData, a: Sequence[int], b: Sequence[int]) -> bool:
    common = sorted(set(a) & set(b))
    sa = common + [x for x in a if x not in common]
    sb = common + [x for x in b if x not in common]
    return cones_meet_properly(fd.cone_matrix(sa), fd.cone_matrix(sb), len(common))


def is_fan(fd: FanData, pairs: Optional[Iterable[Tuple[int, int]]] = None) -> FanCheck:
    """Pairwise check that maximal cones meet along common faces."""
    if pairs is None:
        pairs = itertools.combinations(range(len(fd.cones)), 2)
    count = 0
    for i, j in pairs:
        count += 1
        if not _pair_ok(fd, fd.cones[i], fd.cones[j]):
            return FanCheck(False, count, (i, j))
    return FanCheck(True, count)


def is_fan_modulo_symmetry(fd: FanData, sys: RootSystem) -> FanCheck:
    """Pairs (sigma_rep, tau) for one sigma per W-orbit and every tau; W-invariance covers the rest."""
    cx = build_R(sys)
    reps = [fd.cones.index(o[0]) for o in simplex_orbits(cx, fd.cones)]
    return is_fan(fd, ((r, j) for r in reps for j in range(len(fd.cones)) if j != r))


def sampled_is_fan(fd: FanData, samples: int, seed: int = 0) -> FanCheck:
    rng = random.Random(seed)
    n = len(fd.cones)
    pairs = []
    for _ in range(samples):
        i = rng.randrange(n)
        # half the samples share a ray with cone i, where overlaps actually happen
        if rng.random() < 0.5:
            j = rng.randrange(n)
        else:
            j = _random_neighbour(fd, i, rng)
        if i != j:
            pairs.append((i, j))
    return is_fan(fd, pairs)


@lru_cache(maxsize=None)
def _cones_by_ray(fd: FanData) -> Tuple[Tuple[int, ...], ...]:
    out: List[List[int]] = [[] for _ in fd.rays]
    for k, c in enumerate(fd.cones):
        for r in c:
            out[r].append(k)
    return tuple(map(tuple, out))


def _random_neighbour(fd: FanData, i: int, rng: random.Random) -> int:
    r = rng.choice(fd.cones[i])
    return rng.choice(_cones_by_ray(fd)[r])


# ---------------------------------------------------------------- D_4 projections


F_DIRECTIONS = ((1, 0), (-1, 1), (0, -1))


@dataclass(frozen=True, eq=False)
class D4Projection:
    """N(Delta) -> N(D_4) ~ Z^2 given by n -> (<u(F1,F2), n>, <u(F2,F3), n>).

    In these coordinates psi(F_1), psi(F_2), psi(F_3) are 4*(1,0), 4*(-1,1), 4*(0,-1).
    """
    record: D4Record
    u12: Tuple[int, ...]
    u23: Tuple[int, ...]
    # unit (in M-coordinates) vanishing on the ray of F_k, for k = 1, 2, 3
    ann: Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]

    def image(self, n: Sequence[int]) -> Tuple[int, int]:
        return (sum(a * b for a, b in zip(self.u12, n)), sum(a * b for a, b in zip(self.u23, n)))


def classify_d4_image(v: Tuple[int, int]) -> int:
    """0 if v = 0, k if v is a positive multiple of the direction of F_k, -1 otherwise."""
    if v == (0, 0):
        return 0
    for k, d in enumerate(F_DIRECTIONS, start=1):
        # v = c d with c > 0
        if v[0] * d[1] - v[1] * d[0] == 0 and v[0] * d[0] + v[1] * d[1] > 0:
            return k
    return -1


@lru_cache(maxsize=None)
def d4_projections(sys: RootSystem) -> Tuple[D4Projection, ...]:
    N = build_N(sys)
    out = []
    for rec in d4_catalog(sys):
        u12 = N.m_coords(d4_unit(sys, rec, 1, 2))
        u23 = N.m_coords(d4_unit(sys, rec, 2, 3))
        u13 = N.m_coords(d4_unit(sys, rec, 1, 3))
        out.append(D4Projection(rec, tuple(u12), tuple(u23), (tuple(u23), tuple(u13), tuple(u12))))
    return tuple(out)


@lru_cache(maxsize=None)
def ray_class_table(fd: FanData, sys: RootSystem) -> Tuple[Tuple[int, ...], ...]:
    """table[r][i] = class of the image of ray r in N(D_4) number i."""
    projs = d4_projections(sys)
    return tuple(tuple(classify_d4_image(p.image(r)) for p in projs) for r in fd.rays)


@dataclass
class IntersectionFanReport:
    cones_checked: int
    faces_checked: int
    orbit_representatives: bool
    total_cones: int
    failures: List[Tuple[int, Tuple[int, ...], str]]

    @property
    def ok(self) -> bool:
        return not self.failures


def _face_annihilator_rows(projs, classes_by_d4) -> List[Tuple[int, ...]]:
    rows = set()
    for p, ks in zip(projs, classes_by_d4):
        if not ks:
            rows.add(p.u12)
            rows.add(p.u23)
        elif len(ks) == 1:
            rows.add(p.ann[next(iter(ks)) - 1])
    return sorted(rows)


def check_cone_in_intersection_fan(fd: FanData, sys: RootSystem, cone: Sequence[int]
                                   ) -> Tuple[int, Optional[Tuple[Tuple[int, ...], str]]]:
    """Face-projection and annihilator-surjectivity checks for one cone and all its faces."""
    projs = d4_projections(sys)
    table = ray_class_table(fd, sys)
    cone = tuple(cone)
    nd4 = len(projs)
    # images of sigma in each N(D_4)
    sigma_classes = []
    for i in range(nd4):
        ks = {table[r][i] for r in cone}
        if -1 in ks:
            return 0, (cone, f"a ray maps off the rays of F(D_4) #{i}")
        sigma_classes.append(ks - {0})
    faces = 0
    for k in range(1, len(cone) + 1):
        for face in itertools.combinations(cone, k):
            faces += 1
            classes = []
            for i in range(nd4):
                ks = {table[r][i] for r in face} - {0}
                full = sigma_classes[i]
                # faces of cone(full) in the plane: everything if |full| <= 2, itself if 3
                if len(full) == 3 and ks != full:
                    return faces, (face, f"image in D_4 #{i} is not a face")
                classes.append(ks)
            rows = _face_annihilator_rows(projs, classes)
            need = fd.rank - len(face)
            if need and (not rows or il.rank_mod_p(rows) < need):
                got = il.rank(rows) if rows else 0
                if got < need:
                    return faces, (face, f"annihilators span rank {got} < {need}")
    return faces, None


def intersection_fan_certificate(fd: FanData, sys: RootSystem, exhaustive: bool = False,
                                 cones: Optional[Sequence[int]] = None) -> IntersectionFanReport:
    """Certificate that every cone equals N_Q intersected with the product of its D_4 images.

    By default one cone per W-orbit of maximal cones is checked (the whole
    construction is W-equivariant, see :func:`equivariance_report`).
    """
    if cones is not None:
        todo = list(cones)
        reps = False
    elif exhaustive:
        todo = list(range(len(fd.cones)))
        reps = False
    else:
        cx = build_R(sys)
        index = {c: k for k, c in enumerate(fd.cones)}
        todo = [index[o[0]] for o in simplex_orbits(cx, fd.cones)]
        reps = True
    failures = []
    faces = 0
    for k in todo:
        nf, fail = check_cone_in_intersection_fan(fd, sys, fd.cones[k])
        faces += nf
        if fail:
            failures.append((k, fail[0], fail[1]))
    return IntersectionFanReport(len(todo), faces, reps, len(fd.cones), failures)


# ---------------------------------------------------------------- convex disjointness


@dataclass
class ConvexDisjointReport:
    premise_rays: List[Tuple[int, int]]
    premise_ok: bool
    certificate_ok: bool
    verdict: str
    computed: List[str]
    schema: List[str]


def rays_convexly_disjoint(rays: Sequence[Sequence[int]]) -> bool:
    """A finite union of distinct rays is convexly disjoint iff no two of them are opposite.

    A segment joining points of two non-opposite rays leaves their union
    except at finitely many points; two opposite rays form a line.
    """
    prim = [tuple(il.primitive(r)) for r in rays]
    s = set(prim)
    return len(s) == len(prim) and all(tuple(-x for x in r) not in s for r in prim)


def convex_disjoint_certificate(fd: FanData, sys: RootSystem,
                                cert: Optional[IntersectionFanReport] = None) -> ConvexDisjointReport:
    from .rootsys import build_root_system
    d4 = build_root_system("D", 4)
    fd4 = build_F(d4)
    proj = d4_projections(d4)[0]
    images = [proj.image(r) for r in fd4.rays]
    premise = rays_convexly_disjoint(images) and sorted(classify_d4_image(v) for v in images) == [1, 2, 3]
    if cert is None:
        cert = intersection_fan_certificate(fd, sys)
    ok = premise and cert.ok
    return ConvexDisjointReport(
        images, premise, cert.ok,
        "convexly disjoint (certified via intersection-fan embedding)" if ok else "not certified",
        ["F(D_4) is three pairwise non-opposite rays (direct check)",
         f"intersection-fan certificate on {cert.cones_checked} cones"],
        ["products of convexly disjoint collections are convexly disjoint",
         "intersections with a linear subspace preserve convex disjointness"])


# ---------------------------------------------------------------- diagrams


@dataclass(frozen=True)
class Diagram:
    """A set of A_1's with a prescribed non-orthogonality graph.

    ``roots[k]`` is the positive-root index placed on graph vertex k;
    ``edge_roots`` maps each graph edge to the third root of the A_2 it spans.
    """
    kind: str
    roots: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    edge_roots: Tuple[int, ...]
    extra: Optional[int] = None


def petersen_graph() -> Tuple[int, List[Tuple[int, int]]]:
    """Kneser graph K(5,2): 2-subsets of {0..4} adjacent iff disjoint."""
    pairs = list(itertools.combinations(range(5), 2))
    edges = [(a, b) for a, b in itertools.combinations(range(10), 2)
             if not set(pairs[a]) & set(pairs[b])]
    return 10, edges


def tetra_graph() -> Tuple[int, List[Tuple[int, int]], List[int], List[int]]:
    """Tetrahedron vertices 0..3 and edge midpoints 4..9, joined along half edges."""
    edges = []
    mids = []
    for k, (a, b) in enumerate(itertools.combinations(range(4), 2)):
        m = 4 + k
        mids.append(m)
        edges += [(a, m), (b, m)]
    return 10, edges, [0, 1, 2, 3], mids


def _search_embedding(sys: RootSystem, nverts: int, edges: Sequence[Tuple[int, int]],
                      fixed: Optional[Dict[int, int]] = None) -> Optional[Tuple[int, ...]]:
    P = sys.pairings
    adj = [set() for _ in range(nverts)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    fixed = dict(fixed or {})
    order = list(fixed)
    # breadth-first order keeps the constraint propagation tight
    start = order[0] if order else 0
    queue = [start] if start not in order else list(order)
    seen = set(order) | {start}
    if start not in order:
        order.append(start)
    while queue:
        x = queue.pop(0)
        for y in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    order += [v for v in range(nverts) if v not in seen]
    assign: Dict[int, int] = {}

    def ok(v, r):
        if r in assign.values():
            return False
        for w, s in assign.items():
            if (P[r][s] != 0) != (w in adj[v]):
                return False
        return True

    def rec(k):
        if k == len(order):
            return True
        v = order[k]
        cands = [fixed[v]] if v in fixed else (
            [0] if k == 0 else range(len(sys)))
        for r in cands:
            if ok(v, r):
                assign[v] = r
                if rec(k + 1):
                    return True
                del assign[v]
        return False

    if rec(0):
        return tuple(assign[v] for v in range(nverts))
    return None


def _third_root(sys: RootSystem, a: int, b: int) -> int:
    R = sys.positive_roots
    return sys.index([x + y for x, y in zip(R[a], R[b])]) if sys.is_root(
        [x + y for x, y in zip(R[a], R[b])]) else sys.index([x - y for x, y in zip(R[a], R[b])])


def make_diagram(sys: RootSystem, kind: str, roots: Sequence[int],
                 edges: Sequence[Tuple[int, int]]) -> Diagram:
    P = sys.pairings
    for a, b in itertools.combinations(range(len(roots)), 2):
        adjacent = (a, b) in edges or (b, a) in edges
        if (P[roots[a]][roots[b]] != 0) != adjacent:
            raise FanError("roots do not realize the diagram graph")
    edge_roots = tuple(_third_root(sys, roots[a], roots[b]) for a, b in edges)
    extra = None
    if kind == "tetradiagram":
        _, _, _, mids = tetra_graph()
        cands = [i for i in range(len(sys)) if all(P[i][roots[m]] == 0 for m in mids)]
        if len(cands) != 1:
            raise FanError(f"{len(cands)} roots are perpendicular to the six midpoints")
        extra = cands[0]
    return Diagram(kind, tuple(roots), tuple(edges), edge_roots, extra)


def ngon_diagram(sys: RootSystem) -> Diagram:
    """eps_1 - eps_2, ..., eps_{n-1} - eps_n, eps_n - eps_1 inside the standard A_{n-1}."""
    n = sys.rank
    roots = []
    for i in range(n):
        v = [0] * n
        v[i] += 1
        v[(i + 1) % n] -= 1
        roots.append(sys.index(v))
    edges = [(i, (i + 1) % n) for i in range(n)]
    return make_diagram(sys, "ngon", roots, edges)


def find_diagram(sys: RootSystem, fixed: Optional[Dict[int, int]] = None) -> Diagram:
    """Search for an n-gon (D_n), pentadiagram (E_6) or tetradiagram (E_7)."""
    if sys.kind == "D":
        return ngon_diagram(sys)
    if sys.name == "E6":
        n, edges = petersen_graph()
        kind = "pentadiagram"
    elif sys.name == "E7":
        n, edges, _, _ = tetra_graph()
        kind = "tetradiagram"
    else:
        raise FanError(f"no diagram for {sys.name}")
    emb = _search_embedding(sys, n, edges, fixed)
    if emb is None:
        raise FanError(f"no {kind} found in {sys.name}")
    return make_diagram(sys, kind, emb, edges)


def _induced_paths(nverts, adj, length):
    """Vertex sequences of induced paths with ``length`` vertices (each path once)."""
    out = set()

    def grow(path):
        if len(path) == length:
            key = tuple(path) if path[0] < path[-1] else tuple(reversed(path))
            out.add(key)
            return
        for y in adj[path[-1]]:
            if y in path:
                continue
            if any(y in adj[z] for z in path[:-1]):
                continue
            grow(path + [y])

    for v in range(nverts):
        grow([v])
    return sorted(out)


def diagram_ray_vertices(sys: RootSystem, cx: Complex, dg: Diagram, extra: bool = True) -> List[int]:
    """R-vertices whose Dynkin diagram is a subdiagram of the given diagram."""
    look = {s: i for i, s in enumerate(cx.vertices)}
    n = len(dg.roots)
    adj = [set() for _ in range(n)]
    for a, b in dg.edges:
        adj[a].add(b)
        adj[b].add(a)
    out = []
    if dg.kind == "ngon":
        from .complexes import dn_vertex
        # chord between vertices a and b splits the edge labels into two arcs
        for a, b in itertools.combinations(range(n), 2):
            if b - a in (1, n - 1):
                continue
            arc = [(j % n) for j in range(a + 1, b + 1)]
            small = arc if 2 * len(arc) <= n else [j for j in range(n) if j not in arc]
            if 2 * len(small) == n and 0 not in small:
                small = [j for j in range(n) if j not in small]
            out.append(look[dn_vertex(sys, small)])
        return sorted(set(out))

    def add(seq_roots, typ):
        s = reflection_closure(sys, seq_roots)
        if recognize_type(sys, s) == typ and s in look:
            out.append(look[s])

    types = {cx.labels[i] for i in range(len(cx))}
    for v in range(n):
        add([dg.roots[v]], "A1")
    paths = {k: _induced_paths(n, adj, k) for k in (2, 3, 7)}
    if "A2" in types:
        for p in paths[2]:
            add([dg.roots[x] for x in p], "A2")
    if "A2^3" in types:
        for trip in itertools.combinations(paths[2], 3):
            vs = [x for p in trip for x in p]
            if len(set(vs)) == 6 and _no_cross_edges(adj, trip):
                add([dg.roots[x] for x in vs], "A2^3")
    if "A3^2" in types:
        for pair in itertools.combinations(paths[3], 2):
            vs = [x for p in pair for x in p]
            if len(set(vs)) == 6 and _no_cross_edges(adj, pair):
                add([dg.roots[x] for x in vs], "A3^2")
    if "A7" in types:
        for p in paths[7]:
            add([dg.roots[x] for x in p], "A7")
    if extra and dg.extra is not None:
        out.append(look[frozenset([dg.extra])])
    return sorted(set(out))


def _no_cross_edges(adj, parts) -> bool:
    for p, q in itertools.combinations(parts, 2):
        if any(y in adj[x] for x in p for y in q):
            return False
    return True


@lru_cache(maxsize=None)
def build_G(sys: RootSystem, extra: bool = True) -> FanData:
    """One maximal cone per diagram in the W-orbit of a found diagram (G' for E_7 if ``extra``)."""
    F = build_F(sys)
    cx = build_R(sys)
    dg = find_diagram(sys)
    rep = tuple(diagram_ray_vertices(sys, cx, dg, extra))
    expected = F.rank - (1 if sys.name == "E7" and not extra else 0)
    if len(rep) != expected:
        raise FanError(f"diagram gives {len(rep)} rays, expected {expected}")
    perms = cx.vertex_actions()
    acts = index_set_actions(sys)
    seed = frozenset(dg.roots)
    cones = {seed: rep}
    frontier = [seed]
    while frontier:
        new = []
        for d in frontier:
            for act, p in zip(acts, perms):
                e = act(d)
                if e not in cones:
                    cones[e] = tuple(sorted(p[x] for x in cones[d]))
                    new.append(e)
        frontier = new
    name = "G'" if sys.name == "E7" and extra else "G"
    cone_list = sorted(set(cones.values()))
    return FanData(sys.name, name, F.rays, F.labels, F.subsystems, tuple(cone_list), F.rank,
                   {"construction": dg.kind, "diagrams": len(cones), "representative": dg})


# ---------------------------------------------------------------- dual basis


@dataclass
class DualBasisWitness:
    ray: int
    record: D4Record
    i: int
    j: int


@dataclass
class DualBasisReport:
    cone: Tuple[int, ...]
    witnesses: List[DualBasisWitness]
    failures: List[Tuple[int, int]]  # (ray, number of units found)

    @property
    def ok(self) -> bool:
        return not self.failures


def dual_basis_certificate(fd: FanData, sys: RootSystem, cone: Sequence[int]) -> DualBasisReport:
    """For every ray R of the cone find the unique D_4 unit that is 1 on zeta(R), 0 on the others."""
    N = build_N(sys)
    cone = tuple(cone)
    Z = np.array([fd.rays[r] for r in cone], dtype=np.int64)
    cat = d4_catalog(sys)
    units = []
    for rec in cat:
        for i, j in itertools.permutations((1, 2, 3), 2):
            units.append((rec, i, j, N.m_coords(d4_unit(sys, rec, i, j))))
    U = np.array([u[3] for u in units], dtype=np.int64)
    V = U @ Z.T  # pairings
    found: Dict[int, List[int]] = {k: [] for k in range(len(cone))}
    nonzero = (V != 0).sum(axis=1)
    for row in np.nonzero(nonzero == 1)[0]:
        k = int(np.nonzero(V[row])[0][0])
        if V[row, k] == 1:
            found[k].append(int(row))
    witnesses, failures = [], []
    for k in range(len(cone)):
        if len(found[k]) != 1:
            failures.append((cone[k], len(found[k])))
        else:
            rec, i, j, _ = units[found[k][0]]
            witnesses.append(DualBasisWitness(cone[k], rec, i, j))
    return DualBasisReport(cone, witnesses, failures)


# ---------------------------------------------------------------- subfan


def subfan_report(F: FanData, G: FanData, sys: RootSystem) -> Tuple[int, List[int]]:
    """Each maximal cone of F (one per W-orbit) lies in some maximal cone of G."""
    cx = build_R(sys)
    gsets = [frozenset(c) for c in G.cones]
    by_ray: Dict[int, List[int]] = {}
    for k, c in enumerate(gsets):
        for r in c:
            by_ray.setdefault(r, []).append(k)
    missing = []
    orbits = simplex_orbits(cx, F.cones)
    for o in orbits:
        c = o[0]
        r0 = min(c, key=lambda r: len(by_ray.get(r, [])))
        if not any(set(c) <= gsets[k] for k in by_ray.get(r0, [])):
            missing.append(F.cones.index(c))
    return len(orbits), missing
