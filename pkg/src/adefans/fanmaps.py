"""Projections N(Delta) -> N(Delta') and what they do to the fans.

Covers the standard inclusions D_n in D_{n+1}, E_5 = D_5 in E_6 and E_6 in
E_7: ray-image tables checked against closed-form case lists, the toric
flatness criterion, the refinement Ftilde(E_6) with a minimality
certificate, and the fibre fan Ftilde(E_7) built with a small exact
double-description engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import intlinalg as il
from .charlat import build_N, lift_matrix
from .complexes import Complex, bipartition_of, build_R, dn_vertex
from .fancore import FanData, FanError, build_F, reflection_n_matrix, weyl_n_matrices
from .rootsys import RootSystem, parse_system
from .subsys import (RootSet, _components, perp, recognize_type, reflection_closure,
                     simple_system)


class UnsupportedMap(ValueError):
    pass


# ---------------------------------------------------------------- exact cones


class NotPointed(ValueError):
    pass


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _integral_rows(rows: Iterable[Sequence[Fraction]]) -> List[List[int]]:
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = den * Fraction(x).denominator // _gcd(den, Fraction(x).denominator)
        v = [int(Fraction(x) * den) for x in r]
        if any(v):
            out.append(il.primitive(v))
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _double_description(A: Sequence[Sequence[int]], d: int) -> List[List[int]]:
    """Extreme rays of the pointed cone {y in R^d : A y >= 0}."""
    if d == 0:
        return []
    A = [list(r) for r in A]
    if not A or il.rank(A) < d:
        raise NotPointed("inequalities do not cut out a pointed cone")
    basis: List[int] = []
    for i in range(len(A)):
        if il.rank([A[j] for j in basis + [i]]) > len(basis):
            basis.append(i)
            if len(basis) == d:
                break
    B = [A[i] for i in basis]
    rays = []
    for j in range(d):
        x = il.solve_rational(B, [int(k == j) for k in range(d)])
        r = _integral_rows([x])[0]
        rays.append((r, frozenset(basis[k] for k in range(d) if k != j)))
    for i in range(len(A)):
        if i in basis:
            continue
        vals = [_dot(A[i], r) for r, _ in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new = [rays[k] for k in pos]
        new += [(rays[k][0], rays[k][1] | {i}) for k, v in enumerate(vals) if v == 0]
        for p in pos:
            for n in neg:
                Z = rays[p][1] & rays[n][1]
                if len(Z) < d - 2:
                    continue
                if any(k not in (p, n) and Z <= rays[k][1] for k in range(len(rays))):
                    continue
                v = [vals[p] * a - vals[n] * b for a, b in zip(rays[n][0], rays[p][0])]
                new.append((il.primitive(v), Z | {i}))
        rays = new
    return [r for r, _ in rays]


@dataclass(frozen=True)
class PolyCone:
    """A pointed rational polyhedral cone in R^d with both descriptions.

    ``rays`` are primitive integer extreme rays; the cone is
    {x : e.x = 0 for e in eqs, h.x >= 0 for h in ineqs}.
    """
    d: int
    rays: Tuple[Tuple[int, ...], ...]
    eqs: Tuple[Tuple[int, ...], ...]
    ineqs: Tuple[Tuple[int, ...], ...]

    @staticmethod
    def from_inequalities(ineqs: Sequence[Sequence[int]], eqs: Sequence[Sequence[int]], d: int) -> "PolyCone":
        eqs = [list(e) for e in eqs if any(e)]
        K = il.integer_kernel(eqs, d) if eqs else il.identity(d)
        k = len(K)
        if k == 0:
            rays = []
        else:
            A = [[_dot(h, kv) for kv in K] for h in ineqs]
            ys = _double_description(A, k)
            rays = [il.primitive([sum(y[j] * K[j][c] for j in range(k)) for c in range(d)]) for y in ys]
        return PolyCone(d, tuple(sorted(set(map(tuple, rays)))), tuple(map(tuple, eqs)),
                        tuple(tuple(h) for h in ineqs))

    @staticmethod
    def from_generators(gens: Sequence[Sequence[int]], d: int) -> "PolyCone":
        G = [list(g) for g in gens if any(g)]
        if not G:
            return PolyCone(d, (), tuple(map(tuple, il.identity(d))), ())
        R, piv = il.rref_rational(G)
        Bs = _integral_rows(R[:len(piv)])
        eqs = il.integer_kernel(G, d)
        M = [[_dot(g, b) for b in Bs] for g in G]
        zs = _double_description(M, len(Bs))
        facets = [il.primitive([sum(z[j] * Bs[j][c] for j in range(len(Bs))) for c in range(d)]) for z in zs]
        ext = sorted({tuple(il.primitive(g)) for g in G
                      if il.rank([f for f in facets if _dot(f, g) == 0] + eqs) >= d - 1})
        return PolyCone(d, tuple(ext), tuple(map(tuple, eqs)), tuple(map(tuple, facets)))

    @property
    def dim(self) -> int:
        return il.rank(self.rays) if self.rays else 0

    def contains(self, v: Sequence[int]) -> bool:
        return all(_dot(e, v) == 0 for e in self.eqs) and all(_dot(h, v) >= 0 for h in self.ineqs)

    def intersect(self, other: "PolyCone") -> "PolyCone":
        return PolyCone.from_inequalities(list(self.ineqs) + list(other.ineqs),
                                          list(self.eqs) + list(other.eqs), self.d)

    def facets(self) -> "PolyCone":
        """The same cone with an irredundant inequality description."""
        return PolyCone.from_generators(self.rays, self.d)


def simplicial_volume(gens: Sequence[Sequence[int]]) -> Fraction:
    """Share of the positive orthant taken by a full-dimensional simplicial cone.

    cone(r_1..r_k) meets {x >= 0, sum x <= 1} in a simplex of volume
    |det R| / (k! prod |r_i|_1), and the whole orthant piece has volume 1/k!.
    """
    den = 1
    for g in gens:
        den *= sum(g)
    return Fraction(abs(il.det(gens)), den)


def triangulate(cone: PolyCone) -> List[List[Tuple[int, ...]]]:
    """Pulling triangulation of a full-dimensional pointed cone into simplicial cones."""
    rays = list(cone.rays)
    k = il.rank(rays) if rays else 0
    if len(rays) <= k:
        return [rays]
    f = cone.facets()
    v = rays[0]
    out = []
    for h in f.ineqs:
        if _dot(h, v) == 0:
            continue
        face = [r for r in rays if _dot(h, r) == 0]
        sub = PolyCone.from_generators(face, cone.d)
        for simplex in triangulate(sub):
            out.append([v] + list(simplex))
    return out


def cone_volume(cone: PolyCone) -> Fraction:
    return sum((simplicial_volume(s) for s in triangulate(cone)), Fraction(0))


# ---------------------------------------------------------------- root identifications


def components(sys: RootSystem, s: RootSet) -> List[RootSet]:
    """Irreducible components of a closed root set."""
    return [reflection_closure(sys, c) for c in _components(sys, simple_system(sys, s))]


def standard_subsystem(sys: RootSystem, target: RootSystem) -> RootSet:
    """The standard copy of ``target`` in ``sys``: roots with vanishing last coordinate."""
    if target.name == sys.name:
        return frozenset(range(len(sys)))
    ok = ((sys.kind == "D" and target.kind == "D" and target.rank == sys.rank - 1)
          or (sys.name == "E7" and target.name == "E6")
          or (sys.name == "E6" and target.name == "D5"))
    if not ok or target.rank < 4:
        raise UnsupportedMap(f"no standard inclusion {target.name} in {sys.name}")
    return frozenset(i for i, v in enumerate(sys.positive_roots) if v[-1] == 0)


def _truncation_map(sys: RootSystem, s: RootSet, target: RootSystem) -> Optional[Dict[int, int]]:
    out = {}
    for a in s:
        v = sys.positive_roots[a][:target.dim]
        if len(v) != target.dim or not target.is_root(v):
            return None
        b = target.index(v)
        if tuple(target.positive_roots[b]) != tuple(v):
            return None
        out[a] = b
    return out


def _dynkin_map(sys: RootSystem, s: RootSet, target: RootSystem) -> Dict[int, int]:
    S = simple_system(sys, s)
    T = list(target.simple_index)
    if len(S) != len(T):
        raise UnsupportedMap("ranks differ")
    P, Q = sys.pairings, target.pairings
    f: Dict[int, int] = {}

    def rec(k):
        if k == len(S):
            return True
        for t in T:
            if t in f.values():
                continue
            if all(P[S[k]][S[j]] == Q[t][f[S[j]]] for j in range(k)):
                f[S[k]] = t
                if rec(k + 1):
                    return True
                del f[S[k]]
        return False

    if not rec(0):
        raise UnsupportedMap("Dynkin diagrams differ")
    basis = [list(sys.positive_roots[a]) for a in S]
    out = {}
    for a in s:
        c = il.solve_rational(il.transpose(basis), list(sys.positive_roots[a]))
        v = [sum(int(c[j]) * target.positive_roots[f[S[j]]][x] for j in range(len(S)))
             for x in range(target.dim)]
        out[a] = target.index(v)
    return out


def root_isomorphism(sys: RootSystem, s: RootSet, target: RootSystem) -> Dict[int, int]:
    """Positive roots of the subsystem s onto those of ``target``, preserving pairings.

    Coordinate truncation is used when it works (D_n in D_{n+1}, E_6 in E_7);
    otherwise simple roots are matched along the Dynkin diagram.
    """
    m = _truncation_map(sys, s, target)
    if m is None or len(set(m.values())) != len(target):
        m = _dynkin_map(sys, s, target)
    P, Q = sys.pairings, target.pairings
    if len(set(m.values())) != len(target) or any(
            P[a][b] != Q[m[a]][m[b]] for a in s for b in s):
        raise FanError("root identification does not preserve pairings")
    return m


# ---------------------------------------------------------------- lattice map


@dataclass(frozen=True, eq=False)
class LatticeMap:
    """pi: N(source) -> N(target) induced by target = sub in source."""
    source: RootSystem
    target: RootSystem
    sub: RootSet
    root_map: Tuple[Tuple[int, int], ...]
    matrix: Tuple[Tuple[int, ...], ...]

    def __call__(self, v: Sequence[int]) -> List[int]:
        return il.matvec(self.matrix, v)

    @property
    def rmap(self) -> Dict[int, int]:
        return dict(self.root_map)

    def map_roots(self, s: Iterable[int]) -> RootSet:
        m = self.rmap
        return frozenset(m[a] for a in s)


@lru_cache(maxsize=None)
def projection_map(sys: RootSystem, target: RootSystem) -> LatticeMap:
    """pi = psi' o restriction o lift; checks pi psi = psi' restriction and surjectivity."""
    sub = standard_subsystem(sys, target)
    rmap = root_isomorphism(sys, sub, target)
    N, Nt = build_N(sys), build_N(target)
    rows = []
    for k in range(Nt.rank):
        rows.append([Nt.psi[k][rmap[a]] if a in rmap else 0 for a in range(len(sys))])
    pi = il.matmul(rows, lift_matrix(N))
    if il.matmul(pi, N.psi) != rows:
        raise FanError("projection does not commute with psi")
    if Nt.rank and not il.lattice_equal_full(il.transpose(pi), Nt.rank):
        raise FanError("projection is not surjective")
    return LatticeMap(sys, target, sub, tuple(sorted(rmap.items())), tuple(map(tuple, pi)))


def weyl_subgroup_generators(pi: LatticeMap) -> List[Tuple[int, int]]:
    """Pairs (source generator, target generator) for simple reflections of the source lying in the sub system."""
    m = pi.rmap
    tgt = {r: k for k, r in enumerate(pi.target.simple_index)}
    out = []
    for g, r in enumerate(pi.source.simple_index):
        if r in m and m[r] in tgt:
            out.append((g, tgt[m[r]]))
    return out


def equivariance_of_projection(pi: LatticeMap) -> bool:
    """pi A_a = B_t pi for each simple root t of the target and its preimage a in the sub system.

    These reflections generate the Weyl group of the sub system.
    """
    inv = {t: a for a, t in pi.root_map}
    B = weyl_n_matrices(pi.target)
    for k, t in enumerate(pi.target.simple_index):
        A = reflection_n_matrix(pi.source, inv[t])
        if il.matmul(pi.matrix, A) != il.matmul(B[k], pi.matrix):
            return False
    return True


# ---------------------------------------------------------------- locating vectors in a simplicial fan


@lru_cache(maxsize=None)
def _ray_lookup(fd: FanData) -> Dict[Tuple[int, ...], int]:
    return {r: i for i, r in enumerate(fd.rays)}


@lru_cache(maxsize=None)
def _cones_by_ray(fd: FanData) -> Tuple[Tuple[int, ...], ...]:
    out: List[List[int]] = [[] for _ in fd.rays]
    for k, c in enumerate(fd.cones):
        for r in c:
            out[r].append(k)
    return tuple(map(tuple, out))


def spans_cone(fd: FanData, rays: Iterable[int]) -> bool:
    """Is the ray set contained in one maximal cone (i.e. a cone of the simplicial fan)?"""
    rays = set(rays)
    if not rays:
        return True
    r0 = min(rays, key=lambda r: len(_cones_by_ray(fd)[r]))
    return any(rays <= set(fd.cones[k]) for k in _cones_by_ray(fd)[r0])


@lru_cache(maxsize=None)
def _cone_inverses(fd: FanData):
    Zs, Rs = [], []
    for c in fd.cones:
        Z = fd.cone_matrix(c)
        U, D, V = il.smith_normal_form(Z)
        k, r = len(Z), len(Z[0])
        Dt = [[int(i == j) for j in range(k)] for i in range(r)]
        Rinv = il.matmul(il.matmul(V, Dt), U)
        if il.matmul(Z, Rinv) != il.identity(k):
            raise FanError("cone is not strictly simplicial")
        Zs.append(Z)
        Rs.append(Rinv)
    return np.array(Zs, dtype=np.int64), np.array(Rs, dtype=np.int64)


def locate(fd: FanData, v: Sequence[int]) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Minimal cone of a strictly simplicial fan containing v: (ray indices, integer coefficients)."""
    if not any(v):
        return (), ()
    Zs, Rs = _cone_inverses(fd)
    vec = np.array(v, dtype=np.int64)
    mu = np.einsum("r,crk->ck", vec, Rs)
    back = np.einsum("ck,ckr->cr", mu, Zs)
    good = np.all(back == vec, axis=1) & np.all(mu >= 0, axis=1)
    hits = np.nonzero(good)[0]
    if not len(hits):
        return None
    c = int(hits[0])
    pairs = sorted((fd.cones[c][k], int(mu[c, k])) for k in range(len(fd.cones[c])) if mu[c, k] > 0)
    # exact confirmation
    total = [0] * len(v)
    for j, m in pairs:
        total = [t + m * x for t, x in zip(total, fd.rays[j])]
    if total != list(v):
        raise FanError("cone location failed exact confirmation")
    return tuple(j for j, _ in pairs), tuple(m for _, m in pairs)


# ---------------------------------------------------------------- ray images


@dataclass(frozen=True)
class RayImage:
    ray: int
    label: str
    kind: str                      # "zero", "ray" or "interior"
    targets: Tuple[int, ...]
    coeffs: Tuple[int, ...]
    case: str
    expected: Tuple[Tuple[int, int], ...]

    @property
    def agrees(self) -> bool:
        return tuple(zip(self.targets, self.coeffs)) == self.expected


def _factor_sets(sys: RootSystem, s: RootSet) -> Dict[str, List[RootSet]]:
    out: Dict[str, List[RootSet]] = {}
    for c in components(sys, s):
        out.setdefault(recognize_type(sys, c), []).append(c)
    return out


def expected_image(pi: LatticeMap, theta: RootSet, label: str) -> Tuple[str, List[Tuple[RootSet, int]]]:
    """The case list for pi(zeta(Theta)), in terms of subsystems of the target."""
    sys, tgt = pi.source, pi.target
    sub = pi.sub
    X = theta & sub
    if tgt.name == sys.name:
        return "identity", [(theta, 1)]
    if sys.kind == "D":
        n = tgt.rank
        I, J = bipartition_of(sys, theta)
        P, Q = sorted(x for x in I if x < n), sorted(x for x in J if x < n)
        if len(P) > 1 and len(Q) > 1:
            small = P if (len(P), P) <= (len(Q), Q) else Q
            return "both parts keep >= 2 points", [(dn_vertex(tgt, small), 1)]
        return "a part keeps <= 1 point", []
    if sys.name == "E6":
        if label == "A1":
            if X:
                a1s = [c for c in components(sys, perp(sys, X) & sub) if len(c) == 1]
                return "A1 in E5", [(pi.map_roots(X | a1s[0]), 1)]
            return "A1 not in E5", []
        if label == "A2^3":
            f = _factor_sets(sys, X)
            if sorted(f) == ["A1", "A2"] and len(f["A1"]) == 2:
                return "A2^3 meets E5 in A2xD2", [(pi.map_roots(f["A1"][0] | f["A1"][1]), 1)]
    if sys.name == "E7":
        f = _factor_sets(sys, X)
        if label == "A1":
            return ("A1 in E6", [(pi.map_roots(X), 1)]) if X else ("A1 not in E6", [])
        if label == "A2":
            if X == theta:
                return "A2 in E6", [(pi.map_roots(reflection_closure(sys, X | (perp(sys, X) & sub))), 1)]
            if list(f) == ["A1"] and len(f["A1"]) == 1:
                return "A2 meets E6 in A1", [(pi.map_roots(X), 1)]
        if label == "A3^2":
            if list(f) == ["A2"] and len(f["A2"]) == 2:
                return "A3^2 meets E6 in A2^2", [(pi.map_roots(reflection_closure(sys, X | (perp(sys, X) & sub))), 1)]
            if sorted(f) == ["A1", "A3"] and len(f["A1"]) == 2 and len(f["A3"]) == 1:
                return "A3^2 meets E6 in A3xA1^2", [(pi.map_roots(a), 1) for a in f["A1"]]
        if label == "A7":
            if sorted(f) == ["A1", "A5"]:
                return "A7 meets E6 in A1xA5", [(pi.map_roots(f["A1"][0]), 1)]
    raise FanError(f"ray {label} {sorted(theta)} matches no case")


def ray_image_table(pi: LatticeMap) -> List[RayImage]:
    F, Ft = build_F(pi.source), build_F(pi.target)
    look = _ray_lookup(Ft)
    vidx = {s: i for i, s in enumerate(Ft.subsystems)}
    out = []
    for i, r in enumerate(F.rays):
        v = pi(r)
        case, exp = expected_image(pi, F.subsystems[i], F.labels[i])
        expected = tuple(sorted((vidx[s], c) for s, c in exp))
        if not any(v):
            kind, targets, coeffs = "zero", (), ()
        else:
            p = tuple(il.primitive(v))
            if p in look:
                kind, targets, coeffs = "ray", (look[p],), (il.content(v),)
            else:
                loc = locate(Ft, v)
                if loc is None:
                    raise FanError(f"image of ray {i} lies outside the support of F({pi.target.name})")
                kind, (targets, coeffs) = "interior", loc
        out.append(RayImage(i, F.labels[i], kind, targets, coeffs, case, expected))
    return out


def case_counts(table: Sequence[RayImage]) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for rec in table:
        out[rec.case] = out.get(rec.case, 0) + 1
    return dict(sorted(out.items()))


# ---------------------------------------------------------------- flatness


@dataclass
class FlatnessReport:
    source: str
    target: str
    flat: bool
    reduced: bool
    off_rays: List[int]
    nonreduced_rays: List[int]
    bad_cones: List[int]
    cones_checked: int

    @property
    def verdict(self) -> str:
        if not self.flat:
            return "NOT FLAT"
        return "FLAT+REDUCED" if self.reduced else "FLAT"


def flatness_check(pi: LatticeMap, src: FanData, tgt: FanData,
                   cones: Optional[Iterable[int]] = None) -> FlatnessReport:
    """Toric flatness criterion for a map of fans into a strictly simplicial fan.

    FLAT: every ray goes to 0 or into a ray, and every cone onto a cone.
    REDUCED: moreover first lattice points go to first lattice points or 0.
    """
    look = _ray_lookup(tgt)
    image: List[Optional[int]] = []
    off, nonred = [], []
    for i, r in enumerate(src.rays):
        v = pi(r)
        if not any(v):
            image.append(None)
            continue
        p = tuple(il.primitive(v))
        if p not in look:
            image.append(-1)
            off.append(i)
            continue
        image.append(look[p])
        if il.content(v) != 1:
            nonred.append(i)
    bad = []
    todo = range(len(src.cones)) if cones is None else list(cones)
    count = 0
    for k in todo:
        count += 1
        ims = [image[r] for r in src.cones[k]]
        if -1 in ims or not spans_cone(tgt, {x for x in ims if x is not None}):
            bad.append(k)
    flat = not off and not bad
    return FlatnessReport(pi.source.name, tgt.name, flat, flat and not nonred, off, nonred, bad, count)


# ---------------------------------------------------------------- Ftilde(E_6)


@dataclass(frozen=True, eq=False)
class Subdivision:
    parent: FanData
    fan: FanData
    parent_of: Tuple[int, ...]       # maximal cone of fan -> maximal cone of parent
    added: Tuple[int, ...]           # ray indices not among the parent's rays


@lru_cache(maxsize=None)
def refine_E6(sys: Optional[RootSystem] = None) -> Subdivision:
    """Barycentric subdivision of the A_1-faces of F(E_6), coned with the A_2^3 ray where present."""
    sys = sys or parse_system("E6")
    F = build_F(sys)
    rays = list(F.rays)
    labels = list(F.labels)
    subs = list(F.subsystems)
    bary: Dict[FrozenSet[int], int] = {frozenset([i]): i for i in range(len(F.rays))}

    def centre(face: FrozenSet[int]) -> int:
        if face not in bary:
            v = [sum(F.rays[i][c] for i in face) for c in range(F.rank)]
            bary[face] = len(rays)
            rays.append(tuple(il.primitive(v)))
            labels.append(f"A1^{len(face)}")
            subs.append(frozenset().union(*(F.subsystems[i] for i in face)))
        return bary[face]

    cones = {}
    for k, c in enumerate(F.cones):
        A = [r for r in c if F.labels[r] == "A1"]
        B = [r for r in c if F.labels[r] != "A1"]
        for perm in itertools.permutations(A):
            chamber = tuple(sorted([centre(frozenset(perm[:j])) for j in range(1, len(A) + 1)] + B))
            if chamber not in cones:
                cones[chamber] = k
    order = sorted(cones)
    fan = FanData(sys.name, "Ftilde", tuple(rays), tuple(labels), tuple(subs), tuple(order), F.rank,
                  {"construction": "barycentric subdivision of A1 faces"})
    added = tuple(range(len(F.rays), len(rays)))
    return Subdivision(F, fan, tuple(cones[c] for c in order), added)


def coordinates_in_cone(gens: Sequence[Sequence[int]], v: Sequence[int]) -> List[Fraction]:
    x = il.solve_rational(il.transpose(gens), list(v))
    if x is None:
        raise FanError("vector not in the span of the cone")
    return x


def refinement_volumes(sd: Subdivision) -> Dict[int, Fraction]:
    """For each parent maximal cone, the summed orthant shares of its children (exactly 1 when covered)."""
    P, T = sd.parent, sd.fan
    out: Dict[int, Fraction] = {}
    for child, k in zip(T.cones, sd.parent_of):
        gens = P.cone_matrix(P.cones[k])
        w = [coordinates_in_cone(gens, T.rays[r]) for r in child]
        if any(x.denominator != 1 or x < 0 for row in w for x in row):
            raise FanError("child ray outside its parent cone")
        out[k] = out.get(k, Fraction(0)) + simplicial_volume([[int(x) for x in row] for row in w])
    return out


# ---------------------------------------------------------------- E_7 over E_6


@dataclass
class ImageData:
    """Per source ray: its image as {target ray: coefficient} (empty for 0)."""
    pi: LatticeMap
    table: List[RayImage]

    def image(self, r: int) -> Dict[int, int]:
        rec = self.table[r]
        return dict(zip(rec.targets, rec.coeffs))


@lru_cache(maxsize=None)
def e7_image_data() -> ImageData:
    e7, e6 = parse_system("E7"), parse_system("E6")
    pi = projection_map(e7, e6)
    return ImageData(pi, ray_image_table(pi))


def subgroup_orbits(cx: Complex, simplices: Sequence[Tuple[int, ...]], generators: Sequence[int]
                    ) -> List[Tuple[Tuple[int, ...], int]]:
    """Orbit representatives (first in sorted order) and orbit sizes under a subgroup of W."""
    perms = [cx.vertex_actions()[g] for g in generators]
    index = {frozenset(s): k for k, s in enumerate(simplices)}
    seen = bytearray(len(simplices))
    out = []
    for k, s in enumerate(simplices):
        if seen[k]:
            continue
        orbit = [k]
        seen[k] = 1
        frontier = [frozenset(s)]
        while frontier:
            new = []
            for t in frontier:
                for p in perms:
                    u = frozenset(p[x] for x in t)
                    j = index[u]
                    if not seen[j]:
                        seen[j] = 1
                        orbit.append(j)
                        new.append(u)
            frontier = new
        out.append((tuple(s), len(orbit)))
    return out


@lru_cache(maxsize=None)
def e7_cone_orbits() -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    """W(E_6)-orbits of maximal cones of F(E_7); pi is W(E_6)-equivariant."""
    data = e7_image_data()
    if not equivariance_of_projection(data.pi):
        raise FanError("projection is not W(E6)-equivariant")
    e7 = data.pi.source
    cx = build_R(e7)
    gens = [g for g, _ in weyl_subgroup_generators(data.pi)]
    return tuple(subgroup_orbits(cx, cx.maximal, gens))


def image_support(data: ImageData, cone: Sequence[int]) -> Tuple[int, ...]:
    s = set()
    for r in cone:
        s |= set(data.image(r))
    return tuple(sorted(s))


@dataclass
class UnionCheck:
    patterns: int
    failures: List[Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], ...]]]

    @property
    def ok(self) -> bool:
        return not self.failures


def _chambers_in(target: Sequence[int], tF: FanData) -> List[List[Tuple[int, ...]]]:
    """Chambers of the barycentric refinement of cone(target), in target coordinates."""
    A = [j for j, t in enumerate(target) if tF.labels[t] == "A1"]
    B = [j for j, t in enumerate(target) if tF.labels[t] != "A1"]
    d = len(target)
    out = []
    for perm in itertools.permutations(A):
        gens = []
        for j in range(1, len(A) + 1):
            gens.append(tuple(int(x in perm[:j]) for x in range(d)))
        gens += [tuple(int(x == b) for x in range(d)) for b in B]
        out.append(gens)
    return out


def _w_coords(data: ImageData, r: int, target: Sequence[int]) -> Tuple[int, ...]:
    im = data.image(r)
    return tuple(im.get(t, 0) for t in target)


def is_union_of_chambers(cone: PolyCone, chambers: Sequence[Sequence[Tuple[int, ...]]]) -> bool:
    """cone meets every chamber in a face of that chamber."""
    for ch in chambers:
        inter = cone.intersect(PolyCone.from_generators(ch, cone.d))
        gens = {tuple(il.primitive(g)) for g in ch}
        if not set(inter.rays) <= gens:
            return False
    return True


def union_of_cones_check(cones: Optional[Sequence[Tuple[int, ...]]] = None) -> UnionCheck:
    """pi(sigma), and pi of every face of sigma, is a union of cones of Ftilde(E_6)."""
    data = e7_image_data()
    tF = build_F(data.pi.target)
    if cones is None:
        cones = [c for c, _ in e7_cone_orbits()]
    seen = set()
    failures = []
    for c in cones:
        target = image_support(data, c)
        if not spans_cone(tF, target):
            failures.append((c, ()))
            continue
        vecs = sorted({_w_coords(data, r, target) for r in c} - {tuple([0] * len(target))})
        chambers = _chambers_in(target, tF)
        key_labels = tuple(tF.labels[t] for t in target)
        for k in range(1, len(vecs) + 1):
            for sub in itertools.combinations(vecs, k):
                key = (key_labels, sub)
                if key in seen:
                    continue
                seen.add(key)
                if not is_union_of_chambers(PolyCone.from_generators(sub, len(target)), chambers):
                    failures.append((c, sub))
    return UnionCheck(len(seen), failures)


@dataclass
class MinimalityReport:
    cone: Tuple[int, ...]                 # a maximal cone of F(E_6)
    family: int                           # cones pi(tau) & cone, tau in F(E_7)
    closure: int                          # after closing under intersection
    forced: List[Tuple[int, ...]]         # extreme rays forced on any refinement, in cone coordinates
    refinement_rays: List[Tuple[int, ...]]

    @property
    def minimal(self) -> bool:
        return set(self.refinement_rays) <= set(self.forced)

    @property
    def consistent(self) -> bool:
        return set(self.forced) <= set(self.refinement_rays)


def minimality_report(gamma: Tuple[int, ...]) -> MinimalityReport:
    """Rays any refinement must have so that every pi(tau) meets cone(gamma) in a union of cones.

    If C_1, C_2 are unions of cones of a fan then so is C_1 & C_2, and the
    extreme rays of such a union are rays of the fan.  So every extreme ray of
    every intersection of sets pi(tau) & cone(gamma) is forced.
    """
    data = e7_image_data()
    tF = build_F(data.pi.target)
    d = len(gamma)
    gset = set(gamma)
    family = set()
    for c in build_R(data.pi.source).maximal:
        vecs = set()
        for r in c:
            im = data.image(r)
            if im and set(im) <= gset:
                vecs.add(tuple(im.get(t, 0) for t in gamma))
        for k in range(1, len(vecs) + 1):
            for sub in itertools.combinations(sorted(vecs), k):
                family.add(sub)
    cones = {}
    for sub in family:
        pc = PolyCone.from_generators(sub, d)
        cones[pc.rays] = pc
    # every finite intersection is reached by intersecting with generators one at a time
    base = list(cones.values())
    frontier = list(base)
    while frontier:
        new = []
        for a in frontier:
            for b in base:
                pc = a.intersect(b)
                if pc.rays and pc.rays not in cones:
                    cones[pc.rays] = pc
                    new.append(pc)
        frontier = new
    forced = sorted({r for rays in cones for r in rays})
    refined = sorted({tuple(il.primitive(g)) for ch in _chambers_in(gamma, tF) for g in ch})
    return MinimalityReport(gamma, len(family), len(cones), forced, refined)


def minimality_certificate() -> List[MinimalityReport]:
    """One report per W(E_6)-orbit of maximal cones of F(E_6)."""
    from .complexes import simplex_orbits
    e6 = parse_system("E6")
    cx = build_R(e6)
    return [minimality_report(o[0]) for o in simplex_orbits(cx, cx.maximal)]


# ---------------------------------------------------------------- Ftilde(E_7)


@dataclass
class FibreCone:
    sigma: Tuple[int, ...]
    chamber: Tuple[Tuple[int, ...], ...]      # generators in target coordinates
    rays: Tuple[Tuple[int, ...], ...]         # extreme rays in sigma coordinates
    simplicial: bool


@dataclass
class SigmaRefinement:
    sigma: Tuple[int, ...]
    orbit_size: int
    target: Tuple[int, ...]
    pieces: List[FibreCone]
    volume: Fraction
    flat: bool
    reduced: bool
    fan_ok: bool

    @property
    def refined(self) -> bool:
        return len(self.pieces) > 1


def refine_sigma(data: ImageData, sigma: Tuple[int, ...], orbit_size: int = 1,
                 check_pairs: bool = True) -> SigmaRefinement:
    """pi^{-1}(chamber) & sigma for the chambers over the cone spanned by pi(sigma)."""
    tF = build_F(data.pi.target)
    target = image_support(data, sigma)
    if not spans_cone(tF, target):
        raise FanError(f"pi(sigma) is not inside one cone of F(E6) for sigma={sigma}")
    d = len(sigma)
    A = [_w_coords(data, r, target) for r in sigma]       # rows: generators, columns: target coords
    chambers = _chambers_in(target, tF)
    pieces = []
    seen = set()
    for ch in chambers:
        ineqs = [[int(i == j) for j in range(d)] for i in range(d)]
        # w = A^T lam must lie in cone(ch): dual description of the simplicial chamber
        cone_ch = PolyCone.from_generators(ch, len(target))
        for h in cone_ch.ineqs:
            ineqs.append([_dot(h, A[i]) for i in range(d)])
        eqs = [[_dot(e, A[i]) for i in range(d)] for e in cone_ch.eqs]
        pc = PolyCone.from_inequalities(ineqs, eqs, d)
        # chambers differing only in the order of coordinates equal on sigma give the same piece
        if pc.dim == d and pc.rays not in seen:
            seen.add(pc.rays)
            pieces.append((ch, pc))
    vol = Fraction(0)
    flat = reduced = True
    out = []
    for ch, pc in pieces:
        vol += cone_volume(pc)
        gens = {tuple(g): g for g in ch}
        for r in pc.rays:
            w = [sum(r[i] * A[i][t] for i in range(d)) for t in range(len(target))]
            if not any(w):
                continue
            p = tuple(il.primitive(w))
            if p not in gens:
                flat = False
            elif il.content(w) != 1:
                reduced = False
        out.append(FibreCone(sigma, tuple(ch), pc.rays, len(pc.rays) == d))
    fan_ok = True
    if check_pairs:
        cones = [pc for _, pc in pieces]
        for a, b in itertools.combinations(cones, 2):
            inter = a.intersect(b)
            if not _is_face(inter, a) or not _is_face(inter, b):
                fan_ok = False
    return SigmaRefinement(sigma, orbit_size, target, out, vol, flat, flat and reduced, fan_ok)


def _is_face(f: PolyCone, c: PolyCone) -> bool:
    if not set(f.rays) <= set(c.rays):
        return False
    if not f.rays:
        return True
    facets = c.facets().ineqs
    tight = [h for h in facets if all(_dot(h, r) == 0 for r in f.rays)]
    closure = {r for r in c.rays if all(_dot(h, r) == 0 for h in tight)}
    return closure == set(f.rays)


@dataclass
class FibreFanReport:
    orbits: int
    cones_total: int
    refined_orbits: int
    pieces_total: int
    simplicial_pieces: int
    nonsimplicial_pieces: int
    volumes_ok: bool
    flat: bool
    reduced: bool
    fan_ok: bool
    sigmas: List[SigmaRefinement] = field(repr=False)


def fiber_fan_E7() -> FibreFanReport:
    """Ftilde(E_7) on one cone of F(E_7) per W(E_6)-orbit."""
    data = e7_image_data()
    res = [refine_sigma(data, s, n) for s, n in e7_cone_orbits()]
    return FibreFanReport(
        orbits=len(res),
        cones_total=sum(r.orbit_size for r in res),
        refined_orbits=sum(1 for r in res if r.refined),
        pieces_total=sum(r.orbit_size * len(r.pieces) for r in res),
        simplicial_pieces=sum(r.orbit_size * sum(p.simplicial for p in r.pieces) for r in res),
        nonsimplicial_pieces=sum(r.orbit_size * sum(not p.simplicial for p in r.pieces) for r in res),
        volumes_ok=all(r.volume == 1 for r in res),
        flat=all(r.flat for r in res),
        reduced=all(r.reduced for r in res),
        fan_ok=all(r.fan_ok for r in res),
        sigmas=res)


# ---------------------------------------------------------------- horizontal rays, Eckhart cones


def horizontal_rays(pi: LatticeMap) -> List[int]:
    """D_2 rays not inside D_{n-1}, or A_1 rays not inside E_{n-1}."""
    F = build_F(pi.source)
    out = []
    for i, (lab, s) in enumerate(zip(F.labels, F.subsystems)):
        if pi.source.kind == "D":
            if lab == "D2" and not s <= pi.sub:
                out.append(i)
        elif lab == "A1" and not s <= pi.sub:
            out.append(i)
    return out


@dataclass
class EckhartReport:
    triples: List[Tuple[int, int, int]]
    orthogonal: bool
    cones_with_triple: int
    from_nonflat: int
    nonflat_triples_found: bool


def eckhart_cones() -> EckhartReport:
    """Triples of pairwise orthogonal horizontal A_1 rays spanning a cone (strict transforms are unchanged)."""
    data = e7_image_data()
    pi = data.pi
    e7 = pi.source
    F = build_F(e7)
    cx = build_R(e7)
    P = e7.pairings
    hor = horizontal_rays(pi)
    root = {i: next(iter(F.subsystems[i])) for i in hor}
    triples = [t for t in itertools.combinations(hor, 3)
               if all(P[root[a]][root[b]] == 0 for a, b in itertools.combinations(t, 2))
               and cx.is_simplex(t)]
    tset = set(triples)
    count = sum(1 for c in cx.maximal if any(t in tset for t in itertools.combinations(
        [r for r in c if r in root], 3)))
    # triples from non-flat A_3^2: the two A_1 pairs of A_3' outside E_6, each with Theta-perp
    vidx = {s: i for i, s in enumerate(F.subsystems)}
    made = set()
    for rec in data.table:
        if rec.kind != "interior":
            continue
        theta = F.subsystems[rec.ray]
        comps = components(e7, theta)
        a3p = [c for c in comps if not c <= pi.sub][0]
        tperp = perp(e7, theta)
        if len(tperp) != 1:
            raise FanError("Theta-perp is not a single A1")
        pairs = [(a, b) for a, b in itertools.combinations(sorted(a3p), 2) if P[a][b] == 0]
        for a, b in pairs:
            if a in pi.sub and b in pi.sub:
                continue
            t = tuple(sorted(vidx[frozenset([x])] for x in (a, b, next(iter(tperp)))))
            made.add(t)
    return EckhartReport(triples, all(P[root[a]][root[b]] == 0 for t in triples
                                      for a, b in itertools.combinations(t, 2)),
                         count, len(made), made <= tset)


# ---------------------------------------------------------------- bisector configurations


@dataclass
class BisectorConfiguration:
    sigma: Tuple[int, ...]
    target: Tuple[int, ...]            # A_1 rays of F(E_6): a, b, c, d
    bisector_ray: int                  # ray of sigma mapping to zeta(a) + zeta(b)
    pieces: int                        # cones of Ftilde(E_7) inside sigma


def bisector_configurations(limit: Optional[int] = None) -> List[BisectorConfiguration]:
    """Cones sigma of F(E_7) with pi(sigma) = cone(b, c, d, a + b) for four A_1 rays a, b, c, d.

    Such an image is not a cone of F(E_6); the preimage of the bisector cuts sigma.
    """
    data = e7_image_data()
    tF = build_F(data.pi.target)
    out = []
    for sigma, _ in e7_cone_orbits():
        target = image_support(data, sigma)
        if len(target) != 4 or any(tF.labels[t] != "A1" for t in target):
            continue
        ims = {r: data.image(r) for r in sigma}
        units = {next(iter(m)) for m in ims.values() if len(m) == 1 and set(m.values()) == {1}}
        for r, m in ims.items():
            if len(m) == 2 and set(m.values()) == {1} and len(units) == 3 and len(set(m) & units) == 1 \
                    and units | set(m) == set(target):
                pieces = len(refine_sigma(data, sigma, check_pairs=False).pieces)
                out.append(BisectorConfiguration(sigma, target, r, pieces))
                break
        if limit is not None and len(out) >= limit:
            break
    return out
