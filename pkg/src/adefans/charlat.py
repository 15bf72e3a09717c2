"""The lattices M(Delta) and N(Delta) and the maps between them.

Sym^2 of the dual root lattice maps to Z^{Delta_+} by evaluating a quadratic
form on every positive root (``phi``).  N is its cokernel, M = Hom(N, Z) is the
lattice of exponent vectors m with sum m_a a (x) a = 0.

Coordinates.  The positive roots with three-legged support index a basis of
N: phi restricted to the remaining rows is unimodular, so every x in
Z^{Delta_+} is congruent modulo the image of phi to a unique vector supported
on those roots.  The resulting integer matrix ``psi`` (rank x |Delta_+|) is the
identity on the three-legged columns; its rows are a basis of M, and the
pairing of m in M with an N-vector n is ``m restricted to the basis roots . n``.
If the unimodularity ever failed we fall back to a Smith-form cokernel basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from . import intlinalg as il
from .rootsys import RootSystem
from .subsys import (D4Record, RootSet, _components, d4_catalog, enumerate_subsystems,
                     simple_system)


class TorsionError(RuntimeError):
    pass


# ---------------------------------------------------------------- abstract root data


@dataclass(frozen=True, eq=False)
class RootData:
    """Positive roots in simple-root coordinates plus the Dynkin diagram.

    ``ambient`` lists, for each root, its index in the surrounding system (if
    any), so that a subsystem carries its own lattices and the embedding.
    """
    name: str
    coords: Tuple[Tuple[int, ...], ...]
    edges: Tuple[Tuple[int, int], ...]
    ambient: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.coords[0]) if self.coords else 0

    def __len__(self):
        return len(self.coords)

    def three_legged(self) -> List[int]:
        out = []
        for k, c in enumerate(self.coords):
            supp = {i for i, x in enumerate(c) if x}
            deg = {i: 0 for i in supp}
            for a, b in self.edges:
                if a in supp and b in supp:
                    deg[a] += 1
                    deg[b] += 1
            if any(d >= 3 for d in deg.values()):
                out.append(k)
        return out


def root_data(sys: RootSystem) -> RootData:
    return RootData(sys.name, sys.simple_coords, sys.dynkin_edges(), tuple(range(len(sys))))


def subsystem_root_data(sys: RootSystem, s: RootSet) -> RootData:
    """Root data of a closed subsystem, relative to its own simple roots."""
    simple = simple_system(sys, s)
    R = sys.positive_roots
    G = [[sys.pair(R[a], R[b]) for b in simple] for a in simple]
    members = sorted(s)
    coords = []
    for i in members:
        rhs = [sys.pair(R[a], R[i]) for a in simple]
        c = il.solve_rational(G, rhs)
        if c is None or any(x.denominator != 1 for x in c):
            raise ValueError("root outside the lattice of its subsystem")
        coords.append(tuple(int(x) for x in c))
    P = sys.pairings
    edges = tuple((a, b) for a in range(len(simple)) for b in range(a + 1, len(simple))
                  if P[simple[a]][simple[b]])
    return RootData(f"sub{len(members)}", tuple(coords), edges, tuple(members))


# ---------------------------------------------------------------- phi


def sym2_basis(rank: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(rank) for j in range(i, rank)]


def phi_matrix(data: RootData) -> List[List[int]]:
    """Rows indexed by positive roots, columns by monomials w_i w_j (i <= j)."""
    basis = sym2_basis(data.rank)
    return [[c[i] * c[j] for i, j in basis] for c in data.coords]


def phi(sys: RootSystem, form: Mapping[Tuple[int, int], int], coords: str = "simple") -> List[int]:
    """Values of the quadratic form sum c_ij x_i x_j on every positive root.

    ``coords="simple"`` reads x in simple-root coordinates, ``"ambient"`` in
    the ambient lattice coordinates (h, e_i for E_n; eps_i for D_n).
    """
    vecs = sys.simple_coords if coords == "simple" else sys.positive_roots
    return [sum(c * v[i] * v[j] for (i, j), c in form.items()) for v in vecs]


def ambient_form_values(sys: RootSystem, f) -> List[int]:
    """Values of an arbitrary callable on the ambient coordinates of every positive root."""
    return [f(v) for v in sys.positive_roots]


# ---------------------------------------------------------------- N and M


@dataclass(frozen=True, eq=False)
class NLattice:
    data: RootData
    psi: Tuple[Tuple[int, ...], ...]
    basis_roots: Tuple[int, ...]
    phi: Tuple[Tuple[int, ...], ...] = field(repr=False)
    phi_divisors: Tuple[int, ...] = field(repr=False)
    method: str = "three-legged"

    @property
    def rank(self) -> int:
        return len(self.psi)

    @property
    def size(self) -> int:
        return len(self.data)

    def psi_of(self, x: Sequence[int]) -> List[int]:
        return il.matvec(self.psi, x)

    def psi_root(self, i: int) -> List[int]:
        return [row[i] for row in self.psi]

    def psi_set(self, roots: Iterable[int]) -> List[int]:
        """psi of a subsystem given by its positive roots (local indices)."""
        out = [0] * self.rank
        for i in roots:
            for k, row in enumerate(self.psi):
                out[k] += row[i]
        return out

    def m_basis(self) -> List[List[int]]:
        return [list(r) for r in self.psi]

    def m_coords(self, m: Sequence[int]) -> List[int]:
        """Coordinates of m in M with respect to ``m_basis`` (m must lie in M)."""
        if self.method == "three-legged":
            c = [m[i] for i in self.basis_roots]
            if il.matvec(il.transpose(self.psi), c) != list(m):
                raise ValueError("vector is not in M")
            return c
        sol = il.solve_rational(il.transpose(self.psi), list(m))
        if sol is None or any(x.denominator != 1 for x in sol):
            raise ValueError("vector is not in M")
        return [int(x) for x in sol]

    def pair(self, m: Sequence[int], n: Sequence[int]) -> int:
        """<m, n> for m in M (as a vector in Z^{Delta_+}) and n in N-coordinates."""
        return sum(a * b for a, b in zip(self.m_coords(m), n))


def _three_legged_psi(data: RootData, P: List[List[int]]) -> Optional[List[List[int]]]:
    T = data.three_legged()
    rest = [i for i in range(len(data)) if i not in set(T)]
    if len(rest) != len(P[0]):
        return None
    if not rest:
        return [[int(i == t) for i in range(len(data))] for t in T]
    A = [P[i] for i in rest]  # square
    if abs(il.det(A)) != 1:
        return None
    # psi = [I on T | -phi_T A^{-1} on rest]
    At = il.transpose(A)
    psi = []
    for t in T:
        # row vector r with r A = phi_T[t], i.e. A^T r^T = phi_T[t]^T
        r = il.solve_rational(At, P[t])
        if r is None or any(x.denominator != 1 for x in r):
            return None
        row = [0] * len(data)
        row[t] = 1
        for k, i in enumerate(rest):
            row[i] = -int(r[k])
        psi.append(row)
    return psi


def _smith_psi(P: List[List[int]]) -> List[List[int]]:
    U, D, _ = il.smith_normal_form(P)
    r = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    return [list(U[i]) for i in range(r, len(P))]


def build_N_from_data(data: RootData) -> NLattice:
    if data.rank == 0:
        return NLattice(data, tuple(), tuple(), tuple(), tuple(), "trivial")
    P = phi_matrix(data)
    divs = il.elementary_divisors(P)
    if len(divs) != len(P[0]):
        raise TorsionError(f"phi is not injective for {data.name}")
    if any(d != 1 for d in divs):
        raise TorsionError(f"coker phi has torsion for {data.name}: {divs}")
    psi = _three_legged_psi(data, P)
    method = "three-legged"
    basis = tuple(data.three_legged())
    if psi is None:
        psi = _smith_psi(P)
        method = "smith"
    if any(any(x for x in row) for row in il.matmul(psi, P)):
        raise RuntimeError("psi o phi != 0")
    return NLattice(data, tuple(map(tuple, psi)), basis, tuple(map(tuple, P)),
                    tuple(divs), method)


@lru_cache(maxsize=None)
def build_N(sys: RootSystem) -> NLattice:
    return build_N_from_data(root_data(sys))


def rank_M(sys: RootSystem) -> int:
    return build_N(sys).rank


def member_M(sys: RootSystem, u: Sequence[int]) -> bool:
    """True iff sum u_a (a (x) a) vanishes as a symmetric matrix."""
    R = sys.positive_roots
    n = sys.dim
    S = [[0] * n for _ in range(n)]
    for a, c in zip(R, u):
        if c:
            for i in range(n):
                if a[i]:
                    for j in range(n):
                        S[i][j] += c * a[i] * a[j]
    return not any(any(row) for row in S)


def psi_subsystem(N: NLattice, theta: Iterable[int]) -> List[int]:
    """psi(Theta) for a subsystem given by ambient positive-root indices."""
    return N.psi_set(theta)


def first_lattice_point(v: Sequence[int]) -> List[int]:
    """Primitive vector on the ray through v (N is torsion free, so dividing by gcd is exact)."""
    return il.primitive(v)


def divisibility(v: Sequence[int]) -> int:
    return il.content(v)


def indicator(n: int, roots: Iterable[int]) -> List[int]:
    v = [0] * n
    for i in roots:
        v[i] += 1
    return v


# ---------------------------------------------------------------- D_4 units


def d4_unit(sys: RootSystem, rec: D4Record, i: int, j: int) -> List[int]:
    """+1 on F_i, -1 on F_j, 0 elsewhere (i, j in {1, 2, 3})."""
    if i == j or not {i, j} <= {1, 2, 3}:
        raise ValueError("need two distinct fourtuples among 1, 2, 3")
    u = [0] * len(sys)
    for a in rec.fourtuples[i - 1]:
        u[a] = 1
    for a in rec.fourtuples[j - 1]:
        u[a] = -1
    return u


def d4_units_matrix(sys: RootSystem) -> List[List[int]]:
    """Rows u(F_1,F_2), u(F_2,F_3) for every D_4 of the catalog, in M-coordinates."""
    N = build_N(sys)
    rows = []
    for rec in d4_catalog(sys):
        rows.append(N.m_coords(d4_unit(sys, rec, 1, 2)))
        rows.append(N.m_coords(d4_unit(sys, rec, 2, 3)))
    return rows


@dataclass
class SpanReport:
    system: str
    rank: int
    num_d4: int
    cokernel_divisors: List[int]
    kernel_rank: int

    @property
    def ok(self) -> bool:
        return (len(self.cokernel_divisors) == self.rank
                and all(d == 1 for d in self.cokernel_divisors)
                and self.kernel_rank == 0)


def d4_span_check(sys: RootSystem) -> SpanReport:
    """D_4 units generate M over Z, and N injects into the sum of the N(D_4)."""
    U = d4_units_matrix(sys)
    N = build_N(sys)
    divs = il.elementary_divisors(U) if U else []
    # kernel of n -> (<u, n>)_u has rank rk N - rank(U)
    kernel = N.rank - (il.rank(U) if U else 0)
    return SpanReport(sys.name, N.rank, len(d4_catalog(sys)), divs, kernel)


# ---------------------------------------------------------------- restriction


@dataclass(frozen=True, eq=False)
class Restriction:
    """M(sub) -> M(ambient) by extension by zero, and its dual N(ambient) -> N(sub)."""
    ambient: NLattice
    sub: NLattice
    m_map: Tuple[Tuple[int, ...], ...]   # |Delta_+| x rk N(sub): sub M-coords -> Z^{Delta_+}
    n_map: Tuple[Tuple[int, ...], ...]   # rk N(sub) x rk N(ambient)

    def project(self, n: Sequence[int]) -> List[int]:
        return il.matvec(self.n_map, n)


def restriction_maps(sys: RootSystem, s: RootSet, N: Optional[NLattice] = None) -> Restriction:
    N = N or build_N(sys)
    sub = build_N_from_data(subsystem_root_data(sys, s))
    members = sub.data.ambient
    size = len(sys)
    # lift n to Z^{Delta_+} (supported on the basis roots), restrict, apply psi'
    lift = lift_matrix(N)
    n_map = []
    for row in sub.psi:
        full = [0] * size
        for k, a in enumerate(members):
            full[a] = row[k]
        n_map.append(tuple(il.matvec(il.transpose(lift), full)))
    m_map = []
    for i in range(size):
        m_map.append(tuple(0 for _ in range(sub.rank)))
    m_map = [list(r) for r in m_map]
    for k, row in enumerate(sub.psi):
        for j, a in enumerate(members):
            m_map[a][k] = row[j]
    return Restriction(N, sub, m_map=tuple(map(tuple, m_map)), n_map=tuple(n_map))


def lift_matrix(N: NLattice) -> List[List[int]]:
    """|Delta_+| x rk N matrix L with psi L = identity."""
    size = N.size
    if N.method == "three-legged":
        L = [[0] * N.rank for _ in range(size)]
        for k, t in enumerate(N.basis_roots):
            L[t][k] = 1
        return L
    cols = []
    for k in range(N.rank):
        e = [int(i == k) for i in range(N.rank)]
        x = il.solve_rational(N.psi, e)
        cols.append([int(v) for v in x])  # Smith rows of U give an integral right inverse
    return il.transpose(cols)


def check_restriction(r: Restriction) -> bool:
    """pi o psi = psi' o restriction, and pi is surjective."""
    N, sub = r.ambient, r.sub
    lhs = il.matmul(r.n_map, N.psi)
    members = sub.data.ambient
    rhs = [[0] * N.size for _ in range(sub.rank)]
    for k, row in enumerate(sub.psi):
        for j, a in enumerate(members):
            rhs[k][a] = row[j]
    if lhs != rhs:
        return False
    return not r.n_map or il.lattice_equal_full(il.transpose(r.n_map), sub.rank)


# ---------------------------------------------------------------- b_Gamma


@dataclass
class BGamma:
    label: str
    subsystems: List[RootSet]
    m: int
    matrix: List[List[int]]   # rows: Theta, columns: M-coordinates; entries <m_k, psi(Theta)>/m


def b_gamma(sys: RootSystem, label: str) -> BGamma:
    """c_Gamma(m) = (<m, psi(Theta)>)_Theta divided by the largest common divisor m_Gamma."""
    N = build_N(sys)
    subs = enumerate_subsystems(sys, label)
    C = [N.psi_set(t) for t in subs]
    g = 0
    for row in C:
        g = gcd(g, il.content(row))
    if g == 0:
        return BGamma(label, subs, 0, C)
    return BGamma(label, subs, g, [[x // g for x in row] for row in C])


# ---------------------------------------------------------------- psi relations


@dataclass(frozen=True)
class PsiRelation:
    """a * psi(Theta) + b * psi(perp) + c * psi(A_7) = 0 for Theta of the given type."""
    system: str
    theta: str
    perp_type: str
    coeffs: Tuple[int, int, int]
    text: str


PSI_RELATIONS: Tuple[PsiRelation, ...] = (
    PsiRelation("E6", "A1", "A5", (3, -1, 0), "psi(A5)=3psi(A1)"),
    PsiRelation("E6", "A2", "A2^2", (2, -1, 0), "2psi(A2)=psi(A2^2)"),
    PsiRelation("E6", "A3", "A1^2", (1, -1, 0), "psi(A3)=psi(A1^2)"),
    PsiRelation("E6", "A4", "A1", (1, -2, 0), "psi(A4)=2psi(A1)"),
    PsiRelation("E6", "D4", "0", (1, 0, 0), "psi(D4)=0"),
    PsiRelation("E6", "D5", "0", (1, 0, 0), "psi(D5)=0"),
    PsiRelation("E7", "A1", "D6", (3, -1, 0), "psi(D6)=3psi(A1)"),
    PsiRelation("E7", "A2", "A5", (2, -1, 0), "psi(A5-)=2psi(A2)"),
    PsiRelation("E7", "A3", "A1xA3", (1, 0, 0), "psi(A3)=psi(A3')"),
    PsiRelation("E7", "D4", "A1^3", (1, -1, 0), "psi(D4)=psi(A1^3)"),
    PsiRelation("E7", "D5", "A1", (1, -2, 0), "psi(D5)=2psi(A1)"),
    PsiRelation("E7", "E6", "0", (1, 0, 0), "psi(E6)=0"),
    PsiRelation("E7", "A4", "A2", (4, -4, -1), "4psi(A4)=4psi(A2)+psi(A7)"),
    PsiRelation("E7", "A5+", "A1", (2, -2, -1), "2psi(A5+)=2psi(A1)+psi(A7)"),
    PsiRelation("E7", "A6", "0", (4, 0, -3), "4psi(A6)=3psi(A7)"),
)

DIVISIBILITY: Tuple[Tuple[str, str, int], ...] = (
    ("E6", "A2^3", 3),
    ("E7", "A3^2", 2),
    ("E7", "A7", 4),
)


@dataclass
class RelationCheck:
    relation: PsiRelation
    representatives: int
    ok: bool
    detail: str = ""


def _a3_factor(sys: RootSystem, s: RootSet) -> RootSet:
    from .subsys import reflection_closure
    for comp in _components(sys, simple_system(sys, s)):
        if len(comp) == 3:
            return reflection_closure(sys, comp)
    raise ValueError("no A3 factor")


def check_psi_relation(sys: RootSystem, rel: PsiRelation, limit: Optional[int] = None) -> RelationCheck:
    """Check the relation on every subsystem of the type (or the first ``limit``)."""
    from .subsys import perp, recognize_type, refined_type
    N = build_N(sys)
    thetas = enumerate_subsystems(sys, rel.theta)
    if limit is not None:
        thetas = thetas[:limit]
    a7s = enumerate_subsystems(sys, "A7") if rel.coeffs[2] else []
    for th in thetas:
        p = perp(sys, th)
        if recognize_type(sys, p) != rel.perp_type:
            return RelationCheck(rel, len(thetas), False,
                                 f"perp has type {recognize_type(sys, p)}")
        if rel.theta == "A2" and sys.name == "E7" and refined_type(sys, p) != "A5-":
            return RelationCheck(rel, len(thetas), False, "perp of A2 is not A5-")
        other = _a3_factor(sys, p) if rel.theta == "A3" and sys.name == "E7" else p
        a, b, c = rel.coeffs
        if rel.theta == "A3" and sys.name == "E7":
            a, b = 1, -1
        v = [a * x + b * y for x, y in zip(N.psi_set(th), N.psi_set(other))]
        if c:
            both = th | p
            cont = [t for t in a7s if both <= t]
            if len(cont) != 1:
                return RelationCheck(rel, len(thetas), False,
                                     f"{len(cont)} A7's contain Theta and its perp")
            v = [x + c * y for x, y in zip(v, N.psi_set(cont[0]))]
        if any(v):
            return RelationCheck(rel, len(thetas), False, f"nonzero residue {v}")
    return RelationCheck(rel, len(thetas), True)


def dn_relation_check(sys: RootSystem) -> bool:
    """psi(D_k) = psi(D_k^perp) = 2 psi(A_{k-1}) for the standard D_k, A_{k-1} in D_n."""
    n = sys.rank
    N = build_N(sys)
    R = sys.positive_roots
    for k in range(2, n - 1):
        first = set(range(k))
        dk = [i for i, v in enumerate(R) if {j for j, x in enumerate(v) if x} <= first]
        dperp = [i for i, v in enumerate(R) if not ({j for j, x in enumerate(v) if x} & first)]
        ak = [i for i in dk if sum(R[i]) == 0]
        pk, pp, pa = N.psi_set(dk), N.psi_set(dperp), N.psi_set(ak)
        if pk != pp:
            return False
        if pk != [2 * x for x in pa]:
            return False
    return True
