"""Units of M(Delta) as rational functions on the arrangement complement.

A point x is stored as a linear functional on the ambient lattice, so a root
alpha takes the value alpha . x (plain dot product):
  E_n:  x = (0, q_1, ..., q_n), so e_i - e_j -> q_i - q_j and
        h - e_i - e_j - e_k -> -(q_i + q_j + q_k);
  D_n:  x = (eps_1, ..., eps_n), so eps_i -+ eps_j -> eps_i -+ eps_j.
A unit m in Z^{Delta_+} evaluates to prod alpha(x)^{m_alpha}.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .charlat import d4_unit, member_M
from .rootsys import RootSystem
from .subsys import D4Record, d4_containing


class DomainError(ValueError):
    """The point lies on a root hyperplane."""


@dataclass(frozen=True)
class ConfigPoint:
    system: str
    coords: Tuple[Fraction, ...]          # q_1..q_n or eps_1..eps_n

    @staticmethod
    def of(sys: RootSystem, values: Sequence) -> "ConfigPoint":
        if len(values) != sys.rank:
            raise ValueError(f"{sys.name} needs {sys.rank} coordinates")
        return ConfigPoint(sys.name, tuple(Fraction(v) for v in values))


def functional(sys: RootSystem, x: ConfigPoint) -> List[Fraction]:
    if sys.kind == "E":
        return [Fraction(0)] + list(x.coords)
    return list(x.coords)


def _value(sys: RootSystem, i: int, X: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(sys.positive_roots[i], X)), Fraction(0))


def root_value(sys: RootSystem, i: int, x: ConfigPoint) -> Fraction:
    v = _value(sys, i, functional(sys, x))
    if v == 0:
        raise DomainError(f"root {i} vanishes at {x.coords}")
    return v


def offending_roots(sys: RootSystem, x: ConfigPoint) -> List[int]:
    X = functional(sys, x)
    return [i for i in range(len(sys)) if _value(sys, i, X) == 0]


def is_admissible(sys: RootSystem, x: ConfigPoint) -> bool:
    return not offending_roots(sys, x)


def evaluate_on(sys: RootSystem, m: Sequence[int], X: Sequence[Fraction]) -> Fraction:
    out = Fraction(1)
    for i, e in enumerate(m):
        if e:
            v = _value(sys, i, X)
            if v == 0:
                raise DomainError(f"root {i} vanishes")
            out *= v ** e
    return out


def evaluate_unit(sys: RootSystem, m: Sequence[int], x: ConfigPoint) -> Fraction:
    bad = offending_roots(sys, x)
    if bad:
        raise DomainError(f"point lies on the hyperplane of root {bad[0]}")
    return evaluate_on(sys, m, functional(sys, x))


def random_point(sys: RootSystem, rng: random.Random, bound: int = 50, tries: int = 10000) -> ConfigPoint:
    """Small integer coordinates, resampled until no root vanishes."""
    for _ in range(tries):
        x = ConfigPoint.of(sys, [rng.randint(-bound, bound) for _ in range(sys.rank)])
        if is_admissible(sys, x):
            return x
    raise RuntimeError("no admissible point found")


# ---------------------------------------------------------------- E_n: projections from a point


def cubic_det(a: Fraction, b: Fraction, c: Fraction) -> Fraction:
    """det [[a, b, c], [a^3, b^3, c^3], [1, 1, 1]], by cofactor expansion."""
    return (a * (b ** 3 - c ** 3) - b * (a ** 3 - c ** 3) + c * (a ** 3 - b ** 3))


def cubic_det_factored(a: Fraction, b: Fraction, c: Fraction) -> Fraction:
    return (a - b) * (b - c) * (c - a) * (a + b + c)


def projection_cross_ratio(q: Sequence[Fraction], idx: Sequence[int]) -> Fraction:
    """Cross-ratio of p_a, p_b, p_c, p_d projected from p_e, as a ratio of 3x3 determinants."""
    a, b, c, d, e = (q[i - 1] for i in idx)
    den = cubic_det(a, c, e) * cubic_det(b, d, e)
    if den == 0:
        raise DomainError("degenerate configuration")
    return cubic_det(a, b, e) * cubic_det(c, d, e) / den


def _e_root(sys: RootSystem, ones: Sequence[int], h: int) -> int:
    """Index of the root h-coefficient ``h`` with e-coefficients from ``ones`` (1-based, signed)."""
    v = [0] * sys.dim
    v[0] = h
    for k in ones:
        v[abs(k)] += 1 if k > 0 else -1
    return sys.index(v)


def projection_unit(sys: RootSystem, idx: Sequence[int]) -> List[int]:
    """alpha_cd alpha_ab alpha_cde alpha_abe / (alpha_ac alpha_bd alpha_ace alpha_bde)."""
    a, b, c, d, e = idx
    m = [0] * len(sys)
    for ones, h, s in [((c, -d), 0, 1), ((a, -b), 0, 1), ((-c, -d, -e), 1, 1), ((-a, -b, -e), 1, 1),
                       ((a, -c), 0, -1), ((b, -d), 0, -1), ((-a, -c, -e), 1, -1), ((-b, -d, -e), 1, -1)]:
        m[_e_root(sys, ones, h)] += s
    return m


def orientation_sign(idx: Sequence[int]) -> int:
    """Sign picked up when the differences over ab, cd, ac, bd are replaced by positive roots.

    A difference x_i - x_j with i > j is minus the stored positive root.
    """
    a, b, c, d = idx[:4]
    flips = sum(1 for x, y in [(a, b), (c, d), (a, c), (b, d)] if x > y)
    return -1 if flips % 2 else 1


def cross_ratio_pullback_check(sys: RootSystem, idx: Sequence[int], x: ConfigPoint) -> bool:
    """Determinant form equals the 8-root product times ``orientation_sign``.

    The four roots h - e_i - e_j - e_k contribute (-1)^2 / (-1)^2 and cancel.
    """
    if sys.kind != "E" or len(set(idx)) != 5:
        raise ValueError("needs E_n and five distinct indices")
    if not is_admissible(sys, x):
        raise DomainError("point is not admissible")
    return projection_cross_ratio(x.coords, idx) == orientation_sign(idx) * evaluate_unit(sys, projection_unit(sys, idx), x)


# ---------------------------------------------------------------- D_n: forgetful cross-ratios


def forgetful_cross_ratio(eps: Sequence[Fraction], idx: Sequence[int]) -> Fraction:
    """Cross-ratio of eps_i^2, eps_j^2, eps_k^2, eps_l^2 in P^1."""
    i, j, k, l = (Fraction(eps[t - 1]) ** 2 for t in idx)
    return (i - j) * (k - l) / ((i - k) * (j - l))


def forgetful_unit(sys: RootSystem, idx: Sequence[int]) -> List[int]:
    i, j, k, l = idx
    m = [0] * len(sys)

    def root(a, b, sign):
        v = [0] * sys.dim
        v[a - 1] += 1
        v[b - 1] += sign
        return sys.index(v)

    for a, b, s in [(i, j, 1), (k, l, 1), (i, k, -1), (j, l, -1)]:
        m[root(a, b, -1)] += s
        m[root(a, b, 1)] += s
    return m


def forgetful_check(sys: RootSystem, idx: Sequence[int], x: ConfigPoint) -> bool:
    return forgetful_cross_ratio(x.coords, idx) == orientation_sign(idx) * evaluate_unit(sys, forgetful_unit(sys, idx), x)


# ---------------------------------------------------------------- D_4 units


def type_I_unit(sys: RootSystem, rec: D4Record, i: int, j: int) -> List[int]:
    """Image of u(F_i, F_j) under M(D_4) -> M(Delta)."""
    u = d4_unit(sys, rec, i, j)
    if not member_M(sys, u):
        raise ValueError("not a unit")
    return u


def unit_as_d4_unit(sys: RootSystem, m: Sequence[int]) -> Optional[Tuple[D4Record, int, int]]:
    """If m is +1 on one fourtuple and -1 on another of a single D_4, return (record, i, j)."""
    plus = [a for a, c in enumerate(m) if c == 1]
    minus = [a for a, c in enumerate(m) if c == -1]
    if len(plus) != 4 or len(minus) != 4 or any(c not in (0, 1, -1) for c in m):
        return None
    rec = d4_containing(sys, plus + minus)
    i, j = rec.fourtuple_of(plus[0]) + 1, rec.fourtuple_of(minus[0]) + 1
    if i == j:
        return None
    if list(d4_unit(sys, rec, i, j)) != list(m):
        return None
    return rec, i, j


# ---------------------------------------------------------------- Weyl equivariance


def act_on_unit(sys: RootSystem, word: Sequence[int], m: Sequence[int]) -> List[int]:
    """w.m for w = s_{word[0]} ... s_{word[-1]}, moving exponents along the root permutation."""
    perms = sys.generator_permutations()
    m = list(m)
    for g in reversed(word):
        new = [0] * len(m)
        for a, (b, _) in enumerate(perms[g]):
            new[b] += m[a]
        m = new
    return m


def act_on_point(sys: RootSystem, word: Sequence[int], X: Sequence[Fraction]) -> List[Fraction]:
    """w^{-1}.x as a functional: f -> f o w."""
    X = list(X)
    diag = [sys.gram[k][k] for k in range(sys.dim)]
    for g in word:
        r = sys.simple_roots[g]
        fr = sum((a * b for a, b in zip(r, X)), Fraction(0))
        X = [X[k] + fr * diag[k] * r[k] for k in range(sys.dim)]
    return X


@dataclass
class WeylRatio:
    constant: Optional[Fraction]
    points: int

    @property
    def ok(self) -> bool:
        return self.constant is not None


def weyl_ratio_check(sys: RootSystem, m: Sequence[int], word: Sequence[int],
                     points: Sequence[ConfigPoint]) -> WeylRatio:
    """x -> eval(w.m, x) / eval(m, w^{-1}.x) is constant on the sample."""
    wm = act_on_unit(sys, word, m)
    values = set()
    for x in points:
        X = functional(sys, x)
        values.add(evaluate_on(sys, wm, X) / evaluate_on(sys, m, act_on_point(sys, word, X)))
    return WeylRatio(values.pop() if len(values) == 1 else None, len(points))


def sample_index_choices(n: int, count: int, rng: random.Random) -> List[Tuple[int, ...]]:
    allc = list(itertools.permutations(range(1, n + 1), 5))
    return rng.sample(allc, count)
