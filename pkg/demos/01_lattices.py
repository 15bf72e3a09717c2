"""Root systems and the lattice of units.

Run: python demos/01_lattices.py
"""
from __future__ import annotations

# %% Root systems of types D and E live in an odd unimodular lattice with exact integer pairings.
from adefans.rootsys import parse_system, root_label
from adefans.charlat import PSI_RELATIONS, build_N, check_psi_relation, d4_span_check

for name in ["D4", "D5", "D6", "E6", "E7"]:
    s = parse_system(name)
    print(f"{name}: {len(s)} positive roots, simple roots {[root_label(s, i) for i in s.simple_index]}")

# %% The unit lattice M is the cokernel dual of phi: Sym^2 -> Z^{positive roots}.
# Its rank equals the number of positive roots whose support covers the branch node and its three legs.
for name in ["D4", "D5", "D6", "D7", "D8", "E6", "E7"]:
    N = build_N(parse_system(name))
    print(f"rank M({name}) = {N.rank}, Smith divisors of phi all 1: {set(N.phi_divisors) == {1}}")

# %% psi of a subsystem is the sum of psi over its positive roots; a handful of linear relations hold.
for rel in PSI_RELATIONS:
    r = check_psi_relation(parse_system(rel.system), rel)
    print(f"{rel.system:3s} {rel.text:28s} checked on {r.representatives:4d} subsystems: {r.ok}")

# %% Units coming from D4 subsystems already generate all of M.
for name in ["D5", "E6", "E7"]:
    r = d4_span_check(parse_system(name))
    print(f"{name}: {r.num_d4} D4's, spans M: {r.ok}")
