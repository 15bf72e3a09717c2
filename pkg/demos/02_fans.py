"""The fan F(E6): rays, cones and a dual basis of D4 units.

Run: python demos/02_fans.py
"""
from __future__ import annotations

# %% Rays are first lattice points of psi(Theta) for A1 and A2^3 subsystems; cones come from the complex R(E6).
from collections import Counter

from adefans.charlat import build_N, d4_unit
from adefans.complexes import build_R
from adefans.fancore import (build_F, build_G, dual_basis_certificate, intersection_fan_certificate,
                             strict_simpliciality_report)
from adefans.rootsys import parse_system, root_label

e6 = parse_system("E6")
F = build_F(e6)
print("ray types:", dict(Counter(F.labels)))
print("maximal cones:", len(F.cones), "of size", {len(c) for c in F.cones})
print("complex R(E6) has", len(build_R(e6).maximal), "maximal simplices")

# %% Every cone is generated by part of a lattice basis.
print("strictly simplicial:", strict_simpliciality_report(F).ok)

# %% Each cone is cut out by its images in the D4 quotients.
rep = intersection_fan_certificate(F, e6, exhaustive=True)
print(f"intersection-fan certificate: {rep.cones_checked} cones, {rep.faces_checked} faces, ok={rep.ok}")

# %% The bigger fan G(E6) has 432 pentadiagram cones; each admits a dual basis made of D4 units.
G = build_G(e6)
print("G(E6) maximal cones:", len(G.cones))
db = dual_basis_certificate(G, e6, G.cones[0])
N = build_N(e6)
for w in db.witnesses[:4]:
    plus = sorted(root_label(e6, a) for a in w.record.fourtuples[w.i - 1])
    minus = sorted(root_label(e6, a) for a in w.record.fourtuples[w.j - 1])
    pairing = [N.pair(d4_unit(e6, w.record, w.i, w.j), G.rays[r]) for r in db.cone]
    print(f"ray {G.labels[w.ray]:5s} unit +{plus} -{minus} pairs to {pairing}")
