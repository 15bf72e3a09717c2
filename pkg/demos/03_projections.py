"""Projections E6 -> D5 and E7 -> E6, and why the second needs a refinement.

Run: python demos/03_projections.py  (about a minute)
"""
from __future__ import annotations

# %% The projection sends each ray to zero, a ray, or a sum of rays of the smaller fan.
from adefans.fancore import build_F
from adefans.fanmaps import (bisector_configurations, case_counts, flatness_check, projection_map,
                             ray_image_table, refine_E6, refinement_volumes)
from adefans.rootsys import parse_system

e7, e6, d5 = parse_system("E7"), parse_system("E6"), parse_system("D5")
for src, tgt in [(e6, d5), (e7, e6)]:
    pi = projection_map(src, tgt)
    table = ray_image_table(pi)
    print(f"{src.name} -> {tgt.name}: zero rays {sum(r.kind == 'zero' for r in table)}")
    for case, n in case_counts(table).items():
        print(f"   {n:4d}  {case}")
    print("   flatness:", flatness_check(pi, build_F(src), build_F(tgt)).verdict)

# %% The 270 A3^2 rays land inside cones of F(E6) as zeta(A1) + zeta(A1'), splitting some cones along a bisector.
conf = bisector_configurations(limit=1)[0]
print(f"a cone whose image is cone(b, c, d, a+b): split into {conf.pieces} pieces")

# %% Adding those bisector rays to F(E6) gives a strictly simplicial refinement with unimodular pieces.
sd = refine_E6(e6)
vols = refinement_volumes(sd)
print(f"refined F(E6): {len(sd.fan.rays)} rays ({len(sd.added)} new), {len(sd.fan.cones)} cones, "
      f"each parent covered with volume 1: {all(v == 1 for v in vols.values())}")
