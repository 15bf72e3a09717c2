"""D4 units as cross-ratios of points on the projective plane.

Run: python demos/04_cross_ratios.py
"""
from __future__ import annotations

# %% Six rational parameters q_1..q_6 give a point of the E6 torus; admissible means no root value vanishes.
import random
from fractions import Fraction

from adefans import units_eval as ue
from adefans.rootsys import parse_system

e6 = parse_system("E6")
x = ue.ConfigPoint.of(e6, [Fraction(v) for v in (1, 2, 5, 7, -11, 13)])
print("admissible:", ue.is_admissible(e6, x))

# %% Projecting from the fifth point, the cross-ratio of the other four is a product of root values.
idx = (1, 2, 3, 4, 5)
cr = ue.projection_cross_ratio(x.coords, idx)
unit = ue.projection_unit(e6, idx)
print("cross-ratio:", cr, " unit value:", ue.evaluate_unit(e6, unit, x))
print("unit recognized as a D4 unit:", ue.unit_as_d4_unit(e6, unit) is not None)

# %% Swapping two labels flips the orientation of the positive roots involved, hence the sign.
idx = (2, 1, 3, 4, 5)
print("sign", ue.orientation_sign(idx), ":", ue.projection_cross_ratio(x.coords, idx),
      "vs", ue.evaluate_unit(e6, ue.projection_unit(e6, idx), x))

# %% For D_n, the forgetful cross-ratio of squares matches its D4 unit exactly.
d6 = parse_system("D6")
pt = ue.random_point(d6, random.Random(1))
print("D6 forgetful identity:", ue.forgetful_check(d6, (1, 2, 3, 4), pt))
