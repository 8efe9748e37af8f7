"""
Weighted measures of symmetric polytopes
========================================

Face measures, the cone formula and the mixed measure for a square
under the density |x_1|.
"""

import numpy as np

from weighted_minkowski.body import diamond, square
from weighted_minkowski.density import named
from weighted_minkowski.integrate import body_measure_cone, body_measure_mc
from weighted_minkowski.mixed import mixed_measure, mixed_measure_oracle
from weighted_minkowski.surface import sigma

P = square()
d = named("X1", 2)

# the weighted surface measure is a list of atoms on the normals
s = sigma(P, d)
for u, w in zip(s.directions, s.weights):
    print(u, w)

# the cone formula versus rejection sampling
print("cone:", body_measure_cone(P, d))
est = body_measure_mc(P, d, 10**6, seed=0)
print("monte carlo:", est.estimate, "+/-", est.se)

# mixed measure of the square with the diamond, and its finite-difference check
print("mu_1(P, Q):", mixed_measure(P, diamond(), d).value)
print("oracle:", mixed_measure_oracle(P, diamond(), d).value)
