"""
Comparing bodies through weighted projection functions
======================================================

When one projection function dominates another and the larger body is a
zonotope, the measures compare the same way. Balls under a ball-indicator
density show the comparison failing without that structure.
"""

import numpy as np

from weighted_minkowski.body import diamond, scale, square
from weighted_minkowski.density import named
from weighted_minkowski.projection import P_mu, sphere_directions
from weighted_minkowski.shephard import ball_pair_regression, shephard_verify, stability_check

d = named("X1", 2)
L = square()
th = sphere_directions(2, 8, seed=0)
print(np.column_stack([th, P_mu(diamond(), d, th), P_mu(L, d, th)]))

rep = shephard_verify(diamond(), L, d)
print(rep.verdict, "delta =", rep.delta, "mu(K) =", rep.mu_K, "mu(L) =", rep.mu_L)

# a slightly larger K violates dominance; the stability bound absorbs it
st = stability_check(scale(L, 1.01), L, d)
print("eps =", st.eps, "slack =", st.slack)

ball = ball_pair_regression(seed=0)
print("dominance:", ball.dominance_holds, "reversed measures:", ball.reversed_measures)
