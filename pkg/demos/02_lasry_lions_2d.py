"""
Lasry-Lions regularization of a 2-d cone
========================================

(f_lam)^mu with mu = lam / 2 is C^{1,1} with curvature bound 2 / lam, and the
value error stays below eps / 2. On a 2-d lattice the measured second
differences exceed 2 / lam near oblique ridges but stay inside the grid
tolerance 2 / lam * (1 + 10 h / lam) at h = lam / 10.
"""
# %%
import numpy as np

from lipsmooth import Box, lasry_lions, sample, select_lambda, second_difference_bound, sup_distance
from lipsmooth.corpus import corpus

eps = 0.05
p = select_lambda(eps, 1.0)
print(f"lam = {p.lam:.5f}, mu = {p.mu:.5f}, curvature bound 2/lam = {p.curvature_bound:.1f}")

# %%
# h = lam / 10 keeps the grid envelope faithful
box = Box.cube(-0.42, 0.42, 2)
for oracle in corpus(2)[:4]:
    f = sample(oracle, box, (253, 253))
    g = lasry_lions(f, p)
    curv = second_difference_bound(g.window(p.lam))
    print(f"{oracle.name:12s} sup error {sup_distance(f, g):.4f}   max second difference {curv:7.2f}")

# %%
# a minimum is a fixed point of both envelopes, so the apex stays at 0
cone = sample(corpus(2)[0], box, (253, 253))
print("apex before / after   :", cone.values[126, 126], lasry_lions(cone, p).values[126, 126])
