"""
Moreau envelopes on a grid: the Huber function
==============================================

The inf-convolution of |x| with |.|^2 / (2 lam) is the Huber function. The
separable lower-envelope kernel reproduces it at every node.
"""
# %%
import numpy as np

from lipsmooth import Box, GridFunction, moreau_inf, moreau_sup, sup_distance

x = np.linspace(-1, 1, 401)
f = GridFunction(Box(-1, 1), np.abs(x))
lam = 0.5

# %%
# the envelope lies below f and is quadratic within lam of the kink
f_lam = moreau_inf(f, lam)
huber = np.where(np.abs(x) <= lam, x * x / (2 * lam), np.abs(x) - lam / 2)
print("max |f_lam - huber|   :", np.max(np.abs(f_lam.values - huber)))
print("sup |f - f_lam|       :", sup_distance(f, f_lam), "(lam / 2 at the kink is 0.25)")

# %%
# the sup-envelope is the mirror image: it lifts f by at most mu/2 per unit slope^2
f_mu = moreau_sup(f, 0.25)
print("f^mu(0)               :", f_mu.values[200], "(expected 0.125)")
