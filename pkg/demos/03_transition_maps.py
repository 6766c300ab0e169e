"""
Transition maps theta_bar and theta_n
=====================================

theta_bar is exactly 0 below 4 eps and exactly 1 above 1 - 4 eps. Its
Gaussian smoothings theta_n are entire functions whose values on the circle
|z| = eps fall below eps / 2^(n+2) once kappa is large enough.
"""
# %%
import numpy as np

from lipsmooth import build_alpha, build_theta_bar, select_kappa
from lipsmooth.mollifiers import complex_circle, decay_envelope

eps = 0.05
tb = build_theta_bar(eps)
print("certificate margins:")
for key, margin in tb.certificate.items():
    print(f"  {key:16s} {margin:.3e}")

# %%
z = complex_circle(eps)
for n in range(1, 5):
    th = select_kappa(tb, n)
    print(f"n={n}  kappa={th.kappa:9.1f}  max|theta_n(z)| = {np.max(np.abs(th.complex_eval(z))):.2e}"
          f"  analytic envelope {decay_envelope(eps, th.kappa):.2e}  target {eps / 2 ** (n + 2):.2e}")

# %%
# alpha flattens negative values and shifts positive ones by about 2 eps
alpha = build_alpha(eps)
t = np.array([-1.0, 0.0, eps, 0.5, 1.0])
print("alpha(t)  :", np.round(alpha(t), 6))
print("alpha'(t) :", np.round(alpha.derivative(t), 6))
