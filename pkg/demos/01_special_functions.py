"""Riccati-Bessel functions and the free solutions built on them.

Run with ``python3 demos/01_special_functions.py``.
"""

import numpy as np

from fesinv import jost_f0, regular_phi0, riccati_uv, riccati_uv_all, wronskian_F0

# u_l and v_l for a few orders; the Wronskian u v' - v u' is 1 everywhere
x = np.array([0.01, 0.5, 2.0, 10.0, 100.0])
u, v, up, vp = riccati_uv_all(10, x)
print("x          ", x)
for l in (0, 1, 5, 10):
    print(f"u_{l:<2d}", np.array2string(u[l], precision=4))
    print(f"v_{l:<2d}", np.array2string(v[l], precision=4))
print("max |W - 1| over l <= 10:", np.max(np.abs(u * vp - v * up - 1)))

# near the origin u_l ~ x^{l+1} / (2l+1)!!
p = riccati_uv(3, 1e-4)
print("u_3(x)/x^4 at x=1e-4:", p.u / 1e-16, " 1/105 =", 1 / 105)

# far out the Jost solution approaches e^{ikr}, with a 1/r correction
for kr in (10.0, 50.0, 500.0):
    f, _ = jost_f0(2, 1.0, kr)
    print(f"kr = {kr:6.1f}: |f_02 - e^(ikr)| = {abs(f - np.exp(1j * kr)):.3e}")

# the Wronskian of f_0l and phi_0l is a constant
k = 2.0
for l in (0, 1, 2, 3):
    f, df = jost_f0(l, k, 1.7)
    h = 1e-6
    dphi = (regular_phi0(l, k, 1.7 + h) - regular_phi0(l, k, 1.7 - h)) / (2 * h)
    print(f"l={l}: W = {f * dphi - regular_phi0(l, k, 1.7) * df:.6f}, closed form {wronskian_F0(l, k):.6f}")
