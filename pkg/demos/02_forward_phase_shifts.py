"""Phase shifts of a square well, and the cross-checks behind them."""

import math

import numpy as np

from fesinv import Potential, phase_shifts, s_matrix_checks, solve_partial_wave

well = Potential("square-well", support_radius=1.0, depth=1.0)
k = 1.0

ps = phase_shifts(well, k, 10)
for l, d in enumerate(ps.delta):
    print(f"delta_{l:<2d} = {d: .6e}")

# s-wave closed form for comparison
kap = math.sqrt(k * k + 1.0)
print("closed form delta_0:", -k + math.atan(k / kap * math.tan(kap)))

# S_l from the integral over the wave function must agree with e^{2 i delta}
for l in range(4):
    rep = s_matrix_checks(solve_partial_wave(well, l, k), well)
    print(f"l={l}: |S_int - e^(2i delta)| = {rep['S_vs_phase']:.1e}, ||S| - 1| = {rep['unitarity']:.1e}")

# phase shifts of a weak potential are linear in its strength
g = Potential("gaussian", 2.0, depth=1.0, width=0.6)
d1 = phase_shifts(g.scaled(1e-3), k, 3).delta
d2 = phase_shifts(g.scaled(2e-3), k, 3).delta
print("delta(2 eps) / delta(eps):", np.round(d2 / d1, 5))
