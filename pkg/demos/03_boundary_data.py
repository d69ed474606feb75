"""From phase shifts and a known tail to the boundary data at r = a.

The well below extends past the split radius a = 0.6, so the tail on
[0.6, 1] is known and the Volterra equation carries the phase-shift
information inward. The forward solver's own values at a are the check.
"""

import numpy as np

from fesinv import GridTooCoarse, Potential, make_grid, solve_partial_wave, solve_tail_volterra
from fesinv.dataprep import prepare

q = Potential("square-well", 1.0, split_radius=0.6, depth=1.0)
k = 1.0

waves = [solve_partial_wave(q, l, k) for l in range(9)]
delta = np.array([w.delta for w in waves])
for l, w in enumerate(waves):
    t = solve_tail_volterra(l, k, w.delta, q)
    print(f"l={l}: psi(a) = {t.psi_a:.6e}, forward {w.psi_a:.6e}, "
          f"{t.iterations} iterations, grid error estimate {t.error_estimate:.1e}")

grid = make_grid(0.0, 0.6, 100, "gauss-legendre")
tails, bases, bd = prepare(delta, k, q.tail(), grid)
print("|b_l|:", np.array2string(np.abs(bd.b), precision=3))

# a coarse tail grid is caught rather than silently used
try:
    solve_tail_volterra(8, k, delta[8], q, n=11)
except GridTooCoarse as exc:
    print("GridTooCoarse -", exc)
