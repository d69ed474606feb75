"""How small errors in the phase shifts show up in the reconstruction.

The normalization of every kernel stays exact; the damage is in q_L.
"""

import numpy as np

from fesinv import Potential, build_moment_system, make_grid, phase_shifts, reconstruct
from fesinv.dataprep import prepare


def invert(delta, q, k=1.0, L=8):
    grid = make_grid(0.0, 1.0, 200, "gauss-legendre")
    _, bases, bd = prepare(delta, k, q.tail(), grid)
    return reconstruct(build_moment_system(bases, bd, L), np.linspace(0.0, 1.0, 51))


q = Potential("square-well", 1.0, 1.0, depth=-0.1)
delta = phase_shifts(q, 1.0, 8).delta
clean = invert(delta, q)
for noise in (1e-7, 1e-6, 1e-5, 1e-4):
    noisy_d = delta * (1 + noise * np.random.default_rng(0).standard_normal(delta.size))
    rec = invert(noisy_d, q)
    out = np.linalg.norm(rec.q_L - clean.q_L) / np.linalg.norm(clean.q_L)
    inp = np.linalg.norm(noisy_d - delta) / np.linalg.norm(delta)
    print(f"noise {noise:.0e}: relative change in q_L {out:.2e}, amplification {out / inp:6.1f}, "
          f"max normalization residual {rec.normalization_residual.max():.1e}")
