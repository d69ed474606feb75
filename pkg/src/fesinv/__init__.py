"""Approximate fixed-energy inverse scattering for spherically symmetric potentials.

Phase shifts plus the known outer part of a potential are turned into
boundary data at a split radius ``a``; the unknown inner part on ``[0, a]``
is then recovered from a moment problem with Backus-Gilbert averaging
kernels. A forward partial-wave solver generates synthetic data and acts as
the reference against which reconstructions are scored.
"""

from .errors import (
    FesinvError,
    GridTooCoarse,
    InconsistencyError,
    InvalidArgument,
    LinearSolveError,
    NoConvergence,
)
from .numerics import RadialGrid, SolveOptions, integrate, make_grid, solve_constrained_min
from .specfun import FreeSolutionPair, jost_f0, regular_phi0, riccati_uv, riccati_uv_all, wronskian_F0
from .greens import g_kernel, xi_kernel, xi_kernel_dr
from .forward import (
    ForwardOptions,
    PartialWave,
    PhaseShiftSet,
    Potential,
    phase_shifts,
    s_matrix_checks,
    solve_partial_wave,
)
from .dataprep import (
    BoundaryData,
    InteriorBasisInput,
    TailSolution,
    boundary_data,
    interior_basis,
    psi0l,
    solve_tail_volterra,
)
from .inversion import (
    MomentSystem,
    Reconstruction,
    backus_gilbert_point,
    build_moment_system,
    kernel_profile,
    reconstruct,
)

__version__ = "0.1.0"
