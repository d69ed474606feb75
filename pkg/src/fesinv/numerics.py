"""Radial grids, quadrature and the regularized constrained least-norm solve."""

from dataclasses import dataclass
import warnings

import numpy as np
from numpy.polynomial.legendre import leggauss
import scipy.linalg

from .errors import InvalidArgument, LinearSolveError

RULES = ("uniform-simpson", "gauss-legendre")


@dataclass(frozen=True)
class RadialGrid:
    """Quadrature nodes and weights on ``interval = (r_lo, r_hi)``."""

    points: np.ndarray
    weights: np.ndarray
    interval: tuple
    rule: str = "uniform-simpson"

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.points.size

    @property
    def step(self):
        """Largest gap between neighbouring nodes (including the end gaps)."""
        lo, hi = self.interval
        edges = np.concatenate(([lo], self.points, [hi]))
        return float(np.max(np.diff(edges)))


@dataclass(frozen=True)
class SolveOptions:
    """Options for :func:`solve_constrained_min`.

    ``ridge`` is relative to ``trace(B) / dim``; a condition number above
    ``max_condition_warn`` triggers a ``RuntimeWarning``.
    """

    ridge: float = 1e-10
    max_condition_warn: float = 1e13

    def __post_init__(self):
        if not self.ridge >= 0:
            raise InvalidArgument(f"ridge must be nonnegative, got {self.ridge}")


def simpson_weights(n, h):
    """Composite Simpson weights for ``n`` (odd) equally spaced nodes."""
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def make_grid(r_lo, r_hi, n, rule="uniform-simpson"):
    """Build a :class:`RadialGrid` on ``[r_lo, r_hi]``.

    ``uniform-simpson`` places ``n`` (odd) equally spaced nodes including
    both ends; ``gauss-legendre`` uses ``n`` interior Gauss nodes.
    """
    if not (np.isfinite(r_lo) and np.isfinite(r_hi)) or not r_hi > r_lo >= 0:
        raise InvalidArgument(f"invalid bounds ({r_lo}, {r_hi}): need r_hi > r_lo >= 0")
    n_min = 2 if rule == "gauss-legendre" else 3
    if int(n) != n or n < n_min:
        raise InvalidArgument(f"invalid node count {n}: need an integer n >= {n_min}")
    n = int(n)
    r_lo, r_hi = float(r_lo), float(r_hi)
    if rule == "uniform-simpson":
        if n % 2 == 0:
            raise InvalidArgument(f"invalid node count {n}: Simpson's rule needs odd n")
        points = np.linspace(r_lo, r_hi, n)
        weights = simpson_weights(n, (r_hi - r_lo) / (n - 1))
    elif rule == "gauss-legendre":
        x, w = leggauss(n)
        half = 0.5 * (r_hi - r_lo)
        points = r_lo + half * (x + 1.0)
        weights = half * w
    else:
        raise InvalidArgument(f"unknown quadrature rule {rule!r}; choose from {RULES}")
    return RadialGrid(points, weights, (r_lo, r_hi), rule)


def composite_gauss(breaks, n_per=32):
    """Gauss-Legendre nodes and weights on each panel between sorted ``breaks``."""
    breaks = np.unique(np.asarray(breaks, dtype=float))
    x, w = leggauss(n_per)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    points = (lo + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return points, weights


def integrate(grid, samples):
    """Weighted sum of ``samples`` over ``grid`` (complex-safe)."""
    samples = np.asarray(samples)
    if samples.shape[-1] != grid.points.size:
        raise InvalidArgument(
            f"length mismatch: {samples.shape[-1]} samples for {grid.points.size} nodes"
        )
    return samples @ grid.weights


def _segment_weights(m, h):
    # weights for integrating over m equal intervals (m + 1 nodes), 4th order when m >= 2
    if m == 0:
        return np.zeros(1)
    if m == 1:
        return np.array([0.5, 0.5]) * h
    if m % 2 == 0:
        return simpson_weights(m + 1, h)
    w = np.zeros(m + 1)
    w[:4] = np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    if m > 3:
        w[3:] += simpson_weights(m - 2, h)
    return w


def tail_weight_matrix(n, h):
    """Row ``i`` integrates from node ``i`` to the last node of a uniform grid.

    The matrix is upper triangular; every row with at least two intervals
    uses a fourth-order rule (Simpson, with a 3/8 panel when the interval
    count is odd).
    """
    W = np.zeros((n, n))
    for i in range(n):
        W[i, i:] = _segment_weights(n - 1 - i, h)
    return W


def solve_constrained_min(B, c, opts=None, return_info=False):
    """Minimize ``nu @ B @ nu`` subject to ``c @ nu = 1``.

    The Lagrange conditions give ``nu = Bt^{-1} c / (c @ Bt^{-1} c)`` with
    ``Bt = B + ridge * trace(B) / dim * I``. ``Bt`` is factorized by
    Cholesky; a failed factorization is reported, never regularized
    further behind the caller's back.

    With ``return_info=True`` a dict with ``condition`` (2-norm condition
    number of ``Bt``) and ``multiplier`` (the Lagrange multiplier
    ``1 / (c @ Bt^{-1} c)``) is returned alongside ``nu``.
    """
    opts = SolveOptions() if opts is None else opts
    B = np.asarray(B, dtype=float)
    c = np.asarray(c, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] != c.size:
        raise InvalidArgument(f"shape mismatch: B {B.shape}, c {c.shape}")
    if not np.any(c):
        raise InvalidArgument("constraint vector is zero")
    dim = c.size
    Bt = 0.5 * (B + B.T)
    Bt = Bt + opts.ridge * (np.trace(Bt) / dim) * np.eye(dim)
    try:
        factor = scipy.linalg.cho_factor(Bt, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise LinearSolveError(f"singular after ridge: {exc}") from exc
    eig = np.linalg.eigvalsh(Bt)
    condition = float(eig[-1] / eig[0]) if eig[0] > 0 else np.inf
    if condition > opts.max_condition_warn:
        warnings.warn(f"ill-conditioned system: cond = {condition:.3e}", RuntimeWarning, stacklevel=2)
    y = scipy.linalg.cho_solve(factor, c)
    denom = c @ y
    if not np.isfinite(denom) or abs(denom) <= np.finfo(float).tiny:
        raise LinearSolveError("zero constraint: c @ Bt^{-1} c vanishes")
    nu = y / denom
    # one refinement step pins the constraint to rounding level
    nu = nu / (c @ nu)
    if return_info:
        return nu, {"condition": condition, "multiplier": 1.0 / denom}
    return nu
