"""Moment problem and Backus-Gilbert averaging kernels on ``[0, a]``.

With ``psi_l`` replaced by ``psi_l^(0)`` under the integral, the interior
potential satisfies the moment equations

    int_0^a q(rho) f_l(rho) drho = b_l,    f_l(rho) = g_l(a, rho) psi_l^(0)(rho).

For each evaluation radius ``r`` a kernel ``A(r, rho) = sum_j nu_j(r) f_j(rho)``
is chosen with unit integral and minimal spread
``int A^2 |r - rho|^gamma drho``; the estimate is ``q_L(r) = sum_j nu_j(r) b_j``.

Since ``q`` is real, every complex equation is split into its real and
imaginary parts. The rows are used at their natural scale: the relative
ridge then damps the tiny high-``l`` rows first, which is what keeps the
Born-type error in ``b_l`` from being amplified.
"""

from dataclasses import dataclass, replace
import warnings

import numpy as np

from .errors import InvalidArgument
from .greens import g_kernel
from .numerics import RadialGrid, solve_constrained_min

DEGENERATE_NORM = 1e-14


@dataclass(frozen=True)
class MomentSystem:
    """Sampled moment problem.

    ``f`` and ``b`` hold the complex basis and targets for ``l = 0..L``;
    ``rows``/``targets`` are the realified equations actually used,
    labelled by ``(l, "re" | "im")`` in ``labels``.
    """

    k: float
    a: float
    L: int
    grid: RadialGrid
    f: np.ndarray
    b: np.ndarray
    gamma: float
    rows: np.ndarray
    targets: np.ndarray
    labels: tuple

    def with_targets(self, b):
        """Same basis, new complex targets ``b_l``."""
        b = np.asarray(b, dtype=complex)
        if b.shape != self.b.shape:
            raise InvalidArgument(f"need {self.b.size} targets, got {b.size}")
        parts = {"re": b.real, "im": b.imag}
        t = np.array([parts[kind][l] for l, kind in self.labels])
        return replace(self, b=b, targets=t)

    def exact_moments(self, q):
        """``int_0^a q f_l drho`` by quadrature, with no wave-function approximation."""
        return (self.f * q(self.grid.points)) @ self.grid.weights


@dataclass(frozen=True)
class Reconstruction:
    r_points: np.ndarray
    q_L: np.ndarray
    nu: np.ndarray
    normalization_residual: np.ndarray
    spread: np.ndarray
    condition: np.ndarray


def _realify(f, b, w):
    rows, targets, labels = [], [], []
    for l in range(f.shape[0]):
        norm_l = np.sqrt(np.sum(w * np.abs(f[l]) ** 2))
        if not norm_l >= DEGENERATE_NORM:
            warnings.warn(f"basis function l={l} is numerically zero on [0, a]; dropped", RuntimeWarning,
                          stacklevel=3)
            continue
        for kind, row, t in (("re", f[l].real, b[l].real), ("im", f[l].imag, b[l].imag)):
            # a part that is zero to rounding carries no equation
            if np.sqrt(np.sum(w * row**2)) <= DEGENERATE_NORM * norm_l:
                continue
            rows.append(row)
            targets.append(t)
            labels.append((l, kind))
    if not rows:
        raise InvalidArgument("moment system has no usable rows")
    return np.array(rows), np.array(targets), tuple(labels)


def build_moment_system(bases, boundary, L, gamma=2.0, grid=None):
    """Assemble the moment problem for ``l = 0..L``.

    ``bases`` are the :class:`~fesinv.dataprep.InteriorBasisInput` objects;
    their common inner grid is used unless ``grid`` is given (it must then
    be the same grid).
    """
    if L > boundary.L_max or L >= len(bases):
        raise InvalidArgument(f"L = {L} exceeds the available data (L_max = {boundary.L_max})")
    if gamma <= 0:
        raise InvalidArgument("gamma must be positive")
    grid = bases[0].grid if grid is None else grid
    k, a = float(boundary.k), float(boundary.a)
    rho = grid.points
    if np.any(rho > a) or np.any(rho < 0):
        raise InvalidArgument("moment grid must lie inside [0, a]")
    f = np.empty((L + 1, rho.size), dtype=complex)
    for l in range(L + 1):
        if bases[l].psi0.shape != rho.shape:
            raise InvalidArgument("interior basis sampled on a different grid")
        f[l] = g_kernel(l, k, np.full(rho.shape, a), rho) * bases[l].psi0
    b = np.asarray(boundary.b[: L + 1], dtype=complex)
    rows, targets, labels = _realify(f, b, grid.weights)
    return MomentSystem(k, a, int(L), grid, f, b, float(gamma), rows, targets, labels)


def toy_system(basis, grid, targets=None, gamma=2.0):
    """Moment system from explicit real basis samples, for experiments and tests."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    b = np.zeros(basis.shape[0]) if targets is None else np.asarray(targets, dtype=float)
    rows, t, labels = _realify(basis.astype(complex), b.astype(complex), grid.weights)
    return MomentSystem(np.nan, grid.interval[1], basis.shape[0] - 1, grid, basis.astype(complex),
                        b.astype(complex), float(gamma), rows, t, labels)


def backus_gilbert_point(ms, r, opts=None):
    """Optimal averaging-kernel coefficients at radius ``r``.

    Returns ``(nu, diagnostics)``; ``nu`` is indexed like ``ms.rows``.
    """
    lo, hi = ms.grid.interval
    if not lo - 1e-12 <= r <= hi + 1e-12:
        raise InvalidArgument(f"r = {r} outside [{lo}, {hi}]")
    w = ms.grid.weights
    weight = w * np.abs(r - ms.grid.points) ** ms.gamma
    B = (ms.rows * weight) @ ms.rows.T
    c = ms.rows @ w
    nu, info = solve_constrained_min(B, c, opts, return_info=True)
    diag = {
        "normalization_residual": float(abs(c @ nu - 1.0)),
        "spread": float(nu @ B @ nu),
        "condition": info["condition"],
    }
    return nu, diag


def reconstruct(ms, r_points, opts=None):
    """``q_L(r) = sum_j nu_j(r) b_j`` at each of ``r_points``."""
    r_points = np.asarray(r_points, dtype=float)
    nus, res, spread, cond = [], [], [], []
    for r in r_points:
        nu, d = backus_gilbert_point(ms, r, opts)
        nus.append(nu)
        res.append(d["normalization_residual"])
        spread.append(d["spread"])
        cond.append(d["condition"])
    # one dot product per point, so each value is independent of the batch
    q_L = np.array([nu @ ms.targets for nu in nus])
    return Reconstruction(r_points, q_L, np.array(nus), np.array(res), np.array(spread), np.array(cond))


def kernel_profile(ms, r, nu):
    """Averaging kernel ``A(r, rho)`` on the moment grid (``r`` kept for the record)."""
    del r
    return np.asarray(nu) @ ms.rows


def relative_errors(rec, q_true_values, grid_weights=None):
    """Discrete L2 and max-norm relative errors of ``rec.q_L``."""
    q_true_values = np.asarray(q_true_values, dtype=float)
    diff = rec.q_L - q_true_values
    if grid_weights is None:
        l2 = np.linalg.norm(diff) / np.linalg.norm(q_true_values)
    else:
        l2 = np.sqrt(np.sum(grid_weights * diff**2) / np.sum(grid_weights * q_true_values**2))
    mx = np.max(np.abs(diff)) / np.max(np.abs(q_true_values))
    return float(l2), float(mx)
