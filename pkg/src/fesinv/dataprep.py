"""From phase shifts and the known tail to boundary data at ``r = a``.

Per partial wave:

1. ``psi_0l = e^{i delta}(cos delta u_l - sin delta v_l)`` is the free
   solution with the same asymptotics as the physical wave.
2. On ``[a, R]`` the physical wave solves the Volterra equation
   ``psi(r) = psi_0l(r) - int_r^R xi_l(r, rho) q(rho) psi(rho) drho``,
   solved by Picard iteration.
3. Inside, ``psi_l^(0)(r) = u_l(kr) - int_a^R g_l(r, rho) q psi drho`` and the
   moment targets are ``b_l = psi_l^(0)(a) - psi_l(a)`` and
   ``beta_l = psi_l^(0)'(a) - psi_l'(a)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, InvalidArgument, NoConvergence
from .greens import g_kernel
from .numerics import RadialGrid, make_grid, tail_weight_matrix
from .specfun import riccati_uv_all, _check_k


@dataclass(frozen=True)
class TailSolution:
    l: int
    k: float
    delta: float
    grid: RadialGrid
    psi: np.ndarray
    dpsi: np.ndarray
    psi0l: np.ndarray
    iterations: int
    residual: float
    error_estimate: float
    q: object = None

    @property
    def psi_a(self):
        return complex(self.psi[0])

    @property
    def dpsi_a(self):
        return complex(self.dpsi[0])


@dataclass(frozen=True)
class InteriorBasisInput:
    """``psi_l^(0)`` sampled on an inner grid, plus its value and slope at ``a``."""

    l: int
    k: float
    grid: RadialGrid
    psi0: np.ndarray
    psi0_a: complex
    dpsi0_a: complex


@dataclass(frozen=True)
class BoundaryData:
    """Arrays indexed by ``l``."""

    k: float
    a: float
    psi_a: np.ndarray
    dpsi_a: np.ndarray
    b: np.ndarray
    beta: np.ndarray

    @property
    def L_max(self):
        return self.b.size - 1


def psi0l(l, k, delta_l, r):
    """Free wave with the asymptotics of the physical wave; returns ``(value, d/dr)``."""
    _check_k(k)
    u, v, up, vp = (arr[l] for arr in riccati_uv_all(l, k * np.asarray(r, dtype=float)))
    ph = np.exp(1j * delta_l)
    c, s = np.cos(delta_l), np.sin(delta_l)
    return (ph * (c * u - s * v))[()], (ph * k * (c * up - s * vp))[()]


def _picard(K, Kd, psi0, dpsi0, tol, max_iter):
    psi = psi0.copy()
    history = []
    for it in range(1, max_iter + 1):
        new = psi0 - K @ psi
        change = np.max(np.abs(new - psi)) / max(np.max(np.abs(new)), np.finfo(float).tiny)
        history.append(change)
        psi = new
        if change <= tol:
            return psi, dpsi0 - Kd @ psi, it, change, history
    raise NoConvergence(
        f"Volterra iteration did not converge in {max_iter} iterations (residual {change:.3e})",
        residual=change,
        iterations=max_iter,
    )


def _tail_system(l, k, q, r):
    # xi_l(r_i, rho_j) = [u(k rho_j) v(k r_i) - v(k rho_j) u(k r_i)] / k taken without the
    # rho >= r cut-off; the weight matrix is already zero below the diagonal
    W = tail_weight_matrix(r.size, r[1] - r[0])
    u, v, up, vp = (arr[l] for arr in riccati_uv_all(l, k * r))
    wq = W * q(r)[None, :]
    K = wq * (np.outer(v, u) - np.outer(u, v)) / k
    Kd = wq * (np.outer(vp, u) - np.outer(up, v))
    return K, Kd


def solve_tail_volterra(l, k, delta_l, q, n=401, tol=1e-10, max_iter=200, grid_tol=1e-6):
    """Physical wave on ``[a, R]`` from its phase shift and the known tail of ``q``.

    ``q`` is only evaluated on ``[a, R]``. The same iteration is repeated on
    every other node; the Richardson estimate ``|fine - coarse| / 15`` of
    ``psi(a)`` and ``psi'(a)`` (relative to their magnitude) must stay below
    ``grid_tol`` or :class:`GridTooCoarse` is raised.
    """
    _check_k(k)
    a, R = float(q.split_radius), float(q.support_radius)
    if tol <= 0:
        raise InvalidArgument("tol must be positive")
    if a >= R:
        # empty tail: nothing to integrate
        grid = RadialGrid(np.array([a]), np.array([0.0]), (a, a))
        p, dp = psi0l(l, k, delta_l, np.array([a]))
        return TailSolution(l, k, delta_l, grid, p, dp, p.copy(), 1, 0.0, 0.0, q)
    if n < 5 or n % 2 == 0:
        raise InvalidArgument(f"tail grid needs an odd node count >= 5, got {n}")
    grid = make_grid(a, R, n, "uniform-simpson")
    if grid.step > 2 * np.pi / (20 * k):
        raise GridTooCoarse(f"tail grid step {grid.step:.3g} exceeds 2pi/(20k)")
    r = grid.points
    p0, dp0 = psi0l(l, k, delta_l, r)
    qtail = q.tail()
    if qtail.is_zero:
        return TailSolution(l, k, delta_l, grid, p0, dp0, p0.copy(), 1, 0.0, 0.0, q)

    K, Kd = _tail_system(l, k, qtail, r)
    psi, dpsi, its, resid, _ = _picard(K, Kd, p0, dp0, tol, max_iter)

    rc = r[::2]
    Kc, Kdc = _tail_system(l, k, qtail, rc)
    psic, dpsic, _, _, _ = _picard(Kc, Kdc, p0[::2], dp0[::2], tol, max_iter)
    scale = max(abs(psi[0]), abs(dpsi[0]) / k, np.finfo(float).tiny)
    est = max(abs(psi[0] - psic[0]), abs(dpsi[0] - dpsic[0]) / k) / 15.0 / scale
    if est > grid_tol:
        raise GridTooCoarse(f"tail grid with {n} nodes: estimated error {est:.2e} > {grid_tol:.0e}")
    return TailSolution(l, k, delta_l, grid, psi, dpsi, p0, its, float(resid), float(est), q)


def volterra_history(l, k, delta_l, q, n=401, iterations=30):
    """Relative sup-norm change of each Picard step, for convergence studies."""
    grid = make_grid(float(q.split_radius), float(q.support_radius), n, "uniform-simpson")
    p0, _ = psi0l(l, k, delta_l, grid.points)
    K, _ = _tail_system(l, k, q.tail(), grid.points)
    hist, psi = [], p0.copy()
    for _ in range(iterations):
        new = p0 - K @ psi
        hist.append(float(np.max(np.abs(new - psi)) / np.max(np.abs(new))))
        psi = new
    return np.array(hist)


def interior_basis(l, k, tail, grid_inner):
    """``psi_l^(0)`` on ``grid_inner`` (inside ``[0, a]``) by direct quadrature.

    Every inner radius lies below every tail node, so only the ``r < rho``
    branch of ``g_l`` enters.
    """
    a = float(tail.grid.interval[0])
    u, _, up, _ = riccati_uv_all(l, k * np.append(grid_inner.points, a))
    u_in, u_a, up_a = u[l][:-1], u[l][-1], up[l][-1]
    if tail.grid.points.size < 2 or tail.q is None or tail.q.tail().is_zero:
        return InteriorBasisInput(l, k, grid_inner, u_in.astype(complex), complex(u_a), complex(k * up_a))
    rho = tail.grid.points
    src = tail.grid.weights * tail.q.tail()(rho) * tail.psi
    G = g_kernel(l, k, grid_inner.points[:, None], rho[None, :])
    psi0 = u_in - G @ src
    # value and slope at a from the same integral; g_l(a, rho) uses r <= rho throughout
    Ga = g_kernel(l, k, np.full(rho.shape, a), rho)
    u_r, v_r, _, _ = riccati_uv_all(l, k * rho)
    dGa = 1j * up_a * (u_r[l] + 1j * v_r[l])
    return InteriorBasisInput(l, k, grid_inner, psi0, complex(u_a - Ga @ src), complex(k * up_a - dGa @ src))


def interior_factor(l, k, tail):
    """Scalar ``C`` with ``psi_l^(0)(r) = C u_l(kr)`` for ``r <= a``."""
    rho = tail.grid.points
    if rho.size < 2 or tail.q is None:
        return 1.0 + 0j
    u, v, _, _ = riccati_uv_all(l, k * rho)
    h = (1j / k) * (u[l] + 1j * v[l])
    return complex(1 - np.sum(tail.grid.weights * h * tail.q.tail()(rho) * tail.psi))


def boundary_data(tails, bases):
    """Assemble ``psi(a), psi'(a), b_l, beta_l`` for ``l = 0..L``."""
    if len(tails) != len(bases) or any(t.l != i or b.l != i for i, (t, b) in enumerate(zip(tails, bases))):
        raise InvalidArgument("index mismatch between tail solutions and interior bases")
    psi_a = np.array([t.psi_a for t in tails])
    dpsi_a = np.array([t.dpsi_a for t in tails])
    p0a = np.array([b.psi0_a for b in bases])
    dp0a = np.array([b.dpsi0_a for b in bases])
    b = -(psi_a - p0a)
    beta = -(dpsi_a - dp0a)
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(beta))):
        raise InvalidArgument("non-finite boundary data")
    a = float(tails[0].grid.interval[0]) if tails else float("nan")
    return BoundaryData(float(tails[0].k) if tails else float("nan"), a, psi_a, dpsi_a, b, beta)


def prepare(delta, k, q_tail, grid_inner, n_tail=401, tol=1e-10, max_iter=200, grid_tol=1e-6):
    """Run the whole data preparation for ``l = 0..len(delta)-1``.

    Returns ``(tails, bases, boundary)``.
    """
    tails = [solve_tail_volterra(l, k, float(d), q_tail, n_tail, tol, max_iter, grid_tol)
             for l, d in enumerate(delta)]
    bases = [interior_basis(t.l, k, t, grid_inner) for t in tails]
    return tails, bases, boundary_data(tails, bases)
