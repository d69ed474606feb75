"""Radial Green functions of ``y'' + k^2 y - l(l+1) y / r^2 = -delta(r - rho)``.

Both kernels are evaluated from real Riccati-Bessel products. Expanding the
complex definitions,

    xi_l(r, rho) = [u_l(k rho) v_l(kr) - v_l(k rho) u_l(kr)] / k,  rho >= r
    g_l(r, rho)  = (i/k) u_l(k r_<) [u_l(k r_>) + i v_l(k r_>)],

which avoids the ``e^{i l pi/2} k^l`` prefactors that cancel analytically.
"""

import numpy as np

from .specfun import riccati_uv_all, _check_k


def _pairs(l, k, r, rho):
    _check_k(k)
    r, rho = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(rho, dtype=float))
    u, v, up, vp = riccati_uv_all(l, k * np.stack([r, rho]))
    return r, rho, u[l], v[l], up[l], vp[l]


def xi_kernel(l, k, r, rho):
    """Volterra kernel: zero for ``rho < r``, real otherwise.

    The diagonal ``rho == r`` belongs to the nonzero branch, where the
    antisymmetric combination vanishes.
    """
    r, rho, u, v, _, _ = _pairs(l, k, r, rho)
    val = (u[1] * v[0] - v[1] * u[0]) / k
    return np.where(rho >= r, val, 0.0)[()]


def xi_kernel_unrestricted(l, k, r, rho):
    """The ``rho >= r`` expression of :func:`xi_kernel` without the cut-off."""
    _, _, u, v, _, _ = _pairs(l, k, r, rho)
    return ((u[1] * v[0] - v[1] * u[0]) / k)[()]


def xi_kernel_dr(l, k, r, rho):
    """``d xi_l / dr`` on the causal side ``r <= rho`` (zero for ``rho < r``).

    At ``rho = r`` this is the one-sided limit from below, equal to 1 by
    the Wronskian; the derivative therefore jumps by ``-1`` across the
    diagonal.
    """
    r, rho, u, v, up, vp = _pairs(l, k, r, rho)
    val = u[1] * vp[0] - v[1] * up[0]
    return np.where(rho >= r, val, 0.0)[()]


def g_kernel(l, k, r, rho):
    """Outgoing Green function, symmetric in ``(r, rho)``."""
    _check_k(k)
    r, rho = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(rho, dtype=float))
    lo, hi = np.minimum(r, rho), np.maximum(r, rho)
    u, v, _, _ = riccati_uv_all(l, k * np.stack([lo, hi]))
    return ((1j / k) * u[l][0] * (u[l][1] + 1j * v[l][1]))[()]


def g_kernel_dr(l, k, r, rho):
    """``d g_l / dr``; at ``r == rho`` the ``r > rho`` side is returned."""
    _check_k(k)
    r, rho = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(rho, dtype=float))
    u, v, up, vp = riccati_uv_all(l, k * np.stack([r, rho]))
    upr, vpr = up[l][0], vp[l][0]
    urho, vrho = u[l][1], v[l][1]
    outer = 1j * urho * (upr + 1j * vpr)
    inner = 1j * upr * (urho + 1j * vrho)
    return np.where(r >= rho, outer, inner)[()]
