"""Riccati-Bessel functions and the free radial solutions built from them.

Conventions::

    u_l(x) = x j_l(x)        ~ sin(x - l pi/2),      x -> inf
    v_l(x) = x n_l(x)        ~ -cos(x - l pi/2),     x -> inf

so that ``u_l v_l' - v_l u_l' = 1`` for every ``l``.

The irregular function ``v_l`` is generated by upward recurrence, which is
stable for it at every ``x``. The regular function ``u_l`` is the minimal
solution of the same recurrence for ``l > x``; its ratios ``u_l / u_{l-1}``
come from a backward continued fraction and the values themselves from the
Wronskian, so no normalization against ``sin x`` is needed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

L_CAP = 60
X_SERIES = 1e-3
X_MAX = 1e4


@dataclass(frozen=True)
class FreeSolutionPair:
    """``u_l``, ``v_l`` and their ``x``-derivatives at argument ``x``."""

    l: int
    x: object
    u: object
    v: object
    u_prime: object
    v_prime: object

    @property
    def wronskian(self):
        return self.u * self.v_prime - self.v * self.u_prime


def _check_args(lmax, x, l_cap):
    if int(lmax) != lmax or lmax < 0:
        raise InvalidArgument(f"angular momentum must be a nonnegative integer, got {lmax}")
    if lmax > l_cap:
        raise InvalidArgument(f"l too large: {lmax} > cap {l_cap}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0) or np.any(x > X_MAX):
        raise InvalidArgument(f"x out of range: need 0 < x <= {X_MAX:g}")
    return int(lmax), x


def _double_factorial_odd(l):
    # (2l+1)!! and (2l-1)!!, with (-1)!! = 1
    hi = np.prod(np.arange(1, 2 * l + 2, 2, dtype=float))
    return hi, hi / (2 * l + 1)


def _series_all(lmax, x):
    # two-term expansions about the origin: u ~ x^{l+1}/(2l+1)!!, v ~ -(2l-1)!!/x^l
    u = np.empty((lmax + 1,) + x.shape)
    up = np.empty_like(u)
    v = np.empty_like(u)
    vp = np.empty_like(u)
    x2 = x * x
    for l in range(lmax + 1):
        dfh, dfl = _double_factorial_odd(l)
        lead = x ** (l + 1) / dfh
        u[l] = lead * (1.0 - x2 / (2 * (2 * l + 3)))
        up[l] = lead / x * ((l + 1) - (l + 3) * x2 / (2 * (2 * l + 3)))
        if l == 0:
            v[l] = -np.cos(x)
            vp[l] = np.sin(x)
        elif l == 1:
            # exact: v_1 = -cos x / x - sin x
            v[l] = -np.cos(x) / x - np.sin(x)
            vp[l] = np.sin(x) / x + np.cos(x) / x2 - np.cos(x)
        else:
            lead_v = -dfl / x**l
            v[l] = lead_v * (1.0 + x2 / (2 * (2 * l - 1)))
            vp[l] = lead_v / x * (-l + (2 - l) * x2 / (2 * (2 * l - 1)))
    u[0], up[0] = np.sin(x), np.cos(x)
    return u, v, up, vp


def _recurrence_all(lmax, x):
    n = np.arange(lmax + 1).reshape((-1,) + (1,) * x.ndim)
    v = np.empty((lmax + 1,) + x.shape)
    v[0] = -np.cos(x)
    if lmax >= 1:
        v[1] = -np.cos(x) / x - np.sin(x)
    for l in range(1, lmax):
        v[l + 1] = (2 * l + 1) / x * v[l] - v[l - 1]
    vp = np.empty_like(v)
    vp[0] = np.sin(x)
    if lmax >= 1:
        vp[1:] = v[:-1] - n[1:] / x * v[1:]

    # backward continued fraction for ratio[l] = u_l / u_{l-1}
    xmax = float(np.max(x))
    top = int(max(lmax, xmax) + 15.0 * np.cbrt(max(lmax, xmax)) + 40)
    ratio = np.zeros((lmax + 2,) + x.shape)
    r = np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        for m in range(top, 0, -1):
            r = 1.0 / ((2 * m + 1) / x - r)
            if m <= lmax + 1:
                ratio[m] = r

    u = np.empty_like(v)
    up = np.empty_like(v)
    u[0] = np.sin(x)
    up[0] = np.cos(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for l in range(1, lmax + 1):
            # log-derivative u_l'/u_l = 1/ratio_l - l/x; W = u v' - v u' = 1
            inv = 1.0 / ratio[l]
            u[l] = 1.0 / (vp[l] - v[l] * (inv - l / x))
            up[l] = u[l - 1] - l / x * u[l]
    return u, v, up, vp


def riccati_uv_all(lmax, x, l_cap=L_CAP):
    """``u_l, v_l, u_l', v_l'`` for ``l = 0..lmax`` at ``x`` (scalar or array).

    Returns four arrays of shape ``(lmax + 1,) + shape(x)``.
    """
    lmax, x = _check_args(lmax, x, l_cap)
    small = x < X_SERIES
    if not np.any(small):
        out = _recurrence_all(lmax, x)
    elif np.all(small):
        out = _series_all(lmax, x)
    else:
        rec = _recurrence_all(lmax, np.where(small, 1.0, x))
        ser = _series_all(lmax, np.where(small, x, X_SERIES))
        out = tuple(np.where(small, s, r) for s, r in zip(ser, rec))
    for arr in out:
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument(f"x out of range: Riccati-Bessel values overflow for l <= {lmax}")
    return out


def riccati_uv(l, x, l_cap=L_CAP):
    """Riccati-Bessel pair ``u_l(x), v_l(x)`` with derivatives.

    Examples
    --------
    >>> p = riccati_uv(0, np.pi / 2)
    >>> round(float(p.u), 12), round(float(p.v), 12)
    (1.0, -0.0)
    """
    u, v, up, vp = riccati_uv_all(l, x, l_cap)
    return FreeSolutionPair(int(l), np.asarray(x, dtype=float)[()], u[l][()], v[l][()], up[l][()], vp[l][()])


def regular_phi0(l, k, r):
    """Free regular solution ``u_l(kr) / k^(l+1)``, ``~ r^(l+1)/(2l+1)!!`` at the origin."""
    _check_k(k)
    p = riccati_uv(l, k * np.asarray(r, dtype=float))
    return p.u / k ** (l + 1)


def regular_phi0_dr(l, k, r):
    """Radial derivative of :func:`regular_phi0`."""
    _check_k(k)
    p = riccati_uv(l, k * np.asarray(r, dtype=float))
    return p.u_prime / k**l


def jost_f0(l, k, r):
    """Free Jost solution ``i e^{i l pi/2} (u_l + i v_l)(kr)`` and its ``r``-derivative.

    Behaves as ``exp(ikr)`` for ``kr >> l``.
    """
    _check_k(k)
    p = riccati_uv(l, k * np.asarray(r, dtype=float))
    phase = 1j * np.exp(0.5j * np.pi * l)
    return phase * (p.u + 1j * p.v), phase * k * (p.u_prime + 1j * p.v_prime)


def wronskian_F0(l, k):
    """Closed-form Wronskian ``W[f_0l, phi_0l] = e^{i l pi/2} / k^l``."""
    _check_k(k)
    return np.exp(0.5j * np.pi * l) / k**l


def _check_k(k):
    if not np.isfinite(k) or k <= 0:
        raise InvalidArgument(f"wave number must be positive, got {k}")
