"""Forward partial-wave solver.

The radial equation is

    psi'' + k^2 psi - l(l+1) psi / r^2 - q(r) psi = 0,

so an attractive well has ``q < 0``. The regular solution is integrated
outward from a series start near the origin, matched to the free pair
``u_l, v_l`` beyond the support radius, and rescaled to the physical
normalization ``psi_l = e^{i delta} (cos delta u_l - sin delta v_l)``.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.integrate import solve_ivp

from .errors import GridTooCoarse, InconsistencyError, InvalidArgument
from .numerics import RadialGrid, composite_gauss, make_grid
from .specfun import riccati_uv_all, _check_k

KINDS = ("square-well", "gaussian", "piecewise-linear-samples")


@dataclass(frozen=True)
class Potential:
    """Spherically symmetric, compactly supported potential ``q(r)``.

    ``square-well``: ``q = -depth`` on ``[0, R]``.
    ``gaussian``: ``q = -depth * exp(-(r / width)^2)`` on ``[0, R]``.
    ``piecewise-linear-samples``: linear interpolation of ``(table_r, table_q)``,
    zero outside the table and beyond ``R``.

    ``window`` restricts ``q`` further to ``lo <= r <= hi``; it is how the
    known tail (``r >= a``) and the interior part (``r <= a``) are carved out.
    """

    kind: str
    support_radius: float
    split_radius: float = None
    depth: float = 0.0
    width: float = 1.0
    table_r: tuple = ()
    table_q: tuple = ()
    window: tuple = (0.0, math.inf)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown potential kind {self.kind!r}; choose from {KINDS}")
        if not self.support_radius > 0:
            raise InvalidArgument("support radius must be positive")
        if self.split_radius is None:
            object.__setattr__(self, "split_radius", float(self.support_radius))
        if not 0 < self.split_radius <= self.support_radius:
            raise InvalidArgument("need 0 < a <= R for the split radius")
        if self.kind == "gaussian" and not self.width > 0:
            raise InvalidArgument("gaussian width must be positive")
        if self.kind == "piecewise-linear-samples":
            tr = np.asarray(self.table_r, dtype=float)
            if tr.size < 2 or tr.size != len(self.table_q) or np.any(np.diff(tr) <= 0):
                raise InvalidArgument("sample table needs >= 2 strictly increasing radii with matching values")
            object.__setattr__(self, "table_r", tuple(float(t) for t in self.table_r))
            object.__setattr__(self, "table_q", tuple(float(t) for t in self.table_q))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "square-well":
            q = np.full(r.shape, -float(self.depth))
        elif self.kind == "gaussian":
            q = -self.depth * np.exp(-((r / self.width) ** 2))
        else:
            q = np.interp(r, self.table_r, self.table_q, left=0.0, right=0.0)
        lo, hi = self.window
        inside = (r <= self.support_radius) & (r >= lo) & (r <= hi)
        return np.where(inside, q, 0.0)[()]

    @property
    def is_zero(self):
        if self.kind == "piecewise-linear-samples":
            lo, hi = self.window
            tr, tq = np.asarray(self.table_r), np.asarray(self.table_q)
            # zero on the window iff the interpolant vanishes at every node and window end inside it
            probe = np.concatenate((tr, [lo, min(hi, self.support_radius)]))
            probe = probe[(probe >= lo) & (probe <= min(hi, self.support_radius))]
            return bool(np.all(np.interp(probe, tr, tq, left=0.0, right=0.0) == 0.0))
        return self.depth == 0.0 or self.window[0] >= min(self.window[1], self.support_radius)

    @property
    def breakpoints(self):
        """Radii in ``(0, R]`` where ``q`` or its derivative may jump."""
        pts = {float(self.support_radius)}
        lo, hi = self.window
        pts.update(p for p in (lo, hi) if 0 < p < self.support_radius)
        if self.kind == "piecewise-linear-samples":
            pts.update(t for t in self.table_r if 0 < t < self.support_radius)
        return tuple(sorted(pts))

    def tail(self):
        """The known part ``r >= a``."""
        return replace(self, window=(float(self.split_radius), self.window[1]))

    def interior(self):
        """The part ``r <= a`` that the inversion reconstructs."""
        return replace(self, window=(self.window[0], float(self.split_radius)))

    def scaled(self, factor):
        if self.kind == "piecewise-linear-samples":
            return replace(self, table_q=tuple(factor * t for t in self.table_q))
        return replace(self, depth=factor * self.depth)

    def to_dict(self):
        d = {"kind": self.kind, "R": float(self.support_radius), "a": float(self.split_radius)}
        if self.kind == "piecewise-linear-samples":
            d["table_r"] = list(self.table_r)
            d["table_q"] = list(self.table_q)
        else:
            d["depth"] = float(self.depth)
            if self.kind == "gaussian":
                d["width"] = float(self.width)
        return d

    @classmethod
    def from_dict(cls, d, a=None):
        try:
            kind = d["kind"]
            R = float(d["R"])
            a = float(d.get("a", R) if a is None else a)
            if kind == "piecewise-linear-samples":
                return cls(kind, R, a, table_r=tuple(d["table_r"]), table_q=tuple(d["table_q"]))
            return cls(kind, R, a, depth=float(d.get("depth", 0.0)), width=float(d.get("width", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"bad potential description {d!r}: {exc}") from exc


def zero_potential(R=1.0, a=None):
    return Potential("square-well", R, a, depth=0.0)


@dataclass(frozen=True)
class ForwardOptions:
    """Grid and integrator settings for :func:`solve_partial_wave`.

    ``n`` Simpson nodes sample ``psi`` on ``[0, R]``.
    """

    n: int = 401
    rtol: float = 1e-12
    match_tol: float = 1e-8


@dataclass(frozen=True)
class PhaseShiftSet:
    k: float
    delta: np.ndarray

    @property
    def L_max(self):
        return self.delta.size - 1


@dataclass(frozen=True)
class PartialWave:
    """Physical partial wave on ``[0, R]`` and its scattering data."""

    l: int
    k: float
    grid: RadialGrid
    psi: np.ndarray
    psi_a: complex
    dpsi_a: complex
    delta: float
    match_spread: float
    evaluate: object = field(repr=False, compare=False)

    @property
    def S(self):
        return np.exp(2j * self.delta)

    @property
    def A_l(self):
        return 4 * np.pi / self.k * np.exp(1j * self.delta) * np.sin(self.delta)


def wrap_phase(delta):
    """Map a phase into the principal interval ``(-pi/2, pi/2]``.

    Values already inside are returned bit-for-bit, so tiny high-``l``
    phase shifts keep their relative precision.
    """
    d = np.asarray(delta, dtype=float)
    d = d - np.pi * np.round(d / np.pi)
    return np.where(d <= -0.5 * np.pi, d + np.pi, d)[()]


def phase_from_coefficients(c1, c2):
    """``delta`` with ``(c1, c2) ~ (cos delta, -sin delta)`` in the principal branch."""
    c1, c2 = np.asarray(c1, dtype=float), np.asarray(c2, dtype=float)
    with np.errstate(divide="ignore"):
        d = np.where(c1 != 0, np.arctan(-c2 / np.where(c1 != 0, c1, 1.0)), 0.5 * np.pi)
    return wrap_phase(d)


def match_coefficients(l, k, r, y, dy):
    """Coefficients with ``y = c1 u_l(kr) + c2 v_l(kr)`` (uses ``W[u, v] = 1``)."""
    u, v, up, vp = (a[l] for a in riccati_uv_all(l, k * np.asarray(r, dtype=float)))
    c1 = y * vp - dy / k * v
    c2 = dy / k * u - y * up
    return c1, c2


def _integrate_regular(q, l, k, r_end, rtol):
    # series start y ~ r^{l+1}(1 + (q0 - k^2) r^2 / (2(2l+3))), rescaled to y(r0) = 1
    r0 = 1e-4 * min(1.0, 1.0 / k)
    r0 = max(r0, r_end * 10.0 ** (-200.0 / (l + 1)))
    stops = [b for b in q.breakpoints if r0 < b < r_end] + [r_end]
    c = (float(q(r0)) - k * k) / (2 * (2 * l + 3))
    y0 = 1.0 + c * r0 * r0
    dy0 = ((l + 1) + (l + 3) * c * r0 * r0) / r0
    state = np.array([y0, dy0])
    cent = l * (l + 1)

    def rhs(r, s):
        return [s[1], (cent / (r * r) + float(q(r)) - k * k) * s[0]]

    pieces = []
    start = r0
    for stop in stops:
        sol = solve_ivp(rhs, (start, stop), state, method="DOP853", rtol=rtol, atol=1e-300,
                        dense_output=True)
        if not sol.success:
            raise GridTooCoarse(f"radial integration failed for l={l}: {sol.message}")
        pieces.append((start, stop, sol.sol))
        state = sol.y[:, -1]
        start = stop

    def dense(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros((2, r.size))
        for lo, hi, f in pieces:
            sel = (r >= lo) & (r <= hi)
            if np.any(sel):
                out[:, sel] = f(r[sel])
        # below the start point the series itself is used
        small = r < r0
        if np.any(small):
            rs = r[small]
            out[0, small] = (rs / r0) ** (l + 1) * (1 + c * rs * rs)
            out[1, small] = (rs / r0) ** l * ((l + 1) + (l + 3) * c * rs * rs) / r0
        return out

    return dense


def solve_partial_wave(q, l, k, opts=None):
    """Physical partial wave ``psi_l`` for potential ``q`` at wave number ``k``.

    The phase shift is extracted at ``R`` and at ``R + pi/(4k)`` and the two
    values are averaged; if they disagree by more than ``opts.match_tol``
    the integration is not trustworthy and :class:`GridTooCoarse` is raised.
    """
    opts = ForwardOptions() if opts is None else opts
    _check_k(k)
    if int(l) != l or l < 0:
        raise InvalidArgument(f"angular momentum must be a nonnegative integer, got {l}")
    l = int(l)
    R = float(q.support_radius)
    a = float(q.split_radius)
    grid = make_grid(0.0, R, opts.n, "uniform-simpson")
    if grid.step > 2 * np.pi / (20 * k):
        raise GridTooCoarse(f"grid step {grid.step:.3g} exceeds 2pi/(20k) = {2 * np.pi / (20 * k):.3g}")

    if q.is_zero:
        def evaluate(r):
            r = np.asarray(r, dtype=float)
            rr = np.where(r > 0, r, 1.0)
            u, _, up, _ = riccati_uv_all(l, k * rr)
            return np.where(r > 0, u[l], 0.0)[()], (np.where(r > 0, k * up[l], k if l == 0 else 0.0) + 0j)[()]

        psi, _ = evaluate(grid.points)
        psi_a, dpsi_a = evaluate(a)
        return PartialWave(l, k, grid, psi.astype(complex), complex(psi_a), complex(dpsi_a), 0.0, 0.0, evaluate)

    r_match = np.array([R, R + 0.25 * np.pi / k])
    dense = _integrate_regular(q, l, k, r_match[-1], opts.rtol)
    y, dy = dense(r_match)
    c1, c2 = match_coefficients(l, k, r_match, y, dy)
    if np.any(np.hypot(c1, c2) == 0):
        raise InconsistencyError("match degenerate: c1 = c2 = 0")
    deltas = phase_from_coefficients(c1, c2)
    spread = float(abs(wrap_phase(deltas[1] - deltas[0])))
    if spread > opts.match_tol:
        raise GridTooCoarse(f"phase shifts at the two matching radii differ by {spread:.2e}")
    delta = float(wrap_phase(deltas[0] + 0.5 * wrap_phase(deltas[1] - deltas[0])))

    # psi = N y with N chosen so that psi ~ e^{i delta}(cos delta u - sin delta v)
    cd, sd = math.cos(delta), math.sin(delta)
    norm = np.exp(1j * delta) * (c1[0] * cd - c2[0] * sd) / (c1[0] ** 2 + c2[0] ** 2)

    def evaluate(r):
        yy = dense(r)
        shape = np.shape(r)
        return (norm * yy[0]).reshape(shape)[()], (norm * yy[1]).reshape(shape)[()]

    psi, _ = evaluate(grid.points)
    psi_a, dpsi_a = evaluate(a)
    return PartialWave(l, k, grid, np.asarray(psi), complex(psi_a), complex(dpsi_a), delta, spread, evaluate)


def phase_shifts(q, k, L_max, opts=None):
    """Phase shifts ``delta_0 .. delta_{L_max}`` in the principal branch."""
    if int(L_max) != L_max or L_max < 0:
        raise InvalidArgument(f"L_max must be a nonnegative integer, got {L_max}")
    delta = np.array([solve_partial_wave(q, l, k, opts).delta for l in range(int(L_max) + 1)])
    return PhaseShiftSet(float(k), delta)


def s_matrix_checks(pw, q, tol=1e-6, n_per=48, raise_on_failure=True):
    """Cross-check the matched phase shift against the integral route.

    ``S_l = 1 + (2/ik) int u_l q psi_l`` and ``A_l = -(4pi/k^2) int u_l q psi_l``
    are evaluated by composite Gauss-Legendre quadrature over the pieces of
    ``q``; the report compares them with ``e^{2i delta}`` and
    ``(4pi/k) e^{i delta} sin delta`` and checks ``S = 1 - k A / (2 pi i)``
    and ``|S| = 1``.
    """
    k, l = pw.k, pw.l
    breaks = [0.0, *q.breakpoints]
    rho, w = composite_gauss(breaks, n_per)
    psi, _ = pw.evaluate(rho)
    u = riccati_uv_all(l, k * rho)[0][l]
    integral = np.sum(w * u * q(rho) * psi)
    S_int = 1 + 2 / (1j * k) * integral
    A_int = -4 * np.pi / k**2 * integral
    S_match = np.exp(2j * pw.delta)
    A_match = 4 * np.pi / k * np.exp(1j * pw.delta) * np.sin(pw.delta)
    delta_int = float(wrap_phase(0.5 * np.angle(S_int)))
    report = {
        "l": l,
        "S_integral": complex(S_int),
        "A_integral": complex(A_int),
        "S_vs_phase": float(abs(S_int - S_match)),
        "A_vs_phase": float(abs(A_int - A_match)),
        "S_vs_A": float(abs(S_int - (1 - k / (2j * np.pi) * A_int))),
        "unitarity": float(abs(abs(S_int) - 1)),
        "delta_routes": float(abs(wrap_phase(delta_int - pw.delta))),
    }
    report["max_discrepancy"] = max(v for key, v in report.items() if key not in ("l", "S_integral", "A_integral"))
    if raise_on_failure and report["max_discrepancy"] > tol:
        raise InconsistencyError(f"S-matrix identities violated for l={l}: {report}")
    return report
