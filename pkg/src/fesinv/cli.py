"""Command-line front end: ``synth``, ``invert``, ``forward`` and ``check``.

Exit status: 0 on success, 1 for usage or configuration errors, 2 when a
numerical step fails (no convergence, unresolved grid, violated identity).
"""

import argparse
import csv
from dataclasses import dataclass, field, replace
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .dataprep import prepare, solve_tail_volterra
from .errors import FesinvError, GridTooCoarse, InvalidArgument
from .forward import ForwardOptions, Potential, phase_shifts, s_matrix_checks, solve_partial_wave
from .greens import g_kernel, g_kernel_dr, xi_kernel_dr
from .inversion import build_moment_system, reconstruct, relative_errors
from .numerics import SolveOptions, make_grid, simpson_weights
from .specfun import jost_f0, regular_phi0, regular_phi0_dr, riccati_uv_all, wronskian_F0

PHASE_FORMAT = "fesinv-phase-shifts/1"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    k: float = 1.0
    a: float = 1.0
    potential: dict = field(default_factory=lambda: {"kind": "square-well", "depth": 1.0, "R": 1.0})
    L_max: int = 12
    L_invert: int = 8
    gamma: float = 2.0
    n_forward: int = 401
    n_tail: int = 401
    n_inner: int = 51
    n_moment: int = 200
    volterra_tol: float = 1e-10
    grid_tol: float = 1e-6
    ridge: float = 1e-10
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.k > 0:
            raise InvalidArgument("k must be positive")
        if not 0 <= self.L_invert <= self.L_max:
            raise InvalidArgument("need 0 <= L_invert <= L_max")
        if not self.noise >= 0:
            raise InvalidArgument("noise must be nonnegative")
        if self.n_inner < 2:
            raise InvalidArgument("n_inner must be at least 2")
        self.make_potential()  # validates 0 < a <= R and the potential block

    def make_potential(self):
        return Potential.from_dict(self.potential, a=self.a)

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise InvalidArgument("config must be a JSON object")
        d = dict(d)
        flat = {}
        for section in ("grids", "tolerances"):
            sub = d.pop(section, {}) or {}
            if not isinstance(sub, dict):
                raise InvalidArgument(f"config section {section!r} must be an object")
            flat.update(sub)
        flat.update(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(flat) - known
        if unknown:
            raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
        types = {"L_max": int, "L_invert": int, "n_forward": int, "n_tail": int, "n_inner": int,
                 "n_moment": int, "seed": int, "potential": dict}
        try:
            kw = {key: types.get(key, float)(val) for key, val in flat.items()}
        except (TypeError, ValueError) as exc:
            raise InvalidArgument(f"bad config value: {exc}") from exc
        return cls(**kw)

    def to_dict(self):
        return {
            "k": self.k, "a": self.a, "potential": dict(self.potential),
            "L_max": self.L_max, "L_invert": self.L_invert, "gamma": self.gamma,
            "grids": {"n_forward": self.n_forward, "n_tail": self.n_tail,
                      "n_inner": self.n_inner, "n_moment": self.n_moment},
            "tolerances": {"volterra_tol": self.volterra_tol, "grid_tol": self.grid_tol, "ridge": self.ridge},
            "noise": self.noise, "seed": self.seed,
        }


def load_config(path=None):
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgument(f"cannot read config {path}: {exc}") from exc
    return RunConfig.from_dict(data)


def _cplx(z):
    return [float(np.real(z)), float(np.imag(z))]


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# -- synth -------------------------------------------------------------------


def synthesize(cfg):
    """Phase-shift document for ``cfg`` (optionally with relative Gaussian noise)."""
    q = cfg.make_potential()
    ps = phase_shifts(q, cfg.k, cfg.L_max, ForwardOptions(n=cfg.n_forward))
    delta = ps.delta.copy()
    if cfg.noise > 0:
        rng = np.random.default_rng(cfg.seed)
        delta = delta * (1.0 + cfg.noise * rng.standard_normal(delta.size))
    return {
        "format": PHASE_FORMAT,
        "k": float(cfg.k),
        "L_max": int(cfg.L_max),
        "delta": [float(d) for d in delta],
        "convention": "principal-branch",
        "potential": q.to_dict(),
        "noise": float(cfg.noise),
        "seed": int(cfg.seed),
    }


def read_phase_file(path):
    """Load and validate a phase-shift document."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgument(f"cannot read phase-shift file {path}: {exc}") from exc
    return validate_phase_doc(doc)


def validate_phase_doc(doc):
    if not isinstance(doc, dict):
        raise InvalidArgument("schema mismatch: phase-shift file must be a JSON object")
    for key in ("k", "L_max", "delta", "convention"):
        if key not in doc:
            raise InvalidArgument(f"schema mismatch: missing key {key!r}")
    delta = doc["delta"]
    if not isinstance(delta, list) or len(delta) != int(doc["L_max"]) + 1:
        raise InvalidArgument("schema mismatch: delta must list L_max + 1 values")
    if doc["convention"] != "principal-branch":
        raise InvalidArgument(f"schema mismatch: unsupported convention {doc['convention']!r}")
    try:
        [float(d) for d in delta]
        float(doc["k"])
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"schema mismatch: {exc}") from exc
    return doc


# -- invert ------------------------------------------------------------------


def _known_tail(doc, cfg):
    if doc.get("potential") is not None:
        q_file = Potential.from_dict(doc["potential"], a=cfg.a)
        q_cfg = cfg.make_potential()
        probe = np.linspace(cfg.a, max(q_file.support_radius, q_cfg.support_radius) * 1.1, 257)
        if not np.allclose(q_file.tail()(probe), q_cfg.tail()(probe), rtol=1e-12, atol=1e-14):
            raise InvalidArgument("schema mismatch: config potential differs from the file's on r >= a")
        return q_file
    return cfg.make_potential()


def invert(doc, cfg, L=None, gamma=None):
    """Run data preparation and inversion; returns ``(rows, diagnostics)``."""
    L = cfg.L_invert if L is None else int(L)
    gamma = cfg.gamma if gamma is None else float(gamma)
    if abs(float(doc["k"]) - cfg.k) > 1e-12 * cfg.k:
        raise InvalidArgument(f"schema mismatch: file k = {doc['k']} but config k = {cfg.k}")
    if not 0 <= L <= int(doc["L_max"]):
        raise InvalidArgument(f"L = {L} outside 0..L_max = {doc['L_max']}")
    has_truth = doc.get("potential") is not None
    q = _known_tail(doc, cfg)
    k, a = cfg.k, cfg.a
    delta = np.array(doc["delta"][: L + 1], dtype=float)

    grid = make_grid(0.0, a, cfg.n_moment, "gauss-legendre")
    tails, bases, bd = prepare(delta, k, q.tail(), grid, cfg.n_tail, cfg.volterra_tol, grid_tol=cfg.grid_tol)
    ms = build_moment_system(bases, bd, L, gamma)
    r = np.linspace(0.0, a, cfg.n_inner)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rec = reconstruct(ms, r, SolveOptions(ridge=cfg.ridge))

    diag = {
        "k": k, "a": a, "L": L, "gamma": gamma, "ridge": cfg.ridge,
        "per_l": [
            {"l": t.l, "b": _cplx(bd.b[t.l]), "beta": _cplx(bd.beta[t.l]), "psi_a": _cplx(t.psi_a),
             "dpsi_a": _cplx(t.dpsi_a), "iterations": t.iterations, "residual": t.residual,
             "error_estimate": t.error_estimate}
            for t in tails
        ],
        "rows_used": [f"{l}{kind}" for l, kind in ms.labels],
        "points": [
            {"r": float(ri), "normalization_residual": float(nr), "spread": float(sp), "condition": float(cn)}
            for ri, nr, sp, cn in zip(r, rec.normalization_residual, rec.spread, rec.condition)
        ],
        "max_normalization_residual": float(np.max(rec.normalization_residual)),
        "L2_err": None,
        "max_err": None,
    }
    rows = {"r": r, "q_L": rec.q_L}
    if has_truth:
        q_true = np.asarray(Potential.from_dict(doc["potential"], a=a)(r), dtype=float)
        rows["q_true"] = q_true
        rows["abs_err"] = np.abs(rec.q_L - q_true)
        if np.any(q_true != 0):
            w = _line_weights(r)
            diag["L2_err"], diag["max_err"] = relative_errors(rec, q_true, w)
        else:
            diag["L2_err"] = float(np.sqrt(np.sum(_line_weights(r) * rec.q_L**2)))
            diag["max_err"] = float(np.max(np.abs(rec.q_L)))
            diag["errors_are_absolute"] = True
    return rows, diag


def _line_weights(r):
    if r.size % 2 == 1 and r.size >= 3:
        return simpson_weights(r.size, r[1] - r[0])
    w = np.full(r.size, r[1] - r[0])
    w[0] = w[-1] = 0.5 * w[0]
    return w


def format_csv(rows):
    cols = ["r", "q_true", "q_L", "abs_err"] if "q_true" in rows else ["r", "q_L"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for i in range(rows["r"].size):
        writer.writerow([f"{float(rows[c][i]):.17g}" for c in cols])
    return buf.getvalue()


def read_csv(path):
    """Read a reconstruction CSV back into a dict of arrays."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader])
    return {name: data[:, j] for j, name in enumerate(header)}


def diagnostics_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".diagnostics.json")


# -- forward -----------------------------------------------------------------


def forward_report(cfg):
    q = cfg.make_potential()
    opts = ForwardOptions(n=cfg.n_forward)
    waves = []
    for l in range(cfg.L_max + 1):
        pw = solve_partial_wave(q, l, cfg.k, opts)
        rep = s_matrix_checks(pw, q, raise_on_failure=False)
        waves.append({
            "l": l, "delta": pw.delta, "S": _cplx(pw.S), "A_l": _cplx(pw.A_l),
            "psi_a": _cplx(pw.psi_a), "dpsi_a": _cplx(pw.dpsi_a),
            "match_spread": pw.match_spread, "max_discrepancy": rep["max_discrepancy"],
        })
    return {"k": cfg.k, "a": cfg.a, "potential": q.to_dict(), "L_max": cfg.L_max,
            "convention": "principal-branch", "waves": waves}


# -- check -------------------------------------------------------------------


def _entry(name, value, tol, detail=None):
    value = float(value)
    ok = bool(np.isfinite(value) and value <= tol)
    e = {"name": name, "value": value, "tolerance": tol, "passed": ok}
    if detail is not None:
        e["detail"] = detail
    return e


def run_checks(cfg):
    """Cross-module identity suite; returns a list of check entries."""
    k = cfg.k
    checks = []
    lmax = min(cfg.L_max, 20)

    xs = np.array([0.1, 1.0, 10.0, 100.0])
    u, v, up, vp = riccati_uv_all(lmax, xs)
    w = u * vp - v * up
    checks.append(_entry("wronskian_uv", np.max(np.abs(w - 1)), 1e-9, {"l0_value": float(w[0, 1])}))

    worst = 0.0
    for l in range(lmax + 1):
        F = wronskian_F0(l, k)
        for r in (1.0, 5.0):
            f, df = jost_f0(l, k, r)
            W = f * regular_phi0_dr(l, k, r) - regular_phi0(l, k, r) * df
            worst = max(worst, abs(W - F) / abs(F))
    checks.append(_entry("wronskian_F0", worst, 1e-9))

    rho = np.array([0.5, 1.0, 2.0]) / k
    jump = max(abs((0.0 - xi_kernel_dr(l, k, rho, rho)) + 1.0).max() for l in range(lmax + 1))
    checks.append(_entry("xi_jump", jump, 1e-8))

    rad = 0.0
    for l in range(min(lmax, 2) + 1):
        rr = 100.0 / k
        val = g_kernel_dr(l, k, rr, 1.0 / k) - 1j * k * g_kernel(l, k, rr, 1.0 / k)
        rad = max(rad, abs(val))
    checks.append(_entry("g_radiation", rad, 1e-3, {"kr": 100.0, "l_max": min(lmax, 2)}))

    q = cfg.make_potential()
    opts = ForwardOptions(n=cfg.n_forward)
    try:
        pws = [solve_partial_wave(q, l, k, opts) for l in range(cfg.L_max + 1)]
        tri = max(s_matrix_checks(pw, q, raise_on_failure=False)["max_discrepancy"] for pw in pws)
        checks.append(_entry("s_matrix_triangle", tri, 1e-6))
        if q.kind == "square-well" and q.depth != 0:
            R, V0 = q.support_radius, q.depth
            kap = math.sqrt(k * k + V0) if k * k + V0 > 0 else None
            if kap is not None:
                from .forward import wrap_phase

                d0 = float(wrap_phase(-k * R + math.atan(k / kap * math.tan(kap * R))))
                checks.append(_entry("square_well_delta0", abs(float(wrap_phase(pws[0].delta - d0))), 1e-8))
    except GridTooCoarse as exc:
        checks.append(_entry("s_matrix_triangle", math.inf, 1e-6, {"error": f"grid-too-coarse: {exc}"}))
        pws = None

    a_rt = cfg.a if cfg.a < q.support_radius else 0.6 * q.support_radius
    q_rt = replace(q, split_radius=a_rt)
    try:
        err = 0.0
        for l in range(cfg.L_invert + 1):
            pw = solve_partial_wave(q_rt, l, k, opts)
            t = solve_tail_volterra(l, k, pw.delta, q_rt, cfg.n_tail, cfg.volterra_tol, grid_tol=cfg.grid_tol)
            err = max(err, abs(t.psi_a - pw.psi_a), abs(t.dpsi_a - pw.dpsi_a))
        checks.append(_entry("tail_round_trip", err, 1e-6, {"a": a_rt}))
    except FesinvError as exc:
        kind = "grid-too-coarse" if isinstance(exc, GridTooCoarse) else type(exc).__name__
        checks.append(_entry("tail_round_trip", math.inf, 1e-6, {"a": a_rt, "error": f"{kind}: {exc}"}))
    return checks


# -- entry point -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="fesinv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="run configuration (JSON)")
        sp.add_argument("--out", help="output path (default: stdout)")
        return sp

    s = common(sub.add_parser("synth", help="forward-solve a potential into a phase-shift file"))
    s.add_argument("--seed", type=int)
    s.add_argument("--noise", type=float, help="relative Gaussian noise on each phase shift")

    i = common(sub.add_parser("invert", help="reconstruct q on [0, a] from a phase-shift file"))
    i.add_argument("phase_file")
    i.add_argument("--L", type=int, help="truncation order (default: L_invert)")
    i.add_argument("--gamma", type=float, help="kernel concentration exponent")

    common(sub.add_parser("forward", help="partial-wave report for the configured potential"))
    common(sub.add_parser("check", help="run the identity suite"))
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "synth":
            over = {key: val for key, val in (("seed", args.seed), ("noise", args.noise)) if val is not None}
            cfg = replace(cfg, **over)
            _emit(_dumps(synthesize(cfg)), args.out)
        elif args.command == "invert":
            doc = read_phase_file(args.phase_file)
            rows, diag = invert(doc, cfg, args.L, args.gamma)
            text = format_csv(rows)
            if args.out is None:
                sys.stdout.write(text)
                sys.stderr.write(_dumps(diag))
            else:
                Path(args.out).write_text(text, encoding="utf-8")
                diagnostics_path(args.out).write_text(_dumps(diag), encoding="utf-8")
        elif args.command == "forward":
            _emit(_dumps(forward_report(cfg)), args.out)
        elif args.command == "check":
            checks = run_checks(cfg)
            passed = all(c["passed"] for c in checks)
            _emit(_dumps({"passed": passed, "checks": checks}), args.out)
            return EXIT_OK if passed else EXIT_NUMERIC
    except InvalidArgument as exc:
        sys.stderr.write(f"fesinv: error: {exc}\n")
        return EXIT_USAGE
    except FesinvError as exc:
        sys.stderr.write(f"fesinv: numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
