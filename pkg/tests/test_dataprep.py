import numpy as np
import pytest

from fesinv import Potential, boundary_data, interior_basis, make_grid, psi0l, riccati_uv, solve_partial_wave, solve_tail_volterra
from fesinv.dataprep import interior_factor, prepare, volterra_history
from fesinv.errors import GridTooCoarse, InvalidArgument, NoConvergence
from fesinv.forward import phase_shifts

K = 1.0
SPLIT = Potential("square-well", 1.0, 0.6, depth=1.0)
# zero on [0, 0.6), nonzero on the tail
TAIL_ONLY = Potential("piecewise-linear-samples", 1.0, 0.6, table_r=(0.6, 0.8, 1.0), table_q=(-1.0, -0.5, 0.0))


@pytest.fixture(scope="module")
def split_waves():
    return [solve_partial_wave(SPLIT, l, K) for l in range(9)]


def test_psi0l_examples():
    r = np.linspace(0.1, 6, 13)
    p, dp = psi0l(3, K, 0.0, r)
    np.testing.assert_allclose(p, riccati_uv(3, r).u, atol=1e-15)
    p, dp = psi0l(0, K, np.pi / 4, r)
    np.testing.assert_allclose(p, np.exp(1j * np.pi / 4) * np.sin(r + np.pi / 4), atol=1e-15)
    np.testing.assert_allclose(dp, np.exp(1j * np.pi / 4) * np.cos(r + np.pi / 4), atol=1e-15)


def test_psi0l_asymptotics():
    l, d = 2, 0.3
    errs = []
    for r in (1e2, 1e3):
        p, _ = psi0l(l, K, d, r)
        errs.append(abs(p - np.exp(1j * d) * np.sin(r - l * np.pi / 2 + d)))
    assert errs[1] < errs[0] and errs[1] < 1e-2


def test_zero_tail_collapses():
    q = Potential("square-well", 1.0, 0.6, depth=0.0)
    t = solve_tail_volterra(2, K, 0.1, q)
    assert t.iterations == 1
    assert np.array_equal(t.psi, t.psi0l)


@pytest.mark.parametrize("l", range(9))
def test_round_trip(split_waves, l):
    pw = split_waves[l]
    t = solve_tail_volterra(l, K, pw.delta, SPLIT)
    assert abs(t.psi_a - pw.psi_a) <= 1e-6
    assert abs(t.dpsi_a - pw.dpsi_a) <= 1e-6
    if l <= 6:
        assert abs(t.psi_a - pw.psi_a) <= 1e-6 * abs(pw.psi_a)


def test_round_trip_smooth_potential():
    q = Potential("gaussian", 2.0, 0.8, depth=1.2, width=0.9)
    for l in (0, 2, 4):
        pw = solve_partial_wave(q, l, K)
        t = solve_tail_volterra(l, K, pw.delta, q)
        assert abs(t.psi_a - pw.psi_a) <= 1e-6 and abs(t.dpsi_a - pw.dpsi_a) <= 1e-6


def test_geometric_convergence():
    # Volterra iterates contract faster than geometrically; roundoff is reached in ~7 steps
    hist = volterra_history(0, K, 0.2, SPLIT, n=201, iterations=12)
    ratios = hist[1:6] / hist[:5]
    assert np.all(ratios < 0.5)
    assert np.all(np.diff(ratios) < 0)
    assert hist[-1] <= 1e-15


def test_phase_structure(split_waves):
    for l in (0, 3):
        t = solve_tail_volterra(l, K, split_waves[l].delta, SPLIT)
        real = t.psi * np.exp(-1j * t.delta)
        assert np.max(np.abs(real.imag)) <= 1e-10 * np.max(np.abs(real))


def test_tail_errors():
    with pytest.raises(GridTooCoarse):
        solve_tail_volterra(8, K, 1e-8, SPLIT, n=11)
    with pytest.raises(NoConvergence) as info:
        solve_tail_volterra(0, K, 0.2, SPLIT, max_iter=2)
    assert info.value.iterations == 2 and info.value.residual > 0
    with pytest.raises(InvalidArgument):
        solve_tail_volterra(0, K, 0.2, SPLIT, n=10)
    with pytest.raises(InvalidArgument):
        solve_tail_volterra(0, K, 0.2, SPLIT, tol=0.0)


def _prep(q, L=8, n_inner=64):
    delta = phase_shifts(q, K, L).delta
    grid = make_grid(0.0, q.split_radius, n_inner, "gauss-legendre")
    return prepare(delta, K, q.tail(), grid)


def test_zero_interior_gives_zero_moments():
    _, _, bd = _prep(TAIL_ONLY)
    assert np.max(np.abs(bd.b)) <= 1e-8
    assert np.max(np.abs(bd.beta)) <= 1e-8


def test_b_linear_in_interior_strength():
    shape = Potential("square-well", 1.0, 0.6, depth=1.0).interior()
    b1 = _prep(shape.scaled(1e-3), L=5)[2].b
    b2 = _prep(shape.scaled(2e-3), L=5)[2].b
    np.testing.assert_allclose(b2 / b1, 2.0, rtol=0.05)


def test_beta_consistency(split_waves):
    tails, bases, bd = _prep(SPLIT)
    for l in range(9):
        beta_fwd = -(split_waves[l].dpsi_a - bases[l].dpsi0_a)
        b_fwd = -(split_waves[l].psi_a - bases[l].psi0_a)
        assert abs(bd.beta[l] - beta_fwd) <= 1e-6
        assert abs(bd.b[l] - b_fwd) <= 1e-6


def test_b_decays_in_l():
    _, _, bd = _prep(SPLIT)
    assert np.all(np.diff(np.abs(bd.b)) < 0)


def test_interior_basis_zero_tail():
    q = Potential("square-well", 1.0, 1.0, depth=1.0)
    grid = make_grid(0.0, 1.0, 40, "gauss-legendre")
    for l in (0, 4):
        t = solve_tail_volterra(l, K, 0.1, q)
        b = interior_basis(l, K, t, grid)
        assert np.array_equal(b.psi0, riccati_uv(l, K * grid.points).u.astype(complex))


def test_interior_basis_factorization(split_waves):
    grid = make_grid(0.0, 0.6, 30, "gauss-legendre")
    for l in (0, 2, 6):
        t = solve_tail_volterra(l, K, split_waves[l].delta, SPLIT)
        b = interior_basis(l, K, t, grid)
        C = interior_factor(l, K, t)
        u = riccati_uv(l, K * grid.points).u
        np.testing.assert_allclose(b.psi0, C * u, rtol=1e-10, atol=1e-10 * np.max(np.abs(u)))
        ua = riccati_uv(l, K * 0.6)
        assert np.isfinite(b.psi0_a)
        assert abs(b.psi0_a - C * ua.u) <= 1e-10 * abs(ua.u)
        assert abs(b.dpsi0_a - C * K * ua.u_prime) <= 1e-10 * abs(ua.u_prime)


def test_boundary_index_mismatch():
    tails, bases, _ = _prep(SPLIT, L=2)
    with pytest.raises(InvalidArgument):
        boundary_data(tails, bases[::-1])
    with pytest.raises(InvalidArgument):
        boundary_data(tails[:2], bases)


def test_boundary_definitions():
    tails, bases, bd = _prep(SPLIT, L=3)
    for l in range(4):
        assert bd.b[l] == -(tails[l].psi_a - bases[l].psi0_a)
        assert bd.beta[l] == -(tails[l].dpsi_a - bases[l].dpsi0_a)
    assert bd.L_max == 3 and bd.a == 0.6
