import numpy as np
import pytest
from numpy.testing import assert_allclose

from kinlim import (EMState, PhaseGrid, build_hierarchy, d_dx, darwin_potentials,
                    deposit_moments, equilibrium, helmholtz_solve, leray_project,
                    moment_constants, poisson_solve, wave_step)
from kinlim.phase_space import DistField, PERTURBATION
from kinlim.spectral_fields import twisted_moment

L = 4.0 * np.pi


def _x(n=64):
    return np.linspace(0.0, L, n, endpoint=False)


def test_d_dx_of_sin():
    x = _x()
    k = 2.0 * np.pi * 3 / L
    assert_allclose(d_dx(np.sin(k * x), L), k * np.cos(k * x), atol=1e-12)


def test_poisson_solve_single_mode():
    x = _x()
    k = 2.0 * np.pi * 2 / L
    rho = 5.0 + np.cos(k * x)
    phi = poisson_solve(rho, L)
    assert_allclose(phi, np.cos(k * x) / k**2, atol=1e-12)
    assert abs(phi.mean()) < 1e-14


def test_leray_project_idempotent_and_mean():
    rng = np.random.default_rng(0)
    u = rng.normal(size=(32, 2))
    pu = leray_project(u, L)
    assert_allclose(leray_project(pu, L), pu, rtol=1e-14)
    assert_allclose(pu[:, 0], u[:, 0].mean())      # longitudinal mean passes
    assert_allclose(pu[:, 1], u[:, 1])             # transverse untouched


def test_helmholtz_solve_per_mode():
    x = _x()
    k = 2.0 * np.pi / L
    eps, lam = 0.3, 0.8
    src = np.cos(k * x)
    out = helmholtz_solve(src, eps, lam, L)
    assert_allclose(out, src / (k**2 + eps**2 * lam), atol=1e-13)


def test_helmholtz_eps0_mean_singular():
    with pytest.raises(ValueError):
        helmholtz_solve(np.ones(32), 0.0, 1.0, L)
    # zero-mean source is fine
    x = _x(32)
    helmholtz_solve(np.cos(2.0 * np.pi * x / L), 0.0, 1.0, L)


def test_emstate_fields_and_residuals():
    n = 32
    x = _x(n)
    k = 2.0 * np.pi / L
    eps = 0.2
    A = np.zeros((n, 2))
    A[:, 1] = np.sin(k * x)
    st = EMState(length=L, eps=eps, lam=1.0, phi=np.cos(k * x),
                 A=A, dtA=np.zeros((n, 2)))
    E = st.E()
    assert_allclose(E[:, 0], k * np.sin(k * x), atol=1e-12)
    assert_allclose(st.B(), k * np.cos(k * x), atol=1e-12)
    assert st.gauge_residual() < 1e-14
    rho = k * k * np.cos(k * x)        # div E = -dx^2 phi
    assert st.gauss_residual(rho) < 1e-11


def test_wave_step_conserves_energy_without_source():
    n = 32
    rng = np.random.default_rng(1)
    st = EMState(length=L, eps=0.05, lam=0.9, phi=np.zeros(n),
                 A=rng.normal(size=(n, 2)), dtA=rng.normal(size=(n, 2)))
    e0 = st.wave_energy()
    src = np.zeros((n, 2))
    for _ in range(50):
        st = wave_step(st, src, 0.1)
    assert_allclose(st.wave_energy(), e0, rtol=1e-10)


def test_wave_step_matches_oscillator_solution():
    # single mode, constant source: exact variation of constants
    n = 32
    x = _x(n)
    k = 2.0 * np.pi / L
    eps, lam = 0.1, 1.0
    w = np.sqrt(k**2 + eps**2 * lam) / eps
    A = np.zeros((n, 2))
    A[:, 1] = np.cos(k * x)
    st = EMState(length=L, eps=eps, lam=lam, phi=np.zeros(n),
                 A=A, dtA=np.zeros((n, 2)))
    src = np.zeros((n, 2))
    src[:, 1] = 0.7 * np.cos(k * x)
    t = 0.35
    out = wave_step(st, src, t)
    part = 0.7 / (k**2 + eps**2 * lam)
    want = part + (1.0 - part) * np.cos(w * t)
    assert_allclose(out.A[:, 1], want * np.cos(k * x), atol=1e-11)


def test_wave_step_zero_frequency_branch():
    # lam = 0 makes the mean mode a free particle driven by s/eps^2
    n = 16
    eps = 0.2
    st = EMState(length=L, eps=eps, lam=0.0, phi=np.zeros(n),
                 A=np.full((n, 2), 0.3), dtA=np.full((n, 2), 0.1))
    src = np.full((n, 2), 0.5)
    dt = 0.25
    out = wave_step(st, src, dt)
    acc = 0.5 / eps**2
    assert_allclose(out.A.mean(axis=0), 0.3 + 0.1 * dt + 0.5 * acc * dt**2,
                    rtol=1e-12)
    assert_allclose(out.dtA.mean(axis=0), 0.1 + acc * dt, rtol=1e-12)


def _grid2(n_x=16, n_v=64, v_max=8.0):
    return PhaseGrid(n_x=n_x, length=L, n_v=n_v, v_max=v_max, dim_v=2)


def test_hierarchy_guards():
    eq = equilibrium("maxwellian", dim_v=2, n_v=32, v_max=6.0)
    grid = _grid2(n_v=32, v_max=6.0)
    with pytest.raises(ValueError):
        build_hierarchy(eq, 0.0, 2, grid)
    with pytest.raises(ValueError):
        build_hierarchy(eq, 0.1, 0, grid)
    eq1 = equilibrium("maxwellian", dim_v=1, n_v=32)
    with pytest.raises(ValueError):
        build_hierarchy(eq1, 0.1, 2, grid)


def test_hierarchy_base_tables():
    eps = 0.2
    eq = equilibrium("maxwellian", dim_v=2, n_v=64, v_max=8.0)
    grid = _grid2()
    h = build_hierarchy(eq, eps, 2, grid)
    lam = moment_constants(eq, eps).lam
    kap = 2.0 * np.pi * np.fft.fftfreq(grid.n_x, d=grid.dx)
    assert_allclose(h.d_k[1], kap**2 + eps**2 * lam, rtol=1e-13)
    assert_allclose(h.S_kj[(1, 1)], -np.ones_like(kap), rtol=0, atol=0)
    assert_allclose(h.d_k[2], h.d_k[1] + eps**4 * h.s_sym[1], rtol=1e-13)
    assert_allclose(h.S_kj[(2, 2)], np.ones_like(kap), rtol=0, atol=0)
    assert_allclose(h.S_kj[(2, 1)], eps**2 * h.s_sym[1] / h.d_k[2], rtol=1e-13)


def test_darwin_a1_solves_shifted_helmholtz():
    eps = 0.15
    eq = equilibrium("maxwellian", dim_v=2, n_v=64, v_max=8.0)
    grid = _grid2()
    h = build_hierarchy(eq, eps, 1, grid)
    x = grid.x
    V = grid.v_nodes()
    vals = (np.cos(2.0 * np.pi * x / L)[:, None, None]
            * (V[..., 1] * np.exp(-np.sum(V * V, axis=-1) / 2.0))[None, ...])
    mom = deposit_moments(DistField(grid, vals, PERTURBATION), eps, max_ell=1)
    (A1,) = darwin_potentials(h, mom)
    lam = moment_constants(eq, eps).lam
    # apply -Delta + eps^2 lam and compare to eps * P jhat
    lhs = -d_dx(d_dx(A1[:, 1], L), L) + eps**2 * lam * A1[:, 1]
    rhs = eps * (mom.j[:, 1] - mom.j[:, 1].mean())
    assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)
    assert abs(A1[:, 1].mean()) < 1e-14
    assert_allclose(A1[:, 0], 0.0)


def test_twisted_moment_indexing():
    eps = 0.1
    grid = _grid2(n_v=48)
    rng = np.random.default_rng(3)
    f = DistField(grid, rng.normal(size=grid.shape), PERTURBATION)
    mom = deposit_moments(f, eps, max_ell=3)
    q1 = twisted_moment(mom, 1)
    assert_allclose(q1, mom.m[3][:, 1, 0, 0], rtol=1e-14)
