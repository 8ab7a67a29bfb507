import numpy as np
import pytest
from numpy.testing import assert_allclose

from kinlim import (VolterraProblem, equilibrium, extract_rate, make_problem,
                    volterra_kernel, volterra_residual, volterra_solve)
from kinlim.linear_response import free_streaming_source


def test_kernel_guards():
    eq = equilibrium("maxwellian", dim_v=1, n_v=128)
    with pytest.raises(ValueError):
        volterra_kernel(eq, 0.0, (0,), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        volterra_kernel(eq, 0.0, (1,), np.array([-1.0]))


def test_kernel_classical_closed_form():
    sigma = 1.0
    eq = equilibrium("maxwellian", dim_v=1, n_v=512, sigma=sigma, v_max=8.0)
    tau = np.linspace(0.0, 5.0, 30)
    K = volterra_kernel(eq, 0.0, (1,), tau, length=2.0 * np.pi)
    assert_allclose(K, tau * np.exp(-0.5 * tau**2), atol=1e-10)
    assert K[0] == 0.0


def test_free_streaming_source_at_zero():
    eq = equilibrium("maxwellian", dim_v=1, n_v=256, v_max=8.0)
    h = eq.values
    s = free_streaming_source(eq, 0.0, (1,), h, np.array([0.0]))
    assert_allclose(s[0], 1.0, rtol=1e-10)          # integral of mu


def test_problem_validation():
    with pytest.raises(ValueError):
        VolterraProblem(k=(1,), kernel=np.zeros(4), source=np.zeros(5),
                        dt=0.1, T=0.4)
    with pytest.raises(ValueError):
        VolterraProblem(k=(1,), kernel=np.zeros(4), source=np.zeros(4),
                        dt=-0.1, T=0.4)


def _constant_kernel_problem(dt, T, c=0.8):
    # rho(t) = e^{-t} solves rho + c * conv(1, rho) = S with
    # S(t) = e^{-t} + c (1 - e^{-t})
    n = int(round(T / dt)) + 1
    t = dt * np.arange(n)
    return VolterraProblem(k=(1,), kernel=np.full(n, c),
                           source=np.exp(-t) + c * (1.0 - np.exp(-t)),
                           dt=dt, T=T), t


def test_volterra_solve_against_analytic():
    p, t = _constant_kernel_problem(0.01, 4.0)
    rho = volterra_solve(p)
    assert_allclose(rho, np.exp(-t), atol=5e-6)


def test_volterra_solve_second_order():
    errs = []
    for dt in (0.08, 0.04, 0.02):
        p, t = _constant_kernel_problem(dt, 4.0)
        errs.append(np.abs(volterra_solve(p) - np.exp(-t)).max())
    r1 = errs[0] / errs[1]
    r2 = errs[1] / errs[2]
    assert 3.3 < r1 < 4.7
    assert 3.3 < r2 < 4.7


def test_volterra_residual_small_on_solution():
    p, _ = _constant_kernel_problem(0.05, 3.0)
    rho = volterra_solve(p)
    assert volterra_residual(p, rho) < 1e-12


def test_make_problem_shapes():
    eq = equilibrium("maxwellian", dim_v=1, n_v=256, v_max=8.0)
    p = make_problem(eq, 0.0, (1,), eq.values, dt=0.1, T=2.0)
    assert len(p.kernel) == len(p.source) == 21
    assert p.T == pytest.approx(2.0)


def test_extract_rate_synthetic():
    t = np.linspace(0.0, 10.0, 400)
    z = np.exp((-0.3 + 1.7j) * t)
    r = extract_rate(z, t)
    assert_allclose(r.real, -0.3, atol=1e-10)
    assert_allclose(r.imag, 1.7, atol=1e-10)


def test_extract_rate_degenerate():
    t = np.linspace(0.0, 1.0, 50)
    with pytest.raises(ValueError):
        extract_rate(np.ones_like(t), t)
    with pytest.raises(ValueError):
        extract_rate(np.zeros_like(t), t)
    with pytest.raises(ValueError):
        extract_rate(np.ones(3), np.arange(3.0))


def test_landau_damping_rate_from_volterra():
    # kappa = 0.5 density mode of the unit maxwellian
    eq = equilibrium("maxwellian", dim_v=1, n_v=512, sigma=1.0, v_max=8.0)
    p = make_problem(eq, 0.0, (1,), eq.values, dt=0.02, T=25.0,
                     length=4.0 * np.pi)
    rho = volterra_solve(p)
    t = p.dt * np.arange(len(rho))
    # the real signal beats at the mode frequency; the envelope decay is
    # the Landau rate (signal is real, so fit the log-envelope via peaks)
    y = np.abs(np.real(rho))
    pk = [i for i in range(1, len(y) - 1)
          if y[i] >= y[i - 1] and y[i] >= y[i + 1] and t[i] > 3.0 and t[i] < 20.0]
    a = np.polyfit(t[pk], np.log(y[pk]), 1)[0]
    freq = np.pi / np.mean(np.diff(t[pk]))
    assert abs(a - (-0.15336)) < 5e-3
    assert abs(freq - 1.41566) < 5e-3
