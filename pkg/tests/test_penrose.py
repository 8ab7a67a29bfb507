import numpy as np
import pytest
from numpy.testing import assert_allclose

from kinlim import PenroseSymbol, dispersion_roots, equilibrium, stability_margin
from kinlim.penrose import _relativistic_kernel, symbol

# frozen dispersion root of the unit maxwellian at wavenumber 1/2
# (obtained from an independent high-resolution root solve of the
# analytically continued symbol; damping is negative)
LANDAU_OMEGA = 1.4156625151 - 0.1533591808j


def _maxwellian_ps(length=2.0 * np.pi, **kw):
    eq = equilibrium("maxwellian", dim_v=1, n_v=512, sigma=1.0, v_max=8.0)
    return PenroseSymbol(eq=eq, eps=0.0, length=length, **kw)


def test_kernel_closed_form():
    ps = _maxwellian_ps()
    s = np.linspace(0.0, 5.0, 40)
    # w_k(s) = s M(kappa s) with M the gaussian marginal transform
    assert_allclose(ps.kernel((2,), s), s * np.exp(-0.5 * (2.0 * s) ** 2),
                    atol=1e-10)


def test_symbol_rejects_left_half_plane_and_k0():
    ps = _maxwellian_ps()
    with pytest.raises(ValueError):
        symbol(ps, -0.1, 1.0, (1,))
    with pytest.raises(ValueError):
        ps.kernel((0,), np.array([1.0]))


def test_symbol_large_gamma_tends_to_one():
    ps = _maxwellian_ps()
    val = symbol(ps, 50.0, 0.0, (1,))
    assert abs(val - 1.0) < 1e-3


def test_landau_root_frozen_value():
    # kappa = 0.5: mode 1 on a box of length 4 pi
    ps = _maxwellian_ps(length=4.0 * np.pi, n_s=8192)
    roots = dispersion_roots(ps, (1,))
    assert roots, "no dispersion root found"
    w = min(roots, key=lambda r: abs(r.omega - LANDAU_OMEGA)).omega
    assert abs(w - LANDAU_OMEGA) < 1e-5


def test_maxwellian_is_penrose_stable():
    ps = _maxwellian_ps()
    rep = stability_margin(ps, [(1,), (2,), (3,)])
    assert rep.classification == "stable"
    assert rep.margin > 0.1


def test_two_stream_unstable_in_long_box():
    eq = equilibrium("two_stream", dim_v=1, n_v=512, sigma=1.0, u=2.4, v_max=11.0)
    ps = PenroseSymbol(eq=eq, eps=0.0, length=8.0 * np.pi)
    rep = stability_margin(ps, [(1,)])
    assert rep.classification == "unstable"
    grow = max(rep.roots, key=lambda r: r.omega.imag)
    # purely growing mode, frozen growth rate
    assert abs(grow.omega.real) < 1e-8
    assert abs(grow.omega.imag - 0.23177863) < 1e-6


def test_two_stream_stable_at_short_wavelength():
    eq = equilibrium("two_stream", dim_v=1, n_v=512, sigma=1.0, u=2.4, v_max=11.0)
    ps = PenroseSymbol(eq=eq, eps=0.0, length=2.0 * np.pi)
    rep = stability_margin(ps, [(1,)])
    assert rep.classification == "stable"


def test_relativistic_kernel_reduces_to_classical():
    eq = equilibrium("maxwellian", dim_v=1, n_v=1024, sigma=1.0, v_max=9.0)
    s = np.linspace(0.0, 6.0, 50)
    kappa = 1.0
    rel = _relativistic_kernel(eq, 0.0, kappa, s, None)
    assert_allclose(rel, s * np.exp(-0.5 * s**2), atol=1e-7)


def test_relativistic_kernel_2d_axis_aligned():
    eq = equilibrium("maxwellian", dim_v=2, n_v=128, sigma=1.0, v_max=8.0)
    s = np.linspace(0.0, 4.0, 20)
    rel = _relativistic_kernel(eq, 0.0, 1.0, s, np.array([1.0, 0.0]))
    assert_allclose(rel, s * np.exp(-0.5 * s**2), atol=1e-6)


def test_relativistic_symbol_close_to_classical_for_small_eps():
    eq = equilibrium("maxwellian", dim_v=1, n_v=512, sigma=1.0, v_max=8.0)
    ps0 = PenroseSymbol(eq=eq, eps=0.0, length=4.0 * np.pi)
    ps1 = PenroseSymbol(eq=eq, eps=0.05, length=4.0 * np.pi)
    v0 = symbol(ps0, 0.4, 1.2, (1,))
    v1 = symbol(ps1, 0.4, 1.2, (1,))
    assert abs(v1 - v0) < 1e-2
