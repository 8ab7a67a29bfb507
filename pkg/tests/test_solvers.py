import numpy as np
import pytest
from numpy.testing import assert_allclose

from kinlim import (FullSnapshot, RunConfig, build_initial_f, equilibrium,
                    field_l2_difference, full_snapshots, rescale_spacetime,
                    rescale_velocity, run, system_residual, vd_run, vm_run,
                    vp_run, well_prepared_init, wp_residuals)
from kinlim.phase_space import deposit_moments

L = 4.0 * np.pi


def _vp_cfg(**kw):
    base = dict(model="VP", eps=0.0, delta=1e-3, t_final=1.0, dt=0.05,
                n_x=16, length=L, n_v=64, v_max=8.0, dim_v=1,
                perturbation={"density_modes": {1: 1.0}})
    base.update(kw)
    return RunConfig(**base)


def _vm_cfg(**kw):
    base = dict(model="VM", eps=0.1, delta=1e-3, t_final=1.0, dt=0.05,
                n_x=16, length=L, n_v=32, v_max=8.0, dim_v=2,
                perturbation={"density_modes": {1: 1.0},
                              "current_modes": {1: 0.5}})
    base.update(kw)
    return RunConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        _vp_cfg(model="XX")
    with pytest.raises(ValueError):
        _vm_cfg(eps=0.0)                       # VM needs eps > 0
    with pytest.raises(ValueError):
        _vp_cfg(delta=-1.0)


def test_default_equilibrium_matches_grid():
    cfg = _vp_cfg()
    assert cfg.eq.n_v == cfg.n_v
    assert cfg.eq.v_max == cfg.v_max


def test_build_initial_f_zero_mean_density():
    cfg = _vp_cfg()
    f0 = build_initial_f(cfg)
    rho = deposit_moments(f0, 0.0).rho
    assert abs(rho.mean()) < 1e-14
    assert np.abs(rho).max() > 0.5


def test_shear_needs_two_velocity_components():
    cfg = _vp_cfg(perturbation={"shear_modes": {1: 1.0}})
    with pytest.raises(ValueError):
        build_initial_f(cfg)


def test_well_prepared_order_guards():
    with pytest.raises(ValueError):
        well_prepared_init(_vm_cfg(), p=5)
    with pytest.raises(ValueError):             # p >= 4 needs dim_v = 2
        well_prepared_init(_vp_cfg(model="VM", eps=0.1), p=4)


def test_well_prepared_p0_has_zero_potentials():
    f0, em = well_prepared_init(_vm_cfg(), p=0)
    assert_allclose(em.A, 0.0)
    assert_allclose(em.dtA, 0.0)
    assert em.gauss_residual(deposit_moments(f0, 0.1).rho) < 1e-10


def test_wp_residuals_decrease_with_order():
    pert = {"density_modes": {1: 1.0}, "current_modes": {1: 0.5},
            "shear_modes": {1: 0.4}, "seed_A_modes": {1: 0.3},
            "seed_dtA_modes": {1: 0.2}}
    eps = 0.05
    cfg = _vm_cfg(eps=eps, perturbation=pert)
    totals = {}
    for p in (4, 6, 8):
        f0, em = well_prepared_init(cfg, p=p)
        r1, r2 = wp_residuals(f0, em, p, cfg.eq)
        totals[p] = r1 + r2
    assert totals[4] > totals[6] > totals[8] > 0.0


def test_vp_run_charge_and_energy():
    cfg = _vp_cfg(t_final=2.0)
    traj = vp_run(cfg)
    assert np.abs(traj.charge - traj.charge[0]).max() < 1e-12
    assert traj.energy_drift() < 1e-4
    assert traj.continuity_residual() < 0.05


def test_vm_run_finite_and_gauge_free():
    cfg = _vm_cfg(t_final=1.0)
    traj = vm_run(cfg)
    assert np.all(np.isfinite(traj.E))
    assert traj.gauge_res.max() < 1e-12
    assert traj.gauss_res.max() < 1e-10


def test_vd_run_finite():
    cfg = _vm_cfg(model="VD", vd_order=1, t_final=0.5)
    traj = vd_run(cfg)
    assert np.all(np.isfinite(traj.E))
    assert np.all(np.isfinite(traj.B))


def test_run_dispatch():
    traj = run(_vp_cfg(t_final=0.2))
    assert len(traj.times) == 5


def test_field_l2_difference_zero_on_self():
    traj = vp_run(_vp_cfg(t_final=0.5))
    assert field_l2_difference(traj, traj) == 0.0


def test_field_threshold_time_interpolates():
    traj = vp_run(_vp_cfg(t_final=0.5))
    nrm = traj.delta * np.sqrt(np.sum(traj.E**2, axis=(1, 2)) * traj.grid.dx
                               + np.sum(traj.B**2, axis=1) * traj.grid.dx)
    thr = 0.5 * (nrm[0] + nrm.max())
    t_star = traj.field_threshold_time(thr)
    if t_star is not None:
        assert traj.times[0] <= t_star <= traj.times[-1]
    assert traj.field_threshold_time(1e9) is None


def _toy_snap(eps=0.2, d=2):
    rng = np.random.default_rng(0)
    n_x, n_v = 8, 12
    v_axis = np.linspace(-3.0, 3.0, n_v)
    shape = (n_x,) + (n_v,) * d
    return FullSnapshot(time=1.5, eps=eps, length=L, v_axis=v_axis,
                        f=rng.normal(size=shape),
                        E=rng.normal(size=(n_x, d)), B=rng.normal(size=n_x))


def test_rescale_velocity_roundtrip():
    s = _toy_snap()
    back = rescale_velocity(rescale_velocity(s, 2.0), 0.5)
    assert_allclose(back.f, s.f, rtol=1e-14)
    assert_allclose(back.v_axis, s.v_axis, rtol=1e-14)
    assert_allclose(back.E, s.E, rtol=1e-14)
    assert back.eps == pytest.approx(s.eps)
    assert back.time == pytest.approx(s.time)


def test_rescale_spacetime_roundtrip():
    s = _toy_snap()
    back = rescale_spacetime(rescale_spacetime(s, 2.0), 0.5)
    assert_allclose(back.f, s.f, rtol=1e-14)
    assert_allclose(back.B, s.B, rtol=1e-14)
    assert back.length == pytest.approx(s.length)
    assert back.eps == pytest.approx(s.eps)


def test_rescale_parameter_maps():
    s = _toy_snap(eps=0.2)
    assert rescale_velocity(s, 2.0).eps == pytest.approx(0.1)
    assert rescale_spacetime(s, 2.0).eps == pytest.approx(0.4)
    with pytest.raises(ValueError):
        rescale_velocity(s, -1.0)
    with pytest.raises(ValueError):
        rescale_spacetime(s, 0.0)


def test_full_snapshots_requires_store_last3():
    cfg = _vm_cfg(t_final=0.2)
    traj = vm_run(cfg)
    with pytest.raises(ValueError):
        full_snapshots(traj, cfg)


def test_system_residual_needs_three_equispaced():
    s = _toy_snap()
    with pytest.raises(ValueError):
        system_residual([s, s])
