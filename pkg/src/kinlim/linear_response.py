"""Closed Volterra equation for the density of the linearized system.

Each spatial Fourier mode of the density of the linearized (free-transport)
dynamics satisfies a Volterra equation of the second kind

    rho_k(t) + integral_0^t K(k, t-s) rho_k(s) ds = S_k(t),

where S_k is the free streaming of the initial perturbation and the kernel's
Laplace transform at z = gamma + i tau equals symbol(gamma, tau, k) - 1 (the
duality contract with the dispersion-symbol module; the sign convention here
is fixed by that contract).  At eps = 0 the kernel has the closed form
K(k, tau) = tau * M(kappa tau) with M the unnormalized transform of the 1D
marginal of mu along k; for eps > 0 it is the same relativistic reduction
used by the symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .penrose import PenroseSymbol, _relativistic_kernel
from .phase_space import rel_velocity


def volterra_kernel(eq, eps, k, tau, length=2.0 * np.pi):
    """Kernel K(k, tau) of the per-mode density equation; kernel(k, 0) = 0
    and the decay in tau follows the marginal transform of mu."""
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    if not np.any(k_arr):
        raise ValueError("k = 0 excluded")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    kappa = 2.0 * np.pi * float(np.linalg.norm(k_arr)) / length
    direction = k_arr / np.linalg.norm(k_arr)
    if eps == 0.0:
        M = eq.marginal_transform(kappa * tau, direction if eq.dim_v > 1 else None)
        out = tau * M
        return np.real(out) if eq.is_even else out
    return _relativistic_kernel(eq, eps, kappa, tau, direction)


def free_streaming_source(eq, eps, k, h_values, t, length=2.0 * np.pi):
    """S_k(t) = integral h(v) e^{-i kappa vhat_par t} dv for the k-th mode of
    an initial perturbation with velocity profile h sampled on eq's grid."""
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    kappa = 2.0 * np.pi * float(np.linalg.norm(k_arr)) / length
    t = np.asarray(t, dtype=float)
    if eq.dim_v == 1:
        v = eq.v_axes[0]
        w = eq.quad_weights_1d
        h = np.asarray(h_values).ravel()
        r2 = v * v
    else:
        e = k_arr / np.linalg.norm(k_arr)
        V = eq.velocity_nodes().reshape(-1, eq.dim_v)
        w = eq.quad_weights().ravel()
        h = np.asarray(h_values).ravel()
        v = V @ e
        r2 = np.sum(V * V, axis=1)
    vhat = v / np.sqrt(1.0 + eps * eps * r2)
    phase = np.exp(-1j * kappa * np.multiply.outer(t, vhat))
    return phase @ (w * h)


@dataclass
class VolterraProblem:
    """Sampled per-mode Volterra problem rho + K*rho = S on [0, T].

    kernel[n] = K(k, n dt), source[n] = S(n dt); the convolution uses the
    same uniform grid (trapezoid marching, order 2).
    """

    k: tuple
    kernel: np.ndarray
    source: np.ndarray
    dt: float
    T: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if len(self.kernel) != len(self.source):
            raise ValueError("kernel and source must share the time grid")


def make_problem(eq, eps, k, h_values, dt, T, length=2.0 * np.pi):
    """Assemble the Volterra problem for one mode of an initial perturbation
    f0(x, v) = cos(kappa x) h(v) (unit amplitude; the equation is linear)."""
    n = int(round(T / dt)) + 1
    t = dt * np.arange(n)
    ker = volterra_kernel(eq, eps, k, t, length=length)
    src = free_streaming_source(eq, eps, k, h_values, t, length=length)
    k_t = tuple(np.atleast_1d(k).tolist())
    return VolterraProblem(k=k_t, kernel=np.asarray(ker), source=np.asarray(src),
                           dt=dt, T=float(t[-1]))


def volterra_solve(p):
    """March the Volterra equation with the trapezoid rule; returns rho on
    the same time grid as the inputs."""
    n = len(p.source)
    dtype = np.result_type(p.kernel.dtype, p.source.dtype, float)
    rho = np.zeros(n, dtype=dtype)
    rho[0] = p.source[0]
    K = p.kernel
    dt = p.dt
    denom = 1.0 + 0.5 * dt * K[0]
    for m in range(1, n):
        # trapezoid over [0, t_m] with the unknown rho[m] isolated
        conv = 0.5 * K[m] * rho[0] + np.dot(K[m - 1:0:-1], rho[1:m])
        rho[m] = (p.source[m] - dt * conv) / denom
    return rho


def volterra_residual(p, rho):
    """Max residual of the integral equation on a returned series."""
    n = len(rho)
    dt = p.dt
    res = 0.0
    for m in range(n):
        if m == 0:
            conv = 0.0          # integral over the empty interval [0, 0]
        else:
            w = np.ones(m + 1)
            w[0] = w[-1] = 0.5
            conv = dt * np.dot(w * p.kernel[m::-1], rho[:m + 1])
        res = max(res, abs(rho[m] + conv - p.source[m]))
    return res


def extract_rate(series, t, window=None):
    """Complex rate a + ib fitted on a window: |series| ~ e^{at} (log-envelope
    least squares) and phase ~ bt (unwrapped-phase least squares).

    Raises on a degenerate (flat or vanishing) signal.
    """
    series = np.asarray(series)
    t = np.asarray(t, dtype=float)
    if window is None:
        mask = np.ones(len(t), dtype=bool)
    else:
        mask = (t >= window[0]) & (t <= window[1])
    if mask.sum() < 4:
        raise ValueError("window too short for a rate fit")
    ts = t[mask]
    ys = series[mask]
    amp = np.abs(ys)
    if amp.min() <= 0:
        raise ValueError("degenerate fit: signal vanishes on the window")
    loga = np.log(amp)
    phase = np.unwrap(np.angle(ys.astype(complex)))
    if np.ptp(loga) < 1e-12 and np.ptp(phase) < 1e-12:
        raise ValueError("degenerate fit: flat signal on the window")
    a = np.polyfit(ts, loga, 1)[0]
    b = np.polyfit(ts, phase, 1)[0]
    return complex(a, b)
