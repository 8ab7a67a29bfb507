"""Fourier-space field operators on the periodic box.

Poisson solve, Leray projection, the shifted Helmholtz operator
-Delta_eps = -Delta + eps^2 lambda, an exact per-mode variation-of-constants
integrator for the vector-potential wave equation (the wave speed is 1/eps,
so any CFL-bound scheme would be crushed as eps -> 0), and the inductive
elliptic hierarchy of vector potentials A_1..A_N driven by high-order
velocity moments.

All hierarchy operators are diagonal per Fourier mode in the transverse
(second-component) reduction, so composition is per-mode scalar algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .equilibria import moment_constants


def _kappa(n_x, length):
    return 2.0 * np.pi * np.fft.fftfreq(n_x, d=length / n_x)


def d_dx(arr, length, axis=0):
    """Spectral x-derivative along the given axis."""
    n = arr.shape[axis]
    kap = _kappa(n, length)
    shape = [1] * arr.ndim
    shape[axis] = n
    out = np.fft.ifft(np.fft.fft(arr, axis=axis) * (1j * kap.reshape(shape)), axis=axis)
    return np.real(out) if np.isrealobj(arr) else out


def poisson_solve(rho, length):
    """phi with -phi'' = rho - <rho>, <phi> = 0 (spectral inverse)."""
    rho = np.asarray(rho)
    kap = _kappa(rho.shape[0], length)
    rh = np.fft.fft(rho)
    ph = np.zeros_like(rh)
    nz = kap != 0.0
    ph[nz] = rh[nz] / kap[nz] ** 2
    out = np.fft.ifft(ph)
    return np.real(out) if np.isrealobj(rho) else out


def leray_project(u, length):
    """Divergence-free projection; 1D in x so only the first component is
    longitudinal: its fluctuations are removed, its mean passes through."""
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    out = u.copy()
    out[:, 0] = u[:, 0].mean()
    return out


def helmholtz_solve(src, eps, lam, length):
    """Per-mode inverse of -Delta_eps = -Delta + eps^2 lambda.

    For eps = 0 the operator is singular on the mean; a nonzero-mean source
    is rejected in that case.
    """
    src = np.asarray(src, dtype=float)
    vec = src.ndim > 1
    if not vec:
        src = src[:, None]
    kap = _kappa(src.shape[0], length)
    denom = kap**2 + eps * eps * lam
    sh = np.fft.fft(src, axis=0)
    if eps == 0.0:
        if np.abs(sh[0]).max() > 1e-10 * max(1.0, np.abs(sh).max()):
            raise ValueError("helmholtz_solve: eps=0 operator is singular on the mean mode")
        sh[0] = 0.0
        denom = denom.copy()
        denom[0] = 1.0
    out = np.real(np.fft.ifft(sh / denom[:, None], axis=0))
    return out if vec else out[:, 0]


@dataclass
class EMState:
    """Electromagnetic state in potential form (Coulomb gauge).

    E = -grad phi - eps dtA, B = curl A; in 1D2V the curl reduces to
    B3 = dx A2 and the gauge forces the fluctuation part of A1 to vanish.
    """

    length: float
    eps: float
    lam: float
    phi: np.ndarray          # (n_x,), zero mean
    A: np.ndarray            # (n_x, d)
    dtA: np.ndarray          # (n_x, d)

    @classmethod
    def zeros(cls, n_x, dim, length, eps, lam):
        return cls(length=length, eps=eps, lam=lam,
                   phi=np.zeros(n_x), A=np.zeros((n_x, dim)), dtA=np.zeros((n_x, dim)))

    def E(self):
        out = -self.eps * self.dtA.copy()
        out[:, 0] -= d_dx(self.phi, self.length)
        return out

    def B(self):
        """Out-of-plane magnetic field (zero array in 1D1V)."""
        if self.A.shape[1] < 2:
            return np.zeros(self.A.shape[0])
        return d_dx(self.A[:, 1], self.length)

    def gauge_residual(self):
        """Max per-mode |div A| (fluctuations of the longitudinal component)."""
        a1h = np.fft.fft(self.A[:, 0]) / self.A.shape[0]
        kap = _kappa(self.A.shape[0], self.length)
        return float(np.abs(kap * a1h).max())

    def gauss_residual(self, rho):
        """Max-norm of div E - (rho - <rho>)."""
        divE = d_dx(self.E()[:, 0], self.length)
        return float(np.abs(divE - (rho - rho.mean())).max())

    def wave_energy(self):
        """Per-mode oscillator energy eps^2|dtA|^2 + (|k|^2+eps^2 lam)|A|^2."""
        n = self.A.shape[0]
        kap = _kappa(n, self.length)
        ah = np.fft.fft(self.A, axis=0) / n
        dth = np.fft.fft(self.dtA, axis=0) / n
        w2 = (kap**2 + self.eps**2 * self.lam)[:, None]
        return float(np.sum(self.eps**2 * np.abs(dth) ** 2 + w2 * np.abs(ah) ** 2))


def wave_step(state, source, dt):
    """Exact per-mode advance of eps^2 dt^2 A - Delta A + eps^2 lam A = source,
    with the source held constant over the step.

    Each Fourier mode is a driven harmonic oscillator with frequency
    omega = sqrt(kappa^2 + eps^2 lam)/eps (the mean mode has omega^2 = lam);
    the update is the closed-form variation-of-constants formula, so the
    stiffness in eps never enters a stability constraint.
    """
    eps = state.eps
    if eps <= 0:
        raise ValueError("wave_step requires eps > 0")
    n = state.A.shape[0]
    kap = _kappa(n, state.length)
    w2 = (kap**2 + eps * eps * state.lam)[:, None] / (eps * eps)
    ah = np.fft.fft(state.A, axis=0)
    dth = np.fft.fft(state.dtA, axis=0)
    sh = np.fft.fft(np.asarray(source, dtype=float), axis=0)
    zero = w2 <= 1e-14 * max(1.0, float(w2.max()))
    w = np.sqrt(np.where(zero, 1.0, w2))
    part = sh / np.where(zero, 1.0, eps * eps * w2)   # particular (static) solution
    c, s = np.cos(w * dt), np.sin(w * dt)
    ah_new = part + (ah - part) * c + dth * s / w
    dth_new = -w * (ah - part) * s + dth * c
    # omega -> 0 limit: free drift plus uniformly accelerated source response
    acc = sh / (eps * eps)
    ah_new = np.where(zero, ah + dth * dt + 0.5 * acc * dt * dt, ah_new)
    dth_new = np.where(zero, dth + acc * dt, dth_new)
    return replace(state,
                   A=np.real(np.fft.ifft(ah_new, axis=0)),
                   dtA=np.real(np.fft.ifft(dth_new, axis=0)))


@dataclass(frozen=True)
class DarwinHierarchy:
    """Per-mode multiplier tables of the inductive elliptic hierarchy.

    d_k[k] is the symbol of -Delta_{eps,k} (k = 1..N, with -Delta_{eps,1} =
    -Delta_eps); s_sym[j] the symbol of S_j; S_kj[(k, j)] the recursion
    outputs (S_{1,1} = -Id).  All symbols are real scalars per mode in the
    transverse reduction.
    """

    N: int
    eps: float
    lam: float
    n_x: int
    length: float
    kappa: np.ndarray
    s_sym: dict
    S_kj: dict
    d_k: dict

    def export_rows(self):
        """Rows (table, level_k, level_j, mode, value) for CSV export."""
        rows = []
        for k in sorted(self.d_k):
            for m, val in enumerate(self.d_k[k]):
                rows.append(("neg_delta_eps_k", k, "", m, val))
        for j in sorted(self.s_sym):
            for m, val in enumerate(self.s_sym[j]):
                rows.append(("S_j", "", j, m, val))
        for (k, j) in sorted(self.S_kj):
            for m, val in enumerate(self.S_kj[(k, j)]):
                rows.append(("S_kj", k, j, m, val))
        return rows


def build_hierarchy(eq, eps, N, grid):
    """Assemble the per-mode symbol tables for the order-N hierarchy.

    Requires eps > 0 (the shifted Laplacian degenerates on the mean at
    eps = 0) and a radial equilibrium (the transverse moment symbols involve
    mu'(|v|^2)).  The S_j symbols are quadratures of
        2 mu'(|v|^2) v2^2 (1+eps^2|v|^2)^(-1/2) (i vhat1 kappa)^(2j)
    divided by (kappa^2 + eps^2 lam)^j; the S_{k,j} and -Delta_{eps,k} tables
    follow the inductive recursion whose base cases are S_{1,1} = -Id,
    -Delta_{eps,1} = -Delta_eps.
    """
    if eps <= 0:
        raise ValueError("hierarchy requires eps > 0")
    if N < 1:
        raise ValueError("N must be >= 1")
    if not eq.is_radial:
        raise ValueError("hierarchy requires a radial equilibrium")
    if eq.dim_v != 2:
        raise ValueError("hierarchy is implemented in the 1D2V transverse reduction")
    consts = moment_constants(eq, eps)
    lam = consts.lam
    kap = _kappa(grid.n_x, grid.length)
    d1 = kap**2 + eps * eps * lam

    V = eq.velocity_nodes()
    W = eq.quad_weights()
    r2 = np.sum(V * V, axis=-1)
    vhat1 = V[..., 0] / np.sqrt(1.0 + eps * eps * r2)
    base = 2.0 * eq.dmu_dr2(r2) * V[..., 1] ** 2 / np.sqrt(1.0 + eps * eps * r2)
    s_sym = {}
    for j in range(1, N + 1):
        integral = float(np.sum(W * base * vhat1 ** (2 * j)))
        s_sym[j] = (-1.0) ** j * kap ** (2 * j) / d1**j * integral

    ones = np.ones_like(kap)
    S_kj = {(1, 1): -ones}
    d_k = {1: d1.copy()}
    for k in range(1, N):
        # -Delta_{eps,k+1} = -Delta_{eps,k} - eps^(2k+2) sum_j S_{k,j} S_j
        corr = np.zeros_like(kap)
        for j in range(1, k + 1):
            corr += S_kj[(k, j)] * s_sym[j]
        d_next = d_k[k] - eps ** (2 * k + 2) * corr
        if np.abs(d_next).min() < 1e-10:
            raise ValueError(f"hierarchy assembly failed: -Delta_eps,{k+1} "
                             "not invertible on some mode")
        d_k[k + 1] = d_next
        for j in range(1, k + 2):
            lead = -S_kj[(k, j - 1)] if j >= 2 else np.zeros_like(kap)
            acc = np.zeros_like(kap)
            for i in range(1, k + 1):
                for ell in range(j, k + 1):
                    acc += eps ** (2 * ell) * S_kj[(k, i)] * s_sym[i] * S_kj[(ell, j)]
            S_kj[(k + 1, j)] = lead + acc / d_next
    return DarwinHierarchy(N=N, eps=eps, lam=lam, n_x=grid.n_x, length=grid.length,
                           kappa=kap, s_sym=s_sym, S_kj=S_kj, d_k=d_k)


def twisted_moment(moments, j):
    """Transverse twisted moment q_j(x) = integral vhat2 vhat1^(2j) g dv,
    read off the symmetric m_{2j+1} tensor."""
    arr = moments.m[2 * j + 1]
    idx = (slice(None), 1) + (0,) * (2 * j)
    return arr[idx]


def darwin_potentials(h, moments):
    """Potentials A_1..A_N from a MomentSet of the shifted distribution g.

    A_1 solves -Delta_eps A_1 = eps * P jhat(g) (mean of j removed); higher
    orders follow the induction
        A_{k+1} = eps^(2k+1) (-Delta_{eps,k+1})^{-1}
                  sum_j S_{k,j} [ M_j(g) + eps S_j sum_l A_l ]
    with M_j(g) the transverse twisted-moment operator.  Each A_j is
    divergence-free with zero mean; returned as (n_x, 2) real arrays.
    """
    eps = h.eps
    n = h.n_x
    jg = moments.j
    j2h = np.fft.fft(jg[:, 1])
    j2h[0] = 0.0                        # mean of j removed; <A_1> = 0
    a_hats = [eps * j2h / h.d_k[1]]
    if h.N >= 2:
        mj_hat = {}
        for j in range(1, h.N):
            qh = np.fft.fft(twisted_moment(moments, j))
            mj_hat[j] = (-1.0) ** j * h.kappa ** (2 * j) / h.d_k[1] ** j * qh
        for k in range(1, h.N):
            a_sum = np.sum(a_hats, axis=0)
            acc = np.zeros(n, dtype=complex)
            for j in range(1, k + 1):
                acc += h.S_kj[(k, j)] * (mj_hat[j] + eps * h.s_sym[j] * a_sum)
            a_hats.append(eps ** (2 * k + 1) * acc / h.d_k[k + 1])
    out = []
    for ah in a_hats:
        A = np.zeros((n, 2))
        A[:, 1] = np.real(np.fft.ifft(ah))
        out.append(A)
    return out
