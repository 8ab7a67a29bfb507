"""Plasma dispersion symbol, stability margin, and dispersion roots.

The stability symbol along a wavevector k and a right-half-plane Laplace
variable z = gamma + i tau is

    Phi(z, k) = 1 + integral_0^inf e^{-z s} w_k(s) ds

where, in the classical case (eps = 0), w_k(s) = s M(|k| s) with M the
unnormalized transform of the 1D marginal of mu along k/|k|; in the
relativistic case w_k is the per-mode kernel
    w_k(s) = -(i/|k|) integral e^{-i |k| vhat_par s} d_{v_par} mu dv,
which reduces to the classical form at eps = 0.  The equilibrium is stable
in the Penrose sense when inf |Phi| over gamma > 0, tau real, k != 0 is
positive; instability is certified by an argument-principle winding count on
a right-half-plane rectangle plus Newton refinement of the root.

For Gaussian-decay equilibria the truncated Laplace integral converges for
every complex z (the kernel decays like a Gaussian in s), so the same
quadrature evaluates the analytic continuation into gamma < 0 and yields
Landau damping rates.  Roots are reported as frequencies omega = i z, so a
density mode behaves like e^{-i omega t}: Im omega > 0 means growth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class DispersionRoot:
    k: tuple
    omega: complex
    residual: float


@dataclass(frozen=True)
class StabilityReport:
    margin: float
    k_worst: tuple
    classification: str           # stable | unstable | marginal
    roots: list
    samples: list = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class PenroseSymbol:
    """Evaluator of the dispersion symbol for one equilibrium.

    length sets the mode-to-wavenumber map kappa = 2 pi m / length for
    integer wavevectors; s_max is chosen from the Gaussian decay of the
    kernel (|M(kappa s_max)| s_max < 1e-12) and enlarged as needed when
    continuing to gamma < 0.
    """

    eq: object
    eps: float = 0.0
    length: float = 2.0 * np.pi
    s_max: float = None
    n_s: int = 4096
    gamma_min: float = 1e-3

    def kappa_of(self, k):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        return 2.0 * np.pi * float(np.linalg.norm(k)) / self.length

    def direction_of(self, k):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        return k / np.linalg.norm(k)

    def _auto_smax(self, kappa, gamma_floor=0.0):
        """Truncation with |M(kappa s)| s below 1e-12, shifted to beat
        e^{|gamma| s} when continuing left of the axis."""
        s = 1.0
        for _ in range(200):
            tail = abs(self._marginal_M(kappa * s)) * max(s, 1.0) * np.exp(gamma_floor * s)
            if tail < 1e-12:
                return s
            s *= 1.25
        return s

    def _marginal_M(self, xi, k=None):
        direction = None if k is None else self.direction_of(k)
        return self.eq.marginal_transform(np.asarray(xi, dtype=float), direction)

    def kernel(self, k, s):
        """w_k(s); real for even equilibria at eps = 0, complex in general."""
        if not np.any(np.atleast_1d(k)):
            raise ValueError("k = 0 excluded from the dispersion symbol")
        kappa = self.kappa_of(k)
        s = np.asarray(s, dtype=float)
        if self.eps == 0.0:
            return s * self._marginal_M(kappa * s, k)
        return _relativistic_kernel(self.eq, self.eps, kappa, s, self.direction_of(k))

    def _laplace(self, k, z, gamma_floor=0.0):
        """integral_0^{s_max} e^{-z s} w_k(s) ds, composite trapezoid."""
        kappa = self.kappa_of(k)
        smax = self.s_max if self.s_max is not None else self._auto_smax(kappa, gamma_floor)
        s = np.linspace(0.0, smax, self.n_s)
        w = self.kernel(k, s)
        z_in = np.asarray(z, dtype=complex)
        z = np.atleast_1d(z_in).ravel()
        vals = np.empty(z.shape, dtype=complex)
        for lo in range(0, z.size, 512):      # chunked: bounds the exp() workspace
            blk = z[lo:lo + 512]
            vals[lo:lo + 512] = _trapz(np.exp(-np.multiply.outer(blk, s)) * w[None, :],
                                       s, axis=1)
        return vals.reshape(z_in.shape) if z_in.ndim else vals[0]

    def dlaplace_dz(self, k, z, gamma_floor=0.0):
        kappa = self.kappa_of(k)
        smax = self.s_max if self.s_max is not None else self._auto_smax(kappa, gamma_floor)
        s = np.linspace(0.0, smax, self.n_s)
        w = self.kernel(k, s)
        return _trapz(-s * np.exp(-z * s) * w, s)


def symbol(ps, gamma, tau, k):
    """Dispersion symbol Phi(gamma + i tau, k); requires gamma > 0, k != 0."""
    if np.any(np.asarray(gamma) <= 0):
        raise ValueError("symbol is defined for gamma > 0; use dispersion_roots "
                         "for the analytic continuation")
    z = np.asarray(gamma, dtype=float) + 1j * np.asarray(tau, dtype=float)
    return 1.0 + ps._laplace(k, z)


def _symbol_continued(ps, k, z):
    """Analytic continuation of the symbol (any z, Gaussian-decay kernels)."""
    floor = max(0.0, float(-np.min(np.real(np.atleast_1d(z)))))
    return 1.0 + ps._laplace(k, z, gamma_floor=floor)


def _winding_number(ps, k, gamma_max=2.0, tau_max=10.0, n_edge=400):
    """Zeros of the symbol inside [gamma_min, gamma_max] x [-tau_max, tau_max]
    by the argument principle along the rectangle boundary."""
    g0, g1, t1 = ps.gamma_min, gamma_max, tau_max
    edges = [
        np.linspace(g0 - 1j * t1, g1 - 1j * t1, n_edge),
        np.linspace(g1 - 1j * t1, g1 + 1j * t1, n_edge),
        np.linspace(g1 + 1j * t1, g0 + 1j * t1, n_edge),
        np.linspace(g0 + 1j * t1, g0 - 1j * t1, n_edge),
    ]
    total = 0.0
    for e in edges:
        vals = 1.0 + ps._laplace(k, e)
        total += np.sum(np.angle(vals[1:] / vals[:-1]))
    return int(round(total / (2.0 * np.pi)))


def _newton_root(ps, k, z0, tol=1e-11, maxit=60):
    z = complex(z0)
    for _ in range(maxit):
        val = _symbol_continued(ps, k, z)
        dval = ps.dlaplace_dz(k, z, gamma_floor=max(0.0, -z.real))
        if dval == 0:
            break
        step = val / dval
        z = z - step
        if abs(step) < tol:
            break
    res = abs(_symbol_continued(ps, k, z))
    return z, res


def dispersion_roots(ps, k, search_gamma=(-1.0, 1.0), search_tau=(-6.0, 6.0),
                     n_grid=41, residual_tol=1e-8):
    """Roots of the analytically continued symbol nearest the real axis.

    Coarse |Phi| scan over the search window, Newton refinement from each
    local minimum, deduplication.  Roots are returned as omega = i z sorted
    by |Im omega| (closest to marginal first); only roots with residual
    below residual_tol are kept.
    """
    if not np.any(np.atleast_1d(k)):
        raise ValueError("k = 0 excluded")
    gam = np.linspace(search_gamma[0], search_gamma[1], n_grid)
    tau = np.linspace(search_tau[0], search_tau[1], n_grid)
    Z = gam[:, None] + 1j * tau[None, :]
    vals = np.abs(_symbol_continued(ps, k, Z.ravel())).reshape(Z.shape)
    roots = []
    for i in range(1, n_grid - 1):
        for jj in range(1, n_grid - 1):
            patch = vals[i - 1:i + 2, jj - 1:jj + 2]
            if vals[i, jj] == patch.min() and vals[i, jj] < 0.5:
                z, res = _newton_root(ps, k, Z[i, jj])
                if res < residual_tol:
                    if not any(abs(z - r[0]) < 1e-6 for r in roots):
                        roots.append((z, res))
    k_t = tuple(np.atleast_1d(k).tolist())
    out = [DispersionRoot(k=k_t, omega=1j * z, residual=res) for z, res in roots]
    out.sort(key=lambda r: abs(r.omega.imag))
    return out


def stability_margin(ps, k_set, gamma_grid=None, tau_grid=None, tol_margin=1e-2):
    """Minimum |symbol| over the scan grid with per-k winding certification.

    classification: 'unstable' iff a right-half-plane root was certified
    (winding count > 0 and a refined root with Im omega > gamma_min);
    'marginal' when the margin dips below tol_margin without a certified
    root; 'stable' otherwise.
    """
    if gamma_grid is None:
        gamma_grid = np.linspace(ps.gamma_min, 2.0, 40)
    if tau_grid is None:
        tau_grid = np.linspace(-10.0, 10.0, 161)
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    tau_grid = np.asarray(tau_grid, dtype=float)
    if gamma_grid.size == 0 or tau_grid.size == 0 or len(k_set) == 0:
        raise ValueError("scan grids must be nonempty")
    if gamma_grid.min() <= 0:
        raise ValueError("gamma grid must be strictly positive")
    margin = np.inf
    k_worst = None
    roots = []
    unstable = False
    samples = []
    for k in k_set:
        Z = gamma_grid[:, None] + 1j * tau_grid[None, :]
        vals = np.abs(1.0 + ps._laplace(k, Z.ravel())).reshape(Z.shape)
        k_t = tuple(np.atleast_1d(k).tolist())
        for gi, g in enumerate(gamma_grid):
            for ti, t in enumerate(tau_grid):
                samples.append((k_t, float(g), float(t), float(vals[gi, ti])))
        kmin = vals.min()
        if kmin < margin:
            margin, k_worst = float(kmin), k_t
        if kmin < tol_margin or _winding_number(ps, k, tau_max=float(np.abs(tau_grid).max())) > 0:
            w = _winding_number(ps, k, tau_max=float(np.abs(tau_grid).max()))
            if w > 0:
                found = dispersion_roots(ps, k, search_gamma=(ps.gamma_min, 2.0),
                                         search_tau=(float(tau_grid.min()), float(tau_grid.max())))
                grow = [r for r in found if r.omega.imag > ps.gamma_min]
                if grow:
                    unstable = True
                    roots.extend(grow)
    if unstable:
        cls = "unstable"
    elif margin < tol_margin:
        cls = "marginal"
    else:
        cls = "stable"
    return StabilityReport(margin=margin, k_worst=k_worst, classification=cls,
                           roots=roots, samples=samples)


def _relativistic_kernel(eq, eps, kappa, s, direction):
    """w_k(s) = -(i/kappa) integral e^{-i kappa vhat_par s} d_par mu dv.

    Implemented by quadrature on the equilibrium's velocity grid; real for
    even mu.  Reduces exactly to s M(kappa s) at eps = 0 (integration by
    parts in v_par).
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d = eq.dim_v
    if d == 1:
        v = eq.v_axes[0]
        w = eq.quad_weights_1d
        dmu = eq.grad_mu(v)
        r2 = v * v
    else:
        e = np.asarray(direction, dtype=float)
        axis = int(np.argmax(np.abs(e)))
        if not (eq.is_radial or abs(abs(e[axis]) - 1.0) < 1e-12):
            raise NotImplementedError("relativistic kernel for non-radial mu "
                                      "needs an axis-aligned wavevector")
        V = eq.velocity_nodes()
        w = eq.quad_weights().ravel()
        grads = eq.grad_mu(V).reshape(-1, d)
        if eq.is_radial and abs(abs(e[axis]) - 1.0) >= 1e-12:
            # rotate so the parallel direction is a coordinate of the grid
            dmu = grads @ e
            Vflat = V.reshape(-1, d)
            v = Vflat @ e
            r2 = np.sum(Vflat * Vflat, axis=1)
        else:
            sgn = np.sign(e[axis])
            dmu = sgn * grads[:, axis]
            Vflat = V.reshape(-1, d)
            v = sgn * Vflat[:, axis]
            r2 = np.sum(Vflat * Vflat, axis=1)
    vhat = v / np.sqrt(1.0 + eps * eps * r2)
    phase = np.exp(-1j * kappa * np.multiply.outer(s, vhat))
    integ = phase * (w * dmu)[None, :]
    vals = -(1j / kappa) * integ.sum(axis=1)
    if eq.is_even:
        vals = np.real(vals)
    return vals if vals.shape[0] > 1 else vals[0]
