"""Phase-space grids, distribution storage, moment deposition, shifted g.

Geometry is 1D in x (periodic box of length L) with 1 or 2 velocity
dimensions.  Distributions are dense arrays f[x-index, v-indices].  Moments
are trapezoid quadratures over the velocity grid; the relativistic velocity
map v -> v/sqrt(1+eps^2|v|^2) enters both transport and deposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

FULL = "full"
PERTURBATION = "perturbation"


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform tensor-product grid on [0,L) x [-v_max, v_max]^d_v."""

    n_x: int
    length: float
    n_v: int
    v_max: float
    dim_v: int = 1

    def __post_init__(self):
        if self.n_x < 8 or (self.n_x & (self.n_x - 1)) != 0:
            raise ValueError("n_x must be a power of two, >= 8")
        if self.n_v < 8:
            raise ValueError("n_v must be >= 8")
        if self.v_max <= 0 or self.length <= 0:
            raise ValueError("v_max and length must be positive")
        if self.dim_v not in (1, 2):
            raise ValueError("dim_v must be 1 or 2")

    @property
    def x(self):
        return np.linspace(0.0, self.length, self.n_x, endpoint=False)

    @property
    def dx(self):
        return self.length / self.n_x

    @property
    def v_axis(self):
        return np.linspace(-self.v_max, self.v_max, self.n_v)

    @property
    def dv(self):
        return 2.0 * self.v_max / (self.n_v - 1)

    @property
    def shape(self):
        return (self.n_x,) + (self.n_v,) * self.dim_v

    def v_nodes(self):
        """Velocity nodes, shape (n_v,)*dim_v + (dim_v,)."""
        axes = [self.v_axis] * self.dim_v
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def v_weights(self):
        """Trapezoid quadrature weights, shape (n_v,)*dim_v."""
        w1 = np.full(self.n_v, self.dv)
        w1[0] *= 0.5
        w1[-1] *= 0.5
        w = w1
        for _ in range(self.dim_v - 1):
            w = np.multiply.outer(w, w1)
        return w

    def kappa(self):
        """Angular wavenumbers of the x-FFT modes."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_x, d=self.dx)


@dataclass
class DistField:
    """Distribution values on a PhaseGrid with a full-f / perturbation tag."""

    grid: PhaseGrid
    values: np.ndarray
    role: str = PERTURBATION

    def __post_init__(self):
        if self.role not in (FULL, PERTURBATION):
            raise ValueError(f"unknown role {self.role!r}")
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid {self.grid.shape}")

    def copy(self):
        return DistField(self.grid, self.values.copy(), self.role)

    def mass(self):
        return float(np.sum(self.values * self.grid.v_weights()) * self.grid.dx)


def rel_velocity(v, eps):
    """Relativistic velocity map v -> v / sqrt(1 + eps^2 |v|^2).

    v may be a scalar, a 1D array of scalar momenta, or an array whose last
    axis holds components; |eps * vhat| <= 1 always.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or eps == 0.0:
        return v / np.sqrt(1.0 + eps * eps * v * v) if v.ndim == 0 else v.copy()
    r2 = v * v if v.ndim == 1 else np.sum(v * v, axis=-1, keepdims=True)
    return v / np.sqrt(1.0 + eps * eps * r2)


@dataclass(frozen=True)
class MomentSet:
    """Velocity moments of a distribution on the x-grid."""

    rho: np.ndarray
    j: np.ndarray                     # (n_x, dim_v)
    m: dict = field(default_factory=dict)    # ell -> (n_x,) + (dim_v,)*ell
    means: dict = field(default_factory=dict)


def _vhat_products(grid, eps, max_ell):
    """Flattened v-hat monomial tables: level ell -> (dim_v**ell, n_v_total)."""
    d = grid.dim_v
    vh = rel_velocity(grid.v_nodes() if d > 1 else grid.v_axis, eps)
    if d == 1:
        vh = vh[..., None]
    vh = vh.reshape(-1, d).T                       # (d, n_v_total)
    tables = {1: vh}
    for ell in range(2, max_ell + 1):
        prev = tables[ell - 1]                     # (d**(ell-1), nvt)
        tables[ell] = (vh[:, None, :] * prev[None, :, :]).reshape(d**ell, -1)
    return tables


def deposit_moments(f, eps, max_ell=1):
    """Quadrature moments rho, j and (optionally) m_ell for ell = 2..max_ell.

    m_ell[x, i1, ..., i_ell] = integral of vhat_{i1}...vhat_{i_ell} f dv;
    symmetric in its indices by construction.
    """
    if max_ell < 1:
        raise ValueError("max_ell must be >= 1")
    g = f.grid
    d = g.dim_v
    fw = (f.values * g.v_weights()).reshape(g.n_x, -1)
    rho = fw.sum(axis=1)
    tables = _vhat_products(g, eps, max_ell)
    j = fw @ tables[1].T                            # (n_x, d)
    m = {}
    for ell in range(2, max_ell + 1):
        m[ell] = (fw @ tables[ell].T).reshape((g.n_x,) + (d,) * ell)
    means = {"rho": float(rho.mean()), "j": j.mean(axis=0)}
    for ell, arr in m.items():
        means[ell] = arr.mean(axis=0)
    return MomentSet(rho=rho, j=j, m=m, means=means)


def shift_to_g(f, A, eps, eq):
    """Shifted distribution g = f - eps * A(x) . grad_v mu.

    f must be in perturbation role and share its scaling with A (the delta
    factor cancels).  rho(g) = rho(f); the current picks up the shift
    j(f) = j(g) - eps * Lambda A with Lambda from moment_constants.
    """
    if f.role != PERTURBATION:
        raise ValueError("shift_to_g requires a perturbation-role distribution")
    return DistField(f.grid, f.values - _shift_term(f.grid, A, eps, eq), PERTURBATION)


def unshift_from_g(g, A, eps, eq):
    """Inverse of shift_to_g: f = g + eps * A . grad_v mu."""
    if g.role != PERTURBATION:
        raise ValueError("unshift_from_g requires a perturbation-role distribution")
    return DistField(g.grid, g.values + _shift_term(g.grid, A, eps, eq), PERTURBATION)


def _shift_term(grid, A, eps, eq):
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.shape != (grid.n_x, grid.dim_v):
        raise ValueError(f"A must have shape ({grid.n_x}, {grid.dim_v})")
    gmu = eq.grad_mu(grid.v_nodes() if grid.dim_v > 1 else grid.v_axis)
    if grid.dim_v == 1:
        return eps * A[:, 0].reshape(-1, 1) * gmu[None, :]
    x_shape = (grid.n_x,) + (1,) * grid.dim_v
    out = np.zeros(grid.shape)
    for a in range(grid.dim_v):
        out += A[:, a].reshape(x_shape) * gmu[None, ..., a]
    return eps * out


def boundary_leakage(f):
    """Max |f| on the outermost velocity layer (truncation-violation monitor)."""
    v = f.values
    if f.grid.dim_v == 1:
        edge = max(np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max())
    else:
        edge = max(np.abs(v[:, 0, :]).max(), np.abs(v[:, -1, :]).max(),
                   np.abs(v[:, :, 0]).max(), np.abs(v[:, :, -1]).max())
    return float(edge)


def weighted_h_norm(f, n=1, weight_power=0):
    """Sobolev-type diagnostic norm: spectral x-derivatives, finite-difference
    v-derivatives, polynomial velocity weight (1+|v|^2)^(weight_power/2).

    Reporting only; never used inside the update loop.
    """
    g = f.grid
    if n > 2:
        raise ValueError("diagnostic norm implemented for n <= 2 only")
    w = g.v_weights() * g.dx
    if weight_power:
        r2 = (np.sum(g.v_nodes() ** 2, axis=-1) if g.dim_v > 1
              else g.v_axis**2)
        w = w * (1.0 + r2) ** (weight_power / 2.0)
    kap = g.kappa()
    total = 0.0
    fh = np.fft.fft(f.values, axis=0)
    shape = (g.n_x,) + (1,) * g.dim_v
    for ax in range(n + 1):
        dxf = np.real(np.fft.ifft(fh * (1j * kap.reshape(shape)) ** ax, axis=0))
        rem = n - ax
        terms = [dxf]
        for _ in range(rem):
            terms = [np.gradient(t, g.dv, axis=a)
                     for t in terms for a in range(1, 1 + g.dim_v)]
        for t in terms:
            total += float(np.sum(w * t * t))
    return np.sqrt(total)


def bootstrap_norm(times, moment_sets, n=0, grid=None):
    """Cumulative diagnostic norm of a moment history:

    N(t) = ||(rho, j)||_{L^2(0,t;H^n_x)} + sum_ell ||m_ell - <m_ell>||_{L^2(0,t;H^n_x)}

    Returns an array over the time nodes; nonnegative and nondecreasing.
    """
    times = np.asarray(times, dtype=float)
    if len(times) != len(moment_sets):
        raise ValueError("times and moment_sets length mismatch")
    if grid is None:
        raise ValueError("grid required for the spatial norm")
    kap = grid.kappa()

    def hn_sq(field_1d):
        fh = np.fft.fft(field_1d) / grid.n_x
        mult = sum(np.abs(kap) ** (2 * a) for a in range(n + 1))
        return float(np.sum(mult * np.abs(fh) ** 2) * grid.length)

    rhoj = np.empty(len(times))
    ms = np.empty(len(times))
    for i, mom in enumerate(moment_sets):
        s = hn_sq(mom.rho)
        for a in range(mom.j.shape[1]):
            s += hn_sq(mom.j[:, a])
        rhoj[i] = s
        s2 = 0.0
        for ell, arr in mom.m.items():
            flat = arr.reshape(grid.n_x, -1)
            fluct = flat - flat.mean(axis=0)
            for c in range(flat.shape[1]):
                s2 += hn_sq(fluct[:, c])
        ms[i] = s2
    from scipy.integrate import cumulative_trapezoid
    i_rhoj = cumulative_trapezoid(rhoj, times, initial=0.0)
    i_ms = cumulative_trapezoid(ms, times, initial=0.0)
    return np.sqrt(i_rhoj) + np.sqrt(i_ms)
