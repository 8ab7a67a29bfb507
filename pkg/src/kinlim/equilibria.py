"""Homogeneous velocity equilibria and their moment constants.

An equilibrium is a normalized profile mu(v) on R^d (d = 1, 2 or 3) given by an
analytic descriptor, together with a uniform tensor-product quadrature grid on
[-v_max, v_max]^d.  The analytic side provides exact pointwise values,
gradients and Fourier transforms; the sampled side feeds moment deposition and
the field-equation constants.

Supported descriptors:

``maxwellian``
    mu(v) = (2 pi sigma^2)^(-d/2) exp(-|v|^2 / (2 sigma^2)); radial.
``two_stream``
    symmetric double Maxwellian along the first axis,
    0.5*(M(v1-u) + M(v1+u)) times unit Maxwellians transversally; even.
``bump_on_tail``
    (1-nb)*M_{sigma_c}(v1) + nb*M_{sigma_b}(v1-u) along the first axis,
    unit Maxwellians transversally; not even (carries a tail drift).
``anisotropic_product``
    product of centered Maxwellians with per-axis widths; even, not radial.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_SUPPORTED = ("maxwellian", "two_stream", "bump_on_tail", "anisotropic_product")


def _gauss(x, sigma):
    return np.exp(-x * x / (2.0 * sigma * sigma)) / (np.sqrt(2.0 * np.pi) * sigma)


def _gauss_hat(xi, sigma):
    # unnormalized transform of _gauss: integral of mu1 e^{-i xi v} dv
    return np.exp(-(sigma * xi) ** 2 / 2.0)


@dataclass(frozen=True)
class Equilibrium:
    """Analytic + sampled representation of a homogeneous equilibrium mu(v)."""

    kind: str
    params: dict
    dim_v: int
    n_v: int
    v_max: float
    v_axes: tuple = field(repr=False, default=())
    values: np.ndarray = field(repr=False, default=None)

    # -- analytic side -----------------------------------------------------

    def _axis_profiles(self, w, axis):
        """1D factor of mu along the given axis, evaluated at w."""
        p = self.params
        if self.kind == "maxwellian":
            return _gauss(w, p["sigma"])
        if self.kind == "two_stream":
            if axis == 0:
                return 0.5 * (_gauss(w - p["u"], p["sigma"]) + _gauss(w + p["u"], p["sigma"]))
            return _gauss(w, 1.0)
        if self.kind == "bump_on_tail":
            if axis == 0:
                nb = p["nb"]
                return (1.0 - nb) * _gauss(w, p["sigma_c"]) + nb * _gauss(w - p["u"], p["sigma_b"])
            return _gauss(w, 1.0)
        if self.kind == "anisotropic_product":
            return _gauss(w, p["sigmas"][axis])
        raise ValueError(f"unknown equilibrium kind {self.kind!r}")

    def _axis_profile_derivs(self, w, axis):
        """d/dw of the 1D factor along the given axis."""
        p = self.params
        if self.kind == "maxwellian":
            s = p["sigma"]
            return -w / s**2 * _gauss(w, s)
        if self.kind == "two_stream":
            if axis == 0:
                s, u = p["sigma"], p["u"]
                return 0.5 * (-(w - u) / s**2 * _gauss(w - u, s)
                              - (w + u) / s**2 * _gauss(w + u, s))
            return -w * _gauss(w, 1.0)
        if self.kind == "bump_on_tail":
            if axis == 0:
                nb, sc, sb, u = p["nb"], p["sigma_c"], p["sigma_b"], p["u"]
                return (-(1.0 - nb) * w / sc**2 * _gauss(w, sc)
                        - nb * (w - u) / sb**2 * _gauss(w - u, sb))
            return -w * _gauss(w, 1.0)
        if self.kind == "anisotropic_product":
            s = p["sigmas"][axis]
            return -w / s**2 * _gauss(w, s)
        raise ValueError(f"unknown equilibrium kind {self.kind!r}")

    def _axis_transforms(self, xi, axis):
        """Unnormalized transform of the 1D factor: integral mu_a e^{-i xi w} dw."""
        p = self.params
        if self.kind == "maxwellian":
            return _gauss_hat(xi, p["sigma"]) + 0.0j
        if self.kind == "two_stream":
            if axis == 0:
                return np.cos(p["u"] * xi) * _gauss_hat(xi, p["sigma"]) + 0.0j
            return _gauss_hat(xi, 1.0) + 0.0j
        if self.kind == "bump_on_tail":
            if axis == 0:
                nb = p["nb"]
                return ((1.0 - nb) * _gauss_hat(xi, p["sigma_c"])
                        + nb * np.exp(-1j * p["u"] * xi) * _gauss_hat(xi, p["sigma_b"]))
            return _gauss_hat(xi, 1.0) + 0.0j
        if self.kind == "anisotropic_product":
            return _gauss_hat(xi, p["sigmas"][axis]) + 0.0j
        raise ValueError(f"unknown equilibrium kind {self.kind!r}")

    @property
    def is_radial(self):
        if self.kind == "maxwellian":
            return True
        if self.kind == "anisotropic_product":
            s = self.params["sigmas"]
            return all(abs(si - s[0]) < 1e-14 for si in s)
        return False

    @property
    def is_even(self):
        return self.kind != "bump_on_tail"

    def eval_mu(self, v):
        """mu at velocity point(s) v; last axis indexes components if dim_v > 1."""
        v = np.asarray(v, dtype=float)
        if self.dim_v == 1:
            return self._axis_profiles(v, 0)
        out = np.ones(v.shape[:-1])
        for a in range(self.dim_v):
            out = out * self._axis_profiles(v[..., a], a)
        return out

    def grad_mu(self, v):
        """Analytic gradient of mu; shape v.shape (+ trailing component axis)."""
        v = np.asarray(v, dtype=float)
        if self.dim_v == 1:
            return self._axis_profile_derivs(v, 0)
        factors = [self._axis_profiles(v[..., a], a) for a in range(self.dim_v)]
        derivs = [self._axis_profile_derivs(v[..., a], a) for a in range(self.dim_v)]
        out = np.empty(v.shape)
        for a in range(self.dim_v):
            g = derivs[a]
            for b in range(self.dim_v):
                if b != a:
                    g = g * factors[b]
            out[..., a] = g
        return out

    def dmu_dr2(self, r2):
        """mu'(|v|^2) for radial equilibria (mu written as a function of |v|^2)."""
        if not self.is_radial:
            raise ValueError("dmu_dr2 requires a radial equilibrium")
        sigma = self.params["sigma"] if self.kind == "maxwellian" else self.params["sigmas"][0]
        r2 = np.asarray(r2, dtype=float)
        norm = (2.0 * np.pi * sigma**2) ** (-self.dim_v / 2.0)
        return -norm * np.exp(-r2 / (2.0 * sigma**2)) / (2.0 * sigma**2)

    def fourier_mu(self, xi):
        """mu_hat(xi) with the (2 pi)^(-d) convention; conjugate-symmetric."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.shape[-1] != self.dim_v and self.dim_v == 1:
            xi = xi[..., None]
        out = np.ones(xi.shape[:-1], dtype=complex)
        for a in range(self.dim_v):
            out = out * self._axis_transforms(xi[..., a], a)
        out = out / (2.0 * np.pi) ** self.dim_v
        return out if out.shape else complex(out)

    def marginal_transform(self, xi, direction=None):
        """Unnormalized transform of the 1D marginal of mu along a unit vector.

        Returns M(xi) = integral of mu1(w) e^{-i xi w} dw where mu1 is the
        marginal of mu along `direction` (default: first axis).  This is the
        quantity probed by the dispersion symbol along a wavevector.
        """
        xi = np.asarray(xi, dtype=float)
        if direction is None:
            e = np.zeros(self.dim_v)
            e[0] = 1.0
        else:
            e = np.asarray(direction, dtype=float)
            e = e / np.linalg.norm(e)
        if self.kind in ("maxwellian", "anisotropic_product"):
            sig = (self.params["sigma"] if self.kind == "maxwellian"
                   else np.sqrt(sum((self.params["sigmas"][a] * e[a]) ** 2
                                    for a in range(self.dim_v))))
            return _gauss_hat(xi, sig) + 0.0j
        # two_stream / bump_on_tail: product structure only along grid axes
        out = np.ones(xi.shape, dtype=complex)
        for a in range(self.dim_v):
            if abs(e[a]) > 1e-14:
                out = out * self._axis_transforms(xi * e[a], a)
        return out

    # -- sampled side ------------------------------------------------------

    @property
    def quad_weights_1d(self):
        """Trapezoid weights per axis (all axes share the same grid)."""
        w = np.full(self.n_v, self.v_axes[0][1] - self.v_axes[0][0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def velocity_nodes(self):
        """Tensor grid of velocity nodes, shape (n_v,)*d + (d,)."""
        grids = np.meshgrid(*self.v_axes, indexing="ij")
        return np.stack(grids, axis=-1)

    def quad_weights(self):
        """Tensor-product trapezoid weights, shape (n_v,)*d."""
        w1 = self.quad_weights_1d
        w = w1
        for _ in range(self.dim_v - 1):
            w = np.multiply.outer(w, w1)
        return w


def equilibrium(kind, dim_v=1, n_v=256, v_max=None, **params):
    """Construct an :class:`Equilibrium` from an analytic descriptor.

    v_max defaults to 8 widths beyond the largest feature of the profile.
    """
    if kind not in _SUPPORTED:
        raise ValueError(f"unsupported equilibrium kind {kind!r}")
    if kind == "maxwellian":
        params.setdefault("sigma", 1.0)
        spread = 8.0 * params["sigma"]
    elif kind == "two_stream":
        params.setdefault("sigma", 1.0)
        spread = abs(params["u"]) + 8.0 * params["sigma"]
    elif kind == "bump_on_tail":
        params.setdefault("nb", 0.1)
        params.setdefault("sigma_c", 1.0)
        params.setdefault("sigma_b", 0.5)
        spread = max(8.0 * params["sigma_c"], abs(params["u"]) + 8.0 * params["sigma_b"])
    else:
        sigmas = list(params["sigmas"])
        if len(sigmas) != dim_v:
            raise ValueError("anisotropic_product needs one sigma per velocity dim")
        params["sigmas"] = sigmas
        spread = 8.0 * max(sigmas)
    if v_max is None:
        v_max = float(np.ceil(spread))
    axes = tuple(np.linspace(-v_max, v_max, n_v) for _ in range(dim_v))
    eq = Equilibrium(kind=kind, params=params, dim_v=dim_v, n_v=n_v,
                     v_max=float(v_max), v_axes=axes)
    values = eq.eval_mu(eq.velocity_nodes() if dim_v > 1 else axes[0])
    object.__setattr__(eq, "values", values)
    return eq


@dataclass(frozen=True)
class MomentConstants:
    """epsilon-dependent constants entering the field equations.

    lam is the scalar current-shift constant (for radial equilibria the matrix
    lam_matrix is lam * Id); lam_tilde and phi_matrix enter the general
    (non-radial) shift identity
        j(f) = j(g) - eps*lam_tilde*A + eps^3 * (phi_matrix - tr(phi_matrix) Id) A,
    which reduces to j(f) = j(g) - eps*lam*A in the radial case.
    """

    eps: float
    lam: float
    lam_tilde: float
    phi_matrix: np.ndarray
    lam_matrix: np.ndarray

    def shift_coefficient(self):
        """Matrix C with j(f) = j(g) - eps * C A."""
        return self.lam_matrix


def moment_constants(eq, eps):
    """Compute lambda(mu, eps), lambda-tilde, and the phi matrix by quadrature."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    d = eq.dim_v
    V = eq.velocity_nodes() if d > 1 else eq.v_axes[0][..., None]
    W = eq.quad_weights()
    mu = eq.values
    r2 = np.sum(V * V, axis=-1)
    fac12 = (1.0 + eps * eps * r2) ** -0.5
    fac32 = (1.0 + eps * eps * r2) ** -1.5
    lam_tilde = float(np.sum(W * mu * fac32))
    half = float(np.sum(W * mu * fac12))
    phi = np.empty((d, d))
    for i in range(d):
        for j in range(d):
            phi[i, j] = np.sum(W * mu * V[..., i] * V[..., j] * fac32)
    lam_matrix = half * np.eye(d) - eps * eps * phi
    lam = float(np.trace(lam_matrix) / d)
    return MomentConstants(eps=float(eps), lam=lam, lam_tilde=lam_tilde,
                           phi_matrix=phi, lam_matrix=lam_matrix)
