"""Stationary autocovariance functions (ACVFs) for rough profiles and surfaces.

Four families are provided:

* white noise          r(tau) = variance * delta(tau)
* rotated exponential  r(tau) = variance * exp(-||Lambda^-1 T_phi tau||)
* spectral mixture     r(tau) = sum_q w_q cos(2 pi tau.mu_q) exp(-2 pi^2 tau' Sigma_q tau)
* additive             r(tau) = r_x(tau_x) + r_y(tau_y)

All descriptors are immutable; evaluation is a pure function of the
descriptor and the lag, so instances can be shared freely across threads.
Parameter-domain problems are reported by :func:`is_valid` rather than at
construction time, which lets callers inspect bad configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gpsurf.errors import InvalidKernelError

#: Smallest representable spectral-mixture component variance.  The pure
#: cosine limit produces covariance matrices that stay singular at any grid
#: size, so variances below this floor are rejected.
MIN_MIXTURE_VARIANCE = 1e-12


def _as_float_tuple(values):
    return tuple(float(v) for v in np.atleast_1d(values))


@dataclass(frozen=True)
class WhiteNoiseAcvf:
    """Kronecker-delta covariance with height-squared units.

    ``dim`` fixes the lag dimensionality the descriptor applies to (1 for
    profiles, 2 for surfaces).
    """

    variance: float
    dim: int = 1

    def validate(self):
        problems = []
        if not (math.isfinite(self.variance) and self.variance > 0):
            problems.append("white_noise: variance must be positive and finite")
        if self.dim not in (1, 2):
            problems.append("white_noise: dimension must be 1 or 2")
        return problems

    def value_at_zero(self):
        return float(self.variance)

    def evaluate(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        if self.dim == 2:
            tau = _check_lag_2d(tau)
            at_zero = np.all(tau == 0.0, axis=-1)
        else:
            at_zero = tau == 0.0
        return np.where(at_zero, self.variance, 0.0)


@dataclass(frozen=True)
class ExponentialRotatedAcvf:
    """Anisotropic exponential covariance whose short axis is rotated.

    Lags are first rotated clockwise by ``angle`` (the inverse rotation), so
    the long-lengthscale direction of the covariance, and hence the groove
    direction of sampled surfaces, points along the axis obtained by rotating
    the x-axis counter-clockwise by ``angle``.

    With ``dim=1`` the descriptor degenerates to
    ``variance * exp(-|tau| / lengthscale_a)``; ``lengthscale_b`` and
    ``angle`` are then unused.
    """

    variance: float
    lengthscale_a: float
    lengthscale_b: float
    angle: float
    dim: int = 2

    def validate(self):
        problems = []
        if not (math.isfinite(self.variance) and self.variance > 0):
            problems.append("exponential_rotated: variance must be positive and finite")
        if not (math.isfinite(self.lengthscale_a) and self.lengthscale_a > 0):
            problems.append("exponential_rotated: lengthscale must be positive (lengthscale_a)")
        if not (math.isfinite(self.lengthscale_b) and self.lengthscale_b > 0):
            problems.append("exponential_rotated: lengthscale must be positive (lengthscale_b)")
        if not (math.isfinite(self.angle) and -math.pi <= self.angle < math.pi):
            problems.append("exponential_rotated: angle must lie in [-pi, pi)")
        if self.dim not in (1, 2):
            problems.append("exponential_rotated: dimension must be 1 or 2")
        return problems

    def value_at_zero(self):
        return float(self.variance)

    def evaluate(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        if self.dim == 1:
            return self.variance * np.exp(-np.abs(tau) / self.lengthscale_a)
        tau = _check_lag_2d(tau)
        c = math.cos(self.angle)
        s = math.sin(self.angle)
        ta = (c * tau[..., 0] + s * tau[..., 1]) / self.lengthscale_a
        tb = (-s * tau[..., 0] + c * tau[..., 1]) / self.lengthscale_b
        return self.variance * np.exp(-np.sqrt(ta * ta + tb * tb))


@dataclass(frozen=True)
class SpectralMixtureAcvf:
    """Sum of cosine-modulated Gaussian decays.

    ``means`` and ``variances`` hold one row per component; each row has one
    entry per lag dimension (frequency and squared-frequency units).  The
    matching power spectral density is the symmetrized Gaussian mixture
    returned by :func:`closed_form_psd`.
    """

    weights: tuple
    means: tuple
    variances: tuple

    def __init__(self, weights, means, variances):
        weights = _as_float_tuple(weights)
        means_arr = np.atleast_1d(np.asarray(means, dtype=np.float64))
        vars_arr = np.atleast_1d(np.asarray(variances, dtype=np.float64))
        if means_arr.ndim == 1:
            means_arr = means_arr[:, None]
        if vars_arr.ndim == 1:
            vars_arr = vars_arr[:, None]
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", tuple(map(tuple, means_arr.tolist())))
        object.__setattr__(self, "variances", tuple(map(tuple, vars_arr.tolist())))

    @property
    def q(self):
        return len(self.weights)

    @property
    def dim(self):
        return len(self.means[0]) if self.means else 1

    def _arrays(self):
        return (
            np.asarray(self.weights, dtype=np.float64),
            np.asarray(self.means, dtype=np.float64),
            np.asarray(self.variances, dtype=np.float64),
        )

    def validate(self):
        problems = []
        w, mu, s = self._arrays()
        if w.size < 1:
            problems.append("spectral_mixture: at least one component is required")
            return problems
        if mu.shape != (w.size, self.dim) or s.shape != (w.size, self.dim):
            problems.append("spectral_mixture: weights, means and variances must agree in shape")
            return problems
        if self.dim not in (1, 2):
            problems.append("spectral_mixture: dimension must be 1 or 2")
        if not np.all(np.isfinite(w) & (w > 0)):
            problems.append("spectral_mixture: weights must be positive and finite")
        if not np.all(np.isfinite(mu) & (mu >= 0)):
            problems.append("spectral_mixture: mean frequencies must be non-negative and finite")
        if not np.all(np.isfinite(s) & (s >= MIN_MIXTURE_VARIANCE)):
            problems.append(
                "spectral_mixture: component variances must be at least "
                f"{MIN_MIXTURE_VARIANCE:g} (pure cosines are not representable)"
            )
        return problems

    def value_at_zero(self):
        return float(sum(self.weights))

    def evaluate(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        w, mu, s = self._arrays()
        if self.dim == 2:
            tau = _check_lag_2d(tau)
            base = tau.shape[:-1]
            t = tau.reshape(-1, 2)
        else:
            base = tau.shape
            t = tau.reshape(-1, 1)
        phase = 2.0 * math.pi * (t @ mu.T)               # (n, Q)
        decay = 2.0 * math.pi**2 * ((t * t) @ s.T)       # (n, Q)
        vals = (np.cos(phase) * np.exp(-decay)) @ w
        return vals.reshape(base)


@dataclass(frozen=True)
class AdditiveAcvf:
    """Surface covariance assembled from two independent 1-D ACVFs."""

    r_x: object
    r_y: object
    dim = 2

    def validate(self):
        problems = []
        for name, part in (("r_x", self.r_x), ("r_y", self.r_y)):
            if getattr(part, "dim", None) != 1:
                problems.append(f"additive: {name} must be a 1-D ACVF")
            else:
                problems.extend(f"additive.{name}: {p}" for p in part.validate())
        return problems

    def value_at_zero(self):
        return self.r_x.value_at_zero() + self.r_y.value_at_zero()

    def evaluate(self, tau):
        tau = _check_lag_2d(np.asarray(tau, dtype=np.float64))
        return self.r_x.evaluate(tau[..., 0]) + self.r_y.evaluate(tau[..., 1])


def _check_lag_2d(tau):
    if tau.ndim == 0 or tau.shape[-1] != 2:
        raise ValueError("2-D ACVF expects lags with two components on the last axis")
    return tau


def evaluate(acvf, tau):
    """Evaluate ``acvf`` at lag(s) ``tau``.

    ``tau`` is scalar or array-like for 1-D descriptors and has two
    components on its last axis for 2-D descriptors.  A mismatch between the
    lag shape and the descriptor dimension raises ``ValueError``.
    """
    tau = np.asarray(tau, dtype=np.float64)
    if not np.all(np.isfinite(tau)):
        raise ValueError("lags must be finite")
    if acvf.dim == 1 and tau.ndim >= 1 and tau.shape[-1] == 2 and tau.ndim > 1:
        # A stack of component pairs handed to a profile kernel.
        raise ValueError("1-D ACVF evaluated at 2-D lags")
    return acvf.evaluate(tau)


def rotate_lag(tau, phi):
    """Apply the inverse (clockwise) rotation by ``phi`` to 2-D lag(s)."""
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape[-1] != 2:
        raise ValueError("rotate_lag is defined for 2-D lags only")
    c = math.cos(phi)
    s = math.sin(phi)
    out = np.empty_like(tau)
    out[..., 0] = c * tau[..., 0] + s * tau[..., 1]
    out[..., 1] = -s * tau[..., 0] + c * tau[..., 1]
    return out


def closed_form_psd(acvf, frequencies):
    """Two-sided power spectral density of a spectral-mixture ACVF.

    The density is the symmetrized Gaussian mixture

        S(f) = sum_q (w_q / 2) * [ N(f; mu_q, Sigma_q) + N(f; -mu_q, Sigma_q) ]

    whose inverse Fourier transform reproduces the covariance exactly; it is
    even, non-negative and integrates to sum_q w_q.  ``frequencies`` follows
    the same shape convention as lags in :func:`evaluate`.
    """
    if not isinstance(acvf, SpectralMixtureAcvf):
        raise TypeError("closed_form_psd is defined for spectral-mixture ACVFs")
    f = np.asarray(frequencies, dtype=np.float64)
    w, mu, s = acvf._arrays()
    if acvf.dim == 2:
        f = _check_lag_2d(f)
        base = f.shape[:-1]
        pts = f.reshape(-1, 2)
    else:
        base = f.shape
        pts = f.reshape(-1, 1)

    def gauss(points, centers):
        # product of independent 1-D normal densities along each dimension
        diff = points[:, None, :] - centers[None, :, :]
        norm = np.prod(np.sqrt(2.0 * math.pi * s), axis=1)
        return np.exp(-0.5 * np.sum(diff * diff / s[None, :, :], axis=2)) / norm

    dens = 0.5 * (gauss(pts, mu) + gauss(pts, -mu)) @ w
    return dens.reshape(base)


def is_valid(acvf):
    """Check parameter-domain constraints.

    Returns ``(ok, diagnostics)`` where ``diagnostics`` lists every violated
    constraint.  Positive-semidefiniteness is guaranteed by construction for
    these families, so only parameter domains are checked here; the
    matrix-level check happens at factorization time.
    """
    problems = acvf.validate()
    return (len(problems) == 0, problems)


def require_valid(acvf):
    """Raise :class:`InvalidKernelError` when ``acvf`` fails :func:`is_valid`."""
    ok, problems = is_valid(acvf)
    if not ok:
        raise InvalidKernelError(problems)
