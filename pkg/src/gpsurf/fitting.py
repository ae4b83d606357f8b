"""Spectral-mixture hyperparameter selection from measured data.

The pipeline mirrors how the kernels are meant to be identified: estimate a
two-sided PSD nonparametrically, draw frequency samples from it by inverse
transform sampling, fit a 1-D Gaussian mixture to those samples by EM (one
candidate per restart), then refine every candidate by maximizing the exact
Gaussian-process marginal likelihood and keep the best.  The likelihood
surface is multi-modal, so restarts plus marginal-likelihood selection are
the mitigation; there is no global optimizer.

All positive hyperparameters are optimized in log space; mean frequencies
are unconstrained during optimization (the kernel is even in them) and
exposed non-negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, toeplitz
from scipy.optimize import minimize

from gpsurf.errors import FitError, NotPositiveSemidefiniteError
from gpsurf.kernels import MIN_MIXTURE_VARIANCE, AdditiveAcvf, SpectralMixtureAcvf
from gpsurf.sampling import cholesky_with_jitter
from gpsurf.spectral import Profile, periodogram, welch

LOG_2PI = math.log(2.0 * math.pi)

#: Seed offsets decorrelating the restart streams of different PSD sources.
_SOURCE_SEED_STRIDE = 1_000_003
_RESEED_OFFSET = 7_777_777


@dataclass(frozen=True)
class SpectralMixtureParams:
    """1-D spectral-mixture hyperparameters plus the observation-noise variance."""

    weights: tuple
    means: tuple
    variances: tuple
    noise_variance: float

    def __init__(self, weights, means, variances, noise_variance):
        object.__setattr__(self, "weights", tuple(float(w) for w in weights))
        object.__setattr__(self, "means", tuple(float(m) for m in means))
        object.__setattr__(self, "variances", tuple(float(v) for v in variances))
        object.__setattr__(self, "noise_variance", float(noise_variance))
        if not (len(self.weights) == len(self.means) == len(self.variances)):
            raise ValueError("weights, means and variances must have equal length")
        if len(self.weights) < 1:
            raise ValueError("at least one component is required")

    @property
    def q(self):
        return len(self.weights)

    def to_acvf(self):
        """Kernel descriptor with the representability floor applied."""
        return SpectralMixtureAcvf(
            weights=self.weights,
            means=tuple(abs(m) for m in self.means),
            variances=tuple(max(v, MIN_MIXTURE_VARIANCE) for v in self.variances),
        )

    def to_vector(self):
        """Pack as (log w, mu, log s, log sigma^2) for the optimizer."""
        w = np.log(np.asarray(self.weights))
        s = np.log(np.asarray(self.variances))
        sig2 = math.log(max(self.noise_variance, 1e-300))
        return np.concatenate([w, np.asarray(self.means), s, [sig2]])

    @classmethod
    def from_vector(cls, theta, q):
        theta = np.asarray(theta, dtype=np.float64)
        return cls(
            weights=np.exp(theta[:q]),
            means=np.abs(theta[q : 2 * q]),
            variances=np.maximum(np.exp(theta[2 * q : 3 * q]), MIN_MIXTURE_VARIANCE),
            noise_variance=math.exp(theta[3 * q]),
        )


@dataclass(frozen=True)
class FitConfig:
    """Knobs for the initialization and refinement stages."""

    n_psd_samples: int = 10_000
    n_restarts: int = 10
    max_iterations: int = 500
    tol: float = 1e-6
    seed: int = 0
    max_likelihood_points: int = 512

    def __post_init__(self):
        if self.n_psd_samples < 1 or self.n_restarts < 1:
            raise ValueError("counts must be at least 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.max_likelihood_points < 2:
            raise ValueError("need at least 2 likelihood points")


@dataclass
class CandidateFit:
    """One restart: its initialization, refinement trace and outcome."""

    source: str
    seed: int
    params_init: SpectralMixtureParams
    params_final: SpectralMixtureParams = None
    lml_init: float = math.nan
    lml_final: float = math.nan
    lml_trace: list = field(default_factory=list)
    n_iterations: int = 0
    converged: bool = False
    failure: str = None


@dataclass
class FitReport:
    """All candidates of a fit, ordered by candidate index."""

    candidates: list
    best_index: int

    @property
    def best(self):
        return self.candidates[self.best_index]

    @property
    def best_params(self):
        return self.best.params_final


# ---------------------------------------------------------------------------
# marginal likelihood
# ---------------------------------------------------------------------------


def _mixture_lag_parts(lags, w, mu, s):
    phase = 2.0 * math.pi * np.outer(lags, mu)
    decay = 2.0 * math.pi**2 * np.outer(lags * lags, s)
    envelope = np.exp(-decay)
    cosines = np.cos(phase) * envelope
    return cosines, envelope, phase


def _lml_from_gram(gram, values):
    factor = cholesky_with_jitter(gram)
    lower = factor.lower
    alpha = cho_solve((lower, True), values, check_finite=False)
    lml = (
        -0.5 * float(values @ alpha)
        - float(np.sum(np.log(np.diagonal(lower))))
        - 0.5 * values.size * LOG_2PI
    )
    return lml, lower, alpha


def log_marginal_likelihood(data, params):
    """Exact Gaussian log marginal likelihood of ``data`` under ``params``.

    ``data`` is a :class:`~gpsurf.spectral.Profile` (positions are
    ``i * spacing``) or a ``(values, positions)`` pair of equal-length
    arrays.  The Gram matrix gets the jitter ladder on top of the noise
    variance; if even the maximum jitter fails, the error suggests raising
    the noise floor.
    """
    if isinstance(data, Profile):
        values = data.heights
        positions = np.arange(values.size) * data.spacing
    else:
        values, positions = data
        values = np.asarray(values, dtype=np.float64)
        positions = np.asarray(positions, dtype=np.float64)
        if values.shape != positions.shape or values.ndim != 1:
            raise ValueError("values and positions must be equal-length 1-D arrays")
    acvf = params.to_acvf()
    tau = positions[:, None] - positions[None, :]
    gram = acvf.evaluate(tau)
    gram[np.diag_indices_from(gram)] += params.noise_variance
    gram = 0.5 * (gram + gram.T)
    try:
        lml, _, _ = _lml_from_gram(gram, values)
    except NotPositiveSemidefiniteError as exc:
        raise FitError(
            "marginal likelihood is not computable: covariance is numerically "
            "singular even at maximum jitter; raise the noise-variance floor"
        ) from exc
    return lml


def _lml_and_grad(theta, values, spacing, q):
    """Log marginal likelihood and its gradient in packed coordinates.

    The Gram matrix on a regular profile is Toeplitz and every parameter
    derivative is generated by an even lag function, so the trace terms
    reduce to per-diagonal sums of (alpha alpha^T - K^-1).
    """
    m = values.size
    w = np.exp(theta[:q])
    mu = theta[q : 2 * q]
    s = np.exp(theta[2 * q : 3 * q])
    sig2 = math.exp(theta[3 * q])
    lags = np.arange(m) * spacing

    cosines, envelope, phase = _mixture_lag_parts(lags, w, mu, s)
    r = cosines @ w
    r[0] += sig2
    gram = toeplitz(r)
    lml, lower, alpha = _lml_from_gram(gram, values)

    inv = cho_solve((lower, True), np.eye(m), check_finite=False)
    outer_minus_inv = np.outer(alpha, alpha) - inv
    diag_sums = np.array([np.sum(np.diagonal(outer_minus_inv, k)) for k in range(m)])
    coeff = diag_sums.copy()
    coeff[0] *= 0.5

    grad = np.empty(3 * q + 1)
    # d r / d log w_q at each lag
    grad[:q] = (cosines * w).T @ coeff
    # d r / d mu_q: -2 pi lag w sin(phase) envelope (even in the lag)
    dmu = -2.0 * math.pi * lags[:, None] * np.sin(phase) * envelope * w
    grad[q : 2 * q] = dmu.T @ coeff
    # d r / d log s_q: -2 pi^2 lag^2 s w cos(phase) envelope
    dls = -2.0 * math.pi**2 * (lags * lags)[:, None] * cosines * (w * s)
    grad[2 * q : 3 * q] = dls.T @ coeff
    # d r / d log sigma^2 hits the zero lag only
    grad[3 * q] = sig2 * coeff[0]
    return lml, grad


# ---------------------------------------------------------------------------
# initialization: inverse transform sampling + EM
# ---------------------------------------------------------------------------


def _sample_frequencies(psd, n, rng):
    """Draw frequency magnitudes from the non-negative half of the PSD.

    Inverse transform sampling on the discrete CDF with a uniform jitter
    within each frequency bin.
    """
    mask = psd.frequencies >= 0.0
    freqs = psd.frequencies[mask]
    weights = psd.densities[mask].astype(np.float64).copy()
    weights[weights < 0] = 0.0
    total = weights.sum()
    if total <= 0:
        raise ValueError("PSD has no positive mass")
    cdf = np.cumsum(weights / total)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(n), side="left")
    jitter = (rng.random(n) - 0.5) * psd.df
    return np.abs(freqs[idx] + jitter)


def _kmeans_1d(y, q, rng, n_iter=20):
    centers = np.sort(rng.choice(y, size=q, replace=False))
    for _ in range(n_iter):
        assign = np.argmin(np.abs(y[:, None] - centers[None, :]), axis=1)
        for k in range(q):
            members = y[assign == k]
            if members.size:
                centers[k] = members.mean()
            else:
                centers[k] = rng.choice(y)
        centers = np.sort(centers)
    assign = np.argmin(np.abs(y[:, None] - centers[None, :]), axis=1)
    return centers, assign


def _fit_gmm_1d(y, q, rng, var_floor, max_iter=100, tol=1e-8):
    """EM for a 1-D Gaussian mixture, k-means seeded.

    Returns (weights, means, variances, loglik, degenerate); a component is
    degenerate when its variance collapses onto the floor or its weight
    vanishes.
    """
    n = y.size
    centers, assign = _kmeans_1d(y, q, rng)
    weights = np.array([max(float((assign == k).sum()), 1.0) for k in range(q)])
    weights /= weights.sum()
    means = centers.copy()
    global_var = max(y.var(), var_floor)
    variances = np.array(
        [max(y[assign == k].var(), var_floor) if (assign == k).any() else global_var for k in range(q)]
    )

    prev_ll = -np.inf
    ll = -np.inf
    for _ in range(max_iter):
        log_comp = (
            np.log(weights)[None, :]
            - 0.5 * np.log(2.0 * math.pi * variances)[None, :]
            - 0.5 * (y[:, None] - means[None, :]) ** 2 / variances[None, :]
        )
        top = log_comp.max(axis=1, keepdims=True)
        norm = top[:, 0] + np.log(np.exp(log_comp - top).sum(axis=1))
        ll = float(norm.sum())
        resp = np.exp(log_comp - norm[:, None])
        bulk = resp.sum(axis=0)
        bulk = np.maximum(bulk, 1e-300)
        weights = bulk / n
        means = (resp * y[:, None]).sum(axis=0) / bulk
        variances = (resp * (y[:, None] - means[None, :]) ** 2).sum(axis=0) / bulk
        variances = np.maximum(variances, var_floor)
        if abs(ll - prev_ll) < tol * max(1.0, abs(ll)):
            break
        prev_ll = ll
    degenerate = bool(np.any(variances <= var_floor * (1 + 1e-9)) or np.any(weights < 1e-12))
    return weights, means, variances, ll, degenerate


def init_from_psd(psd, q, cfg, seed_offset=0):
    """Candidate hyperparameter sets from a PSD estimate, one per restart.

    Each restart draws ``cfg.n_psd_samples`` frequencies from the PSD,
    EM-fits a ``q``-component Gaussian mixture and maps components to
    (weight * total power, mean clamped non-negative, variance).  The noise
    variance starts at 10 percent of the data variance.  A restart whose EM
    collapses is re-seeded once and then dropped.
    """
    if q < 1:
        raise ValueError("Q must be >= 1")
    total_power = psd.total_power()
    if total_power <= 0:
        raise ValueError("PSD has no positive mass")
    f_nyq = float(np.max(np.abs(psd.frequencies)))
    var_floor = 1e-12 * max(f_nyq**2, 1e-30)
    candidates = []
    for restart in range(cfg.n_restarts):
        seed = cfg.seed + seed_offset + restart
        params = None
        for attempt_seed in (seed, seed + _RESEED_OFFSET):
            rng = np.random.default_rng(attempt_seed)
            samples = _sample_frequencies(psd, cfg.n_psd_samples, rng)
            if np.unique(samples).size < q:
                continue
            weights, means, variances, _, degenerate = _fit_gmm_1d(samples, q, rng, var_floor)
            if degenerate:
                continue
            params = SpectralMixtureParams(
                weights=weights * total_power,
                means=np.maximum(means, 0.0),
                variances=np.maximum(variances, MIN_MIXTURE_VARIANCE),
                noise_variance=0.1 * total_power,
            )
            break
        if params is not None:
            candidates.append((seed, params))
    return candidates


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------


def _optimizer_bounds(q, spacing, variance_scale):
    f_nyq = 0.5 / spacing
    log_v = math.log(max(variance_scale, 1e-30))
    bounds = []
    bounds += [(log_v - 30.0, log_v + 10.0)] * q          # log weights
    bounds += [(-2.0 * f_nyq, 2.0 * f_nyq)] * q           # mean frequencies
    bounds += [(math.log(1e-14 * f_nyq**2), math.log(1e2 * f_nyq**2))] * q  # log variances
    bounds += [(log_v - 30.0, log_v + 5.0)]               # log noise variance
    return bounds


def _refine_candidate(theta0, values, spacing, q, cfg):
    """Monotone gradient-based ascent of the log marginal likelihood.

    Returns (theta, lml_trace, n_iter, converged).  Every accepted step must
    not decrease the objective; a violation raises immediately because the
    whole selection logic relies on it.
    """
    cache = {}

    def negative(theta):
        try:
            lml, grad = _lml_and_grad(theta, values, spacing, q)
        except NotPositiveSemidefiniteError:
            return 1e25, np.zeros_like(theta)
        if not math.isfinite(lml):
            return 1e25, np.zeros_like(theta)
        cache["x"] = theta.copy()
        cache["lml"] = lml
        return -lml, -grad

    trace = []
    f0, _ = negative(theta0)
    if f0 >= 1e25:
        raise FitError("initial candidate has an unusable likelihood")
    trace.append(-f0)
    if cfg.max_iterations == 0:
        return np.asarray(theta0, dtype=np.float64), trace, 0, True

    def on_step(xk):
        if "x" in cache and np.array_equal(cache["x"], xk):
            lml = cache["lml"]
        else:
            lml = -negative(xk)[0]
        if lml < trace[-1]:
            raise AssertionError(
                f"optimizer accepted a step that decreased the objective "
                f"({trace[-1]!r} -> {lml!r})"
            )
        trace.append(lml)

    result = minimize(
        negative,
        np.asarray(theta0, dtype=np.float64),
        jac=True,
        method="L-BFGS-B",
        bounds=_optimizer_bounds(q, spacing, max(float(np.var(values)), 1e-12)),
        callback=on_step,
        options={"maxiter": cfg.max_iterations, "ftol": cfg.tol, "gtol": 1e-12},
    )
    final_lml = -float(result.fun)
    if final_lml >= trace[-1]:
        trace.append(final_lml)
    converged = bool(result.status == 0)
    return np.asarray(result.x, dtype=np.float64), trace, int(result.nit), converged


def _likelihood_window(profile, cfg):
    take = min(profile.size, cfg.max_likelihood_points)
    window = profile.heights[:take]
    return window - window.mean()


def fit(profile, q, cfg=None, psds=None):
    """Select spectral-mixture hyperparameters for a profile.

    Candidates come from both the periodogram- and Welch-based PSDs (or from
    the estimates passed in ``psds``); each is refined by maximizing the
    marginal likelihood on a window of at most
    ``cfg.max_likelihood_points`` consecutive points, and the candidate with
    the largest final log marginal likelihood wins.  Deterministic under
    ``cfg.seed``.
    """
    if q < 1:
        raise ValueError("Q must be >= 1")
    cfg = cfg or FitConfig()
    if psds is None:
        psds = [periodogram(profile), welch(profile)]
    values = _likelihood_window(profile, cfg)
    spacing = profile.spacing

    seeded = []
    for index, psd in enumerate(psds):
        for seed, params in init_from_psd(psd, q, cfg, seed_offset=index * _SOURCE_SEED_STRIDE):
            seeded.append((psd.method, seed, params))
    if not seeded:
        raise FitError("no usable initialization candidates (degenerate PSD?)")

    candidates = []
    for source, seed, params in seeded:
        cand = CandidateFit(source=source, seed=seed, params_init=params)
        try:
            theta, trace, n_iter, converged = _refine_candidate(
                params.to_vector(), values, spacing, q, cfg
            )
            cand.params_final = SpectralMixtureParams.from_vector(theta, q)
            cand.lml_init = trace[0]
            cand.lml_final = trace[-1]
            cand.lml_trace = trace
            cand.n_iterations = n_iter
            cand.converged = converged
        except FitError as exc:
            cand.failure = str(exc)
        candidates.append(cand)

    usable = [i for i, c in enumerate(candidates) if c.failure is None]
    if not usable:
        raise FitError(
            "all candidates failed",
            per_candidate=[f"candidate {i} ({c.source}): {c.failure}" for i, c in enumerate(candidates)],
        )
    best_index = max(usable, key=lambda i: candidates[i].lml_final)
    return FitReport(candidates=candidates, best_index=best_index)


@dataclass
class AdditiveFitResult:
    """Per-axis spectral mixtures for a surface under the additive model."""

    params_x: SpectralMixtureParams
    params_y: SpectralMixtureParams
    report_x: FitReport
    report_y: FitReport

    @property
    def acvf(self):
        return AdditiveAcvf(r_x=self.params_x.to_acvf(), r_y=self.params_y.to_acvf())

    @property
    def noise_variance(self):
        return 0.5 * (self.params_x.noise_variance + self.params_y.noise_variance)


def fit_additive(field, q, cfg=None):
    """Fit one spectral mixture per axis of a measured surface.

    The axis PSD is the average of the per-line periodograms along that
    axis; the likelihood is evaluated on one representative line, the one
    with median variance.  This is a documented modeling choice: the
    additive form does not dictate how 2-D data enters the 1-D likelihoods.
    """
    if q < 1:
        raise ValueError("Q must be >= 1")
    cfg = cfg or FitConfig()
    grid = field.grid
    if grid.dim != 2 or min(grid.shape) < 2:
        raise ValueError("degenerate grid for additive fitting; use fit on a profile")
    heights = field.heights_2d()

    def fit_axis(lines, spacing):
        psds = [periodogram(Profile(line, spacing)) for line in lines]
        avg = psds[0]
        avg_dens = np.mean([p.densities for p in psds], axis=0)
        avg_psd = type(avg)(
            frequencies=avg.frequencies,
            densities=avg_dens,
            method="periodogram",
            meta={"averaged_over": len(psds)},
        )
        variances = np.array([line.var() for line in lines])
        rep = int(np.argsort(variances, kind="stable")[variances.size // 2])
        return fit(Profile(lines[rep], spacing), q, cfg, psds=[avg_psd])

    lines_x = [heights[:, j] for j in range(grid.shape[1])]
    lines_y = [heights[i, :] for i in range(grid.shape[0])]
    report_x = fit_axis(lines_x, grid.spacing[0])
    report_y = fit_axis(lines_y, grid.spacing[1])
    return AdditiveFitResult(
        params_x=report_x.best_params,
        params_y=report_y.best_params,
        report_x=report_x,
        report_y=report_y,
    )
