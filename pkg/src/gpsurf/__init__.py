"""gpsurf: rough profiles and surfaces as zero-mean Gaussian processes.

Simulation side: stationary ACVFs (white noise, rotated exponential,
spectral mixture, additive), exact Cholesky sampling on regular grids, a
Gaussian observation-noise model and min-superposition honing composition.

Identification side: periodogram / Welch PSD estimation, Gaussian-mixture
initialization by inverse transform sampling, and marginal-likelihood
refinement of spectral-mixture hyperparameters for profiles and surfaces.
"""

from gpsurf.composition import HoningStepSpec, min_compose, simulate_honed
from gpsurf.errors import (
    ConfigError,
    FileFormatError,
    FitError,
    GpsurfError,
    GridTooLargeError,
    InvalidKernelError,
    NotPositiveSemidefiniteError,
)
from gpsurf.fitting import (
    FitConfig,
    FitReport,
    SpectralMixtureParams,
    fit,
    fit_additive,
    init_from_psd,
    log_marginal_likelihood,
)
from gpsurf.kernels import (
    AdditiveAcvf,
    ExponentialRotatedAcvf,
    SpectralMixtureAcvf,
    WhiteNoiseAcvf,
    closed_form_psd,
    evaluate,
    is_valid,
    rotate_lag,
)
from gpsurf.sampling import (
    DEFAULT_POINT_CAP,
    CholeskyFactor,
    Grid,
    SurfaceField,
    add_gaussian_noise,
    build_covariance,
    cholesky_with_jitter,
    core_backend,
    sample_covariance_mae,
    sample_latent,
)
from gpsurf.spectral import Profile, PsdEstimate, empirical_acvf, periodogram, welch

__version__ = "0.1.0"
