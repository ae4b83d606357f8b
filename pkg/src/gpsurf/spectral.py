"""Nonparametric spectral estimation for measured profiles.

Estimates are two-sided densities normalized so that sum(S * df) equals the
mean-removed sample variance of the input; that makes the normalization
testable on any profile without ground truth.  The mean is removed before
every estimate because the underlying model is zero-mean while measured
data generally is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MIN_PROFILE_LEN = 8


@dataclass(frozen=True)
class Profile:
    """Equally spaced height samples."""

    heights: np.ndarray
    spacing: float

    def __init__(self, heights, spacing):
        heights = np.asarray(heights, dtype=np.float64)
        if heights.ndim != 1:
            raise ValueError("profile heights must be one-dimensional")
        if heights.size < MIN_PROFILE_LEN:
            raise ValueError(f"profile too short: need at least {MIN_PROFILE_LEN} points")
        if not np.all(np.isfinite(heights)):
            raise ValueError("profile heights must be finite")
        spacing = float(spacing)
        if not (math.isfinite(spacing) and spacing > 0):
            raise ValueError("profile spacing must be positive and finite")
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "spacing", spacing)

    @property
    def size(self):
        return self.heights.size


@dataclass
class PsdEstimate:
    """Two-sided spectral density on a symmetric discrete frequency axis."""

    frequencies: np.ndarray
    densities: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    @property
    def df(self):
        return float(self.frequencies[1] - self.frequencies[0])

    def total_power(self):
        return float(np.sum(self.densities) * self.df)

    def peak_frequency(self):
        """Frequency of the largest non-negative-frequency density."""
        mask = self.frequencies >= 0
        idx = int(np.argmax(self.densities[mask]))
        return float(self.frequencies[mask][idx])


def _two_sided_bins(m):
    # k in [-ceil(m/2)+1, floor(m/2)]; for even m the Nyquist bin sits on
    # the positive side only.
    return np.arange(-((m + 1) // 2) + 1, m // 2 + 1)


def _remove_mean(values):
    return values - np.mean(values)


def periodogram(profile):
    """Two-sided periodogram S(f_k) = (dx/M) |DFT(z)_k|^2 of the mean-removed profile.

    Frequencies are f_k = k / (M dx); the discrete Parseval identity makes
    sum(S * df) equal the biased sample variance exactly up to rounding.
    """
    z = _remove_mean(profile.heights)
    m = z.size
    spec = np.fft.fft(z)
    k = _two_sided_bins(m)
    dens = (profile.spacing / m) * np.abs(spec[k % m]) ** 2
    freqs = k / (m * profile.spacing)
    meta = _parseval_meta(z, freqs, dens)
    return PsdEstimate(frequencies=freqs, densities=dens, method="periodogram", meta=meta)


def default_segment_length(m):
    """Welch default: M/4 rounded to the nearest power of two, clamped to [8, M]."""
    target = max(m / 4.0, 1.0)
    power = int(round(math.log2(target)))
    return int(min(max(2**power, MIN_PROFILE_LEN), m))


def welch(profile, segment_len=None, overlap_fraction=0.5, window="hann"):
    """Averaged windowed periodograms over overlapping segments.

    The averaged spectrum is rescaled so the Parseval identity holds exactly
    for the given input (the window-power normalization already makes the
    scale factor one in expectation for white noise).
    """
    z = _remove_mean(profile.heights)
    m = z.size
    if segment_len is None:
        segment_len = default_segment_length(m)
    segment_len = int(segment_len)
    if segment_len < MIN_PROFILE_LEN:
        raise ValueError(f"segment length must be at least {MIN_PROFILE_LEN}")
    if segment_len > m:
        raise ValueError("segment length exceeds the profile length")
    if not 0.0 <= overlap_fraction < 1.0:
        raise ValueError("overlap fraction must lie in [0, 1)")
    if window == "hann":
        # periodic Hann, the usual choice for spectral averaging
        taper = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(segment_len) / segment_len)
    elif window == "rectangular":
        taper = np.ones(segment_len)
    else:
        raise ValueError("window must be 'hann' or 'rectangular'")

    step = max(1, int(round(segment_len * (1.0 - overlap_fraction))))
    starts = range(0, m - segment_len + 1, step)
    k = _two_sided_bins(segment_len)
    win_power = float(np.sum(taper**2))
    acc = np.zeros(segment_len)
    n_seg = 0
    for start in starts:
        seg = z[start : start + segment_len] * taper
        spec = np.fft.fft(seg)
        acc += np.abs(spec[k % segment_len]) ** 2
        n_seg += 1
    dens = acc * (profile.spacing / (win_power * n_seg))
    freqs = k / (segment_len * profile.spacing)

    variance = float(np.dot(z, z) / m)
    df = 1.0 / (segment_len * profile.spacing)
    total = float(np.sum(dens) * df)
    if total > 0.0:
        dens *= variance / total
    meta = _parseval_meta(z, freqs, dens)
    meta.update(
        {
            "segment_len": segment_len,
            "overlap_fraction": float(overlap_fraction),
            "window": window,
            "n_segments": n_seg,
        }
    )
    return PsdEstimate(frequencies=freqs, densities=dens, method="welch", meta=meta)


def _parseval_meta(z, freqs, dens):
    variance = float(np.dot(z, z) / z.size)
    df = float(freqs[1] - freqs[0])
    total = float(np.sum(dens) * df)
    if variance > 0.0:
        rel = abs(total - variance) / variance
    else:
        rel = abs(total)
    return {"sample_variance": variance, "parseval_total": total, "parseval_rel_error": rel}


def empirical_acvf(profile, max_lag):
    """Biased lag-product autocovariance of the mean-removed profile.

    r(l) = (1/M) * sum_n z_n z_{n+l}; the 1/M normalization keeps the lag
    sequence positive semidefinite at the cost of a bias at large lags.
    r(0) is the biased sample variance exactly.
    """
    max_lag = int(max_lag)
    z = _remove_mean(profile.heights)
    m = z.size
    if max_lag >= m:
        raise ValueError("max_lag must be smaller than the profile length")
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    out = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        out[lag] = np.dot(z[: m - lag], z[lag:]) / m
    return out
