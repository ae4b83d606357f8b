"""Periodogram, Welch estimation and the empirical autocovariance."""

import numpy as np
import pytest

from gpsurf import (
    ExponentialRotatedAcvf,
    Grid,
    Profile,
    empirical_acvf,
    periodogram,
    sample_latent,
    welch,
)


def white_profile(seed, m=1024, sigma=1.0):
    rng = np.random.default_rng(seed)
    return Profile(sigma * rng.standard_normal(m), 1.0)


class TestProfile:
    def test_too_short(self):
        with pytest.raises(ValueError):
            Profile(np.zeros(4), 1.0)

    def test_bad_spacing(self):
        with pytest.raises(ValueError):
            Profile(np.zeros(16), 0.0)


class TestPeriodogram:
    def test_zero_profile(self):
        psd = periodogram(Profile(np.zeros(32), 1.0))
        np.testing.assert_array_equal(psd.densities, np.zeros(32))

    def test_on_bin_cosine_concentrates(self):
        m, k0 = 256, 16
        z = np.cos(2 * np.pi * k0 / m * np.arange(m))
        psd = periodogram(Profile(z, 1.0))
        on_bin = np.abs(np.abs(psd.frequencies) - k0 / m) < 1e-12
        assert on_bin.sum() == 2
        np.testing.assert_allclose(psd.densities[on_bin].sum() * psd.df, 0.5, rtol=1e-12)
        assert psd.densities[~on_bin].max() < 1e-12 * psd.densities[on_bin].max()
        # the finite cosine's biased sample variance is exactly 1/2 here
        np.testing.assert_allclose(psd.meta["sample_variance"], 0.5, rtol=1e-12)

    def test_two_sided_layout_and_symmetry(self):
        psd = periodogram(white_profile(0, m=64))
        assert psd.frequencies[0] == -31 / 64
        assert psd.frequencies[-1] == 0.5
        for f, s in zip(psd.frequencies, psd.densities):
            mirrored = np.isclose(psd.frequencies, -f)
            if mirrored.any():
                np.testing.assert_allclose(s, psd.densities[mirrored][0], rtol=1e-12)

    def test_parseval_random_profiles(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            m = int(rng.integers(16, 600))
            prof = Profile(rng.standard_normal(m) * rng.uniform(0.1, 5), float(rng.uniform(0.1, 3)))
            psd = periodogram(prof)
            assert psd.meta["parseval_rel_error"] <= 1e-10

    def test_white_noise_flat_level(self):
        """Mean density sits at dx * sigma^2 up to Monte-Carlo noise (50 seeds)."""
        means = [np.mean(periodogram(white_profile(s, m=4096)).densities) for s in range(50)]
        assert abs(np.mean(means) - 1.0) < 0.1


class TestWelch:
    def test_degenerate_single_segment_equals_periodogram(self):
        prof = white_profile(3, m=256)
        ref = periodogram(prof)
        got = welch(prof, segment_len=256, overlap_fraction=0.0, window="rectangular")
        np.testing.assert_allclose(got.densities, ref.densities, rtol=1e-12)
        np.testing.assert_array_equal(got.frequencies, ref.frequencies)

    def test_parseval_holds_exactly(self):
        for seed in range(20):
            rng = np.random.default_rng(100 + seed)
            m = int(rng.integers(64, 3000))
            prof = Profile(rng.standard_normal(m), float(rng.uniform(0.2, 2)))
            psd = welch(prof)
            assert psd.meta["parseval_rel_error"] <= 1e-10

    def test_variance_reduction_vs_periodogram(self):
        """Welch averaging cuts estimator variance by >= 3x on white noise."""
        per_mse, wel_mse = [], []
        for seed in range(50):
            prof = white_profile(200 + seed, m=8192)
            per_mse.append(np.mean((periodogram(prof).densities - 1.0) ** 2))
            wel_mse.append(np.mean((welch(prof).densities - 1.0) ** 2))
        assert np.mean(per_mse) / np.mean(wel_mse) >= 3.0

    def test_peak_bin_preserved(self):
        m, k0 = 1024, 64
        z = np.cos(2 * np.pi * k0 / m * np.arange(m))
        prof = Profile(z, 1.0)
        ref = periodogram(prof)
        got = welch(prof, segment_len=256)
        np.testing.assert_allclose(got.peak_frequency(), ref.peak_frequency(), atol=1e-12)

    def test_segment_length_validation(self):
        prof = white_profile(1, m=64)
        with pytest.raises(ValueError):
            welch(prof, segment_len=128)
        with pytest.raises(ValueError):
            welch(prof, segment_len=32, overlap_fraction=1.0)
        with pytest.raises(ValueError):
            welch(prof, segment_len=32, window="kaiser")


class TestEmpiricalAcvf:
    def test_constant_profile_gives_zeros(self):
        r = empirical_acvf(Profile(np.full(32, 3.7), 1.0), 8)
        np.testing.assert_allclose(r, np.zeros(9), atol=1e-14)

    def test_lag_zero_is_sample_variance_exactly(self):
        rng = np.random.default_rng(12)
        z = rng.standard_normal(200)
        r = empirical_acvf(Profile(z, 1.0), 10)
        centered = z - z.mean()
        assert r[0] == np.dot(centered, centered) / z.size

    def test_max_lag_validation(self):
        prof = white_profile(0, m=32)
        with pytest.raises(ValueError):
            empirical_acvf(prof, 32)

    def test_exponential_kernel_recovery(self):
        """r(10)/r(0) lands near exp(-1) for a lengthscale of 10 steps."""
        grid = Grid((8192,), (1.0,))
        k = ExponentialRotatedAcvf(1.0, 10.0, 1.0, 0.0, dim=1)
        fields = sample_latent(grid, k, 777, 20)
        ratios = []
        for f in fields:
            r = empirical_acvf(Profile(f.heights, 1.0), 10)
            ratios.append(r[10] / r[0])
        assert abs(np.mean(ratios) - np.exp(-1)) < 0.1

    def test_positive_semidefinite_sequence(self):
        """The two-sided biased sequence has a non-negative DFT."""
        for seed in range(10):
            rng = np.random.default_rng(300 + seed)
            z = rng.standard_normal(128)
            r = empirical_acvf(Profile(z, 1.0), 127)
            full = np.concatenate([r[::-1], r[1:]])
            spectrum = np.fft.fft(np.fft.ifftshift(full)).real
            assert spectrum.min() >= -1e-10 * r[0]

    def test_fourier_pair_with_periodogram(self):
        """Folded DFT of the full biased ACVF sequence equals the periodogram."""
        rng = np.random.default_rng(41)
        for m in (64, 129, 256):
            dx = 0.7
            prof = Profile(rng.standard_normal(m), dx)
            r = empirical_acvf(prof, m - 1)
            folded = r.copy()
            folded[1:] += r[1:][::-1]  # wrap negative lags onto 1..m-1
            spec = np.fft.fft(folded).real * dx
            psd = periodogram(prof)
            k = np.arange(-((m + 1) // 2) + 1, m // 2 + 1)
            np.testing.assert_allclose(spec[k % m], psd.densities, rtol=1e-8, atol=1e-12)
