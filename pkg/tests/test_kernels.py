"""Unit tests for the ACVF families and their closed-form PSDs."""

import numpy as np
import pytest

from gpsurf import (
    AdditiveAcvf,
    ExponentialRotatedAcvf,
    SpectralMixtureAcvf,
    WhiteNoiseAcvf,
    closed_form_psd,
    evaluate,
    is_valid,
    rotate_lag,
)


def random_mixture(rng, q=None, dim=1):
    q = q or int(rng.integers(1, 4))
    w = rng.uniform(0.1, 3.0, q)
    mu = rng.uniform(0.0, 2.0, (q, dim))
    s = rng.uniform(1e-4, 0.5, (q, dim))
    if dim == 1:
        return SpectralMixtureAcvf(w, mu[:, 0], s[:, 0])
    return SpectralMixtureAcvf(w, mu, s)


class TestEvaluate:
    def test_exponential_at_zero(self):
        k = ExponentialRotatedAcvf(1.0, 1.0, 1.0, 0.0)
        assert evaluate(k, [0.0, 0.0]) == 1.0

    def test_exponential_unit_lag(self):
        k = ExponentialRotatedAcvf(1.0, 1.0, 1.0, 0.0)
        np.testing.assert_allclose(evaluate(k, [1.0, 0.0]), np.exp(-1.0), rtol=1e-15)

    def test_spectral_mixture_cosine_limit(self):
        # smallest representable component variance approximates a pure cosine
        k = SpectralMixtureAcvf([2.0], [0.25], [1e-12])
        np.testing.assert_allclose(evaluate(k, 2.0), -2.0, atol=1e-8)

    def test_additive_white_noise_origin(self):
        k = AdditiveAcvf(WhiteNoiseAcvf(1.0), WhiteNoiseAcvf(1.0))
        assert evaluate(k, [0.0, 0.0]) == 2.0

    def test_additive_axis_lag(self):
        rx = SpectralMixtureAcvf([1.5], [0.2], [0.01])
        ry = ExponentialRotatedAcvf(0.7, 3.0, 1.0, 0.0, dim=1)
        k = AdditiveAcvf(rx, ry)
        taus = np.linspace(-4, 4, 17)
        lags = np.stack([taus, np.zeros_like(taus)], axis=-1)
        expected = evaluate(rx, taus) + ry.value_at_zero()
        np.testing.assert_allclose(evaluate(k, lags), expected, rtol=1e-15)

    def test_dimension_mismatch_rejected(self):
        k2 = ExponentialRotatedAcvf(1.0, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            evaluate(k2, 1.0)
        k1 = SpectralMixtureAcvf([1.0], [0.1], [0.01])
        with pytest.raises(ValueError):
            evaluate(k1, [[1.0, 2.0], [0.0, 1.0]])

    def test_non_finite_lag_rejected(self):
        with pytest.raises(ValueError):
            evaluate(WhiteNoiseAcvf(1.0), np.nan)

    def test_white_noise_delta(self):
        k = WhiteNoiseAcvf(4.0, dim=2)
        taus = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, -1.0]])
        np.testing.assert_array_equal(evaluate(k, taus), [4.0, 0.0, 0.0])


class TestSymmetryAndBound:
    """r(tau) = r(-tau) and |r(tau)| <= r(0) across families and draws."""

    def _families(self, rng):
        yield WhiteNoiseAcvf(float(rng.uniform(0.1, 5.0)), dim=2), 2
        yield ExponentialRotatedAcvf(
            float(rng.uniform(0.1, 5.0)),
            float(rng.uniform(0.2, 10.0)),
            float(rng.uniform(0.2, 10.0)),
            float(rng.uniform(-np.pi, np.pi * 0.999)),
        ), 2
        yield random_mixture(rng, dim=1), 1
        yield random_mixture(rng, dim=2), 2
        yield AdditiveAcvf(random_mixture(rng, dim=1), random_mixture(rng, dim=1)), 2

    def test_even_and_bounded(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            for acvf, dim in self._families(rng):
                taus = rng.uniform(-8, 8, (64, dim)) if dim == 2 else rng.uniform(-8, 8, 64)
                fwd = evaluate(acvf, taus)
                bwd = evaluate(acvf, -taus)
                np.testing.assert_allclose(fwd, bwd, rtol=1e-12, atol=1e-300)
                assert np.all(np.abs(fwd) <= acvf.value_at_zero() * (1 + 1e-12))

    def test_isotropic_rotation_invariance(self):
        rng = np.random.default_rng(8)
        taus = rng.uniform(-5, 5, (32, 2))
        for _ in range(5):
            var = float(rng.uniform(0.1, 4.0))
            ell = float(rng.uniform(0.3, 6.0))
            phi1, phi2 = rng.uniform(-np.pi, np.pi * 0.999, 2)
            a = evaluate(ExponentialRotatedAcvf(var, ell, ell, phi1), taus)
            b = evaluate(ExponentialRotatedAcvf(var, ell, ell, phi2), taus)
            np.testing.assert_allclose(a, b, rtol=1e-12)


class TestRotateLag:
    def test_identity(self):
        np.testing.assert_array_equal(rotate_lag(np.array([1.0, 0.0]), 0.0), [1.0, 0.0])

    def test_quarter_turn_is_inverse_rotation(self):
        out = rotate_lag(np.array([1.0, 0.0]), np.pi / 2)
        np.testing.assert_allclose(out, [0.0, -1.0], atol=1e-15)

    def test_groove_direction_maps_to_first_axis(self):
        phi = np.pi / 6
        out = rotate_lag(np.array([np.cos(phi), np.sin(phi)]), phi)
        np.testing.assert_allclose(out, [1.0, 0.0], atol=1e-15)

    def test_norm_preserved(self):
        rng = np.random.default_rng(3)
        taus = rng.standard_normal((50, 2))
        out = rotate_lag(taus, 0.83)
        np.testing.assert_allclose(
            np.linalg.norm(out, axis=1), np.linalg.norm(taus, axis=1), rtol=1e-14
        )

    def test_requires_two_components(self):
        with pytest.raises(ValueError):
            rotate_lag(np.array([1.0]), 0.5)


class TestClosedFormPsd:
    def test_zero_mean_component_is_centered_unit_mass(self):
        k = SpectralMixtureAcvf([1.0], [0.0], [0.02])
        f = np.linspace(-3, 3, 4001)
        s = closed_form_psd(k, f)
        np.testing.assert_allclose(s, s[::-1], rtol=1e-12)
        np.testing.assert_allclose(np.trapezoid(s, f), 1.0, atol=1e-9)
        assert abs(f[np.argmax(s)]) < 1e-9

    def test_symmetrized_peaks(self):
        k = SpectralMixtureAcvf([1.0], [0.2], [1e-4])
        f = np.linspace(-1, 1, 8001)
        s = closed_form_psd(k, f)
        pos = f[f > 0][np.argmax(s[f > 0])]
        neg = f[f < 0][np.argmax(s[f < 0])]
        np.testing.assert_allclose([neg, pos], [-0.2, 0.2], atol=1e-3)
        assert np.all(s >= 0)

    def test_requires_spectral_mixture(self):
        with pytest.raises(TypeError):
            closed_form_psd(WhiteNoiseAcvf(1.0), np.array([0.0]))

    def test_duality_against_quadrature(self):
        """Trapezoidal inverse Fourier transform of the PSD reproduces r(tau)."""
        rng = np.random.default_rng(1234)
        taus = np.linspace(-10, 10, 1024)
        for _ in range(5):
            acvf = random_mixture(rng)
            mu = np.asarray(acvf.means)[:, 0]
            s = np.asarray(acvf.variances)[:, 0]
            fmax = float(np.max(mu + 8 * np.sqrt(s))) + 1.0
            f = np.linspace(-fmax, fmax, 8193)
            spec = closed_form_psd(acvf, f)
            numeric = np.trapezoid(
                spec[None, :] * np.cos(2 * np.pi * np.outer(taus, f)), f, axis=1
            )
            np.testing.assert_allclose(numeric, evaluate(acvf, taus), atol=1e-6)


class TestIsValid:
    def test_negative_lengthscale(self):
        ok, problems = is_valid(ExponentialRotatedAcvf(1.0, -1.0, 1.0, 0.0))
        assert not ok
        assert any("lengthscale must be positive" in p for p in problems)

    def test_valid_mixture(self):
        ok, problems = is_valid(SpectralMixtureAcvf([1.0, 2.0], [0.1, 0.4], [0.01, 0.02]))
        assert ok and problems == []

    def test_zero_white_noise_variance(self):
        ok, _ = is_valid(WhiteNoiseAcvf(0.0))
        assert not ok

    def test_mixture_variance_floor(self):
        ok, problems = is_valid(SpectralMixtureAcvf([1.0], [0.1], [0.0]))
        assert not ok
        assert any("variance" in p for p in problems)

    def test_additive_recurses(self):
        bad = AdditiveAcvf(WhiteNoiseAcvf(-1.0), WhiteNoiseAcvf(1.0))
        ok, problems = is_valid(bad)
        assert not ok
        assert any(p.startswith("additive.r_x") for p in problems)

    def test_additive_requires_1d_parts(self):
        ok, problems = is_valid(AdditiveAcvf(WhiteNoiseAcvf(1.0, dim=2), WhiteNoiseAcvf(1.0)))
        assert not ok
