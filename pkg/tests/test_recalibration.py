"""Scalar recalibration: known-multiplier oracles and scale-invariance."""

import numpy as np
import pytest

from uqregress.calibration import calibration_curve
from uqregress.errors import AllSigmaZeroError, NonPositiveScalarError
from uqregress.metrics import accuracy, dispersion, sharpness
from uqregress.recalibration import apply_scalar, fit_scalar

from conftest import gaussian_null, make_pset


class TestApplyScalar:
    def test_identity(self):
        p = gaussian_null(50, seed=1)
        q = apply_scalar(p, 1.0)
        np.testing.assert_array_equal(q.sigma, p.sigma)
        np.testing.assert_array_equal(q.mu, p.mu)

    def test_doubling(self):
        p = make_pset([0.0, 0.0], [0.0, 0.0], [0.1, 0.2])
        np.testing.assert_allclose(apply_scalar(p, 2.0).sigma, [0.2, 0.4])

    @pytest.mark.parametrize("s", [0.0, -1.0, float("inf"), float("nan")])
    def test_rejects_non_positive(self, s):
        with pytest.raises(NonPositiveScalarError):
            apply_scalar(gaussian_null(10, seed=2), s)

    def test_sharpness_homogeneity(self):
        p = gaussian_null(200, seed=3)
        assert sharpness(apply_scalar(p, 4.0)) == pytest.approx(4.0 * sharpness(p), rel=1e-12)

    def test_cv_invariant(self):
        p = gaussian_null(300, seed=4)
        assert dispersion(apply_scalar(p, 9.0)).cv == pytest.approx(dispersion(p).cv, rel=1e-12)

    def test_iqr_scales_exactly(self):
        p = gaussian_null(300, seed=5)
        assert dispersion(apply_scalar(p, 2.5)).iqr == pytest.approx(
            2.5 * dispersion(p).iqr, rel=1e-12
        )

    def test_accuracy_untouched(self):
        p = gaussian_null(100, seed=6)
        assert accuracy(apply_scalar(p, 3.0)) == accuracy(p)


class TestFitScalar:
    def test_halved_sigma_recovers_factor_two(self):
        p = gaussian_null(20_000, seed=7, sigma_scale=0.5)
        res = fit_scalar(p)
        assert 1.9 <= res.scalar <= 2.1
        assert res.area_after <= res.area_before

    def test_calibrated_data_stays_near_one(self):
        p = gaussian_null(20_000, seed=8)
        res = fit_scalar(p)
        assert 0.95 <= res.scalar <= 1.05

    def test_never_worse_than_uncalibrated_with_default_bracket(self):
        for seed in (9, 10, 11):
            p = gaussian_null(2000, seed=seed, sigma_scale=3.0)
            res = fit_scalar(p)
            assert res.area_after <= res.area_before + 1e-9

    def test_area_after_is_reproducible(self):
        p = gaussian_null(5000, seed=12, sigma_scale=0.3)
        res = fit_scalar(p)
        recomputed = calibration_curve(apply_scalar(p, res.scalar)).miscalibration_area
        assert recomputed == pytest.approx(res.area_after, abs=1e-12)

    def test_scalar_inside_bracket(self):
        p = gaussian_null(2000, seed=13, sigma_scale=0.01)
        res = fit_scalar(p, bracket_lo=0.5, bracket_hi=2.0)
        assert 0.5 <= res.scalar <= 2.0

    def test_all_sigma_zero(self):
        with pytest.raises(AllSigmaZeroError):
            fit_scalar(make_pset([1.0, 2.0], [1.0, 2.0], [0.0, 0.0]))

    def test_brent_metadata_present(self):
        res = fit_scalar(gaussian_null(1000, seed=14, sigma_scale=2.0))
        assert res.brent.iterations > 0
        assert res.grid_size == 99
