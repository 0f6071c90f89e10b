"""Synthetic generator self-consistency."""

import numpy as np
import pytest

from uqregress.core import RngSeed
from uqregress.datagen import (
    calibrated_prediction_set,
    generate_synthetic,
    noise_std,
    true_function,
)
from uqregress.errors import DomainError


class TestGenerator:
    def test_deterministic(self):
        a = generate_synthetic(100, 3, RngSeed(5))
        b = generate_synthetic(100, 3, RngSeed(5))
        np.testing.assert_array_equal(a.dataset.features, b.dataset.features)
        np.testing.assert_array_equal(a.dataset.targets, b.dataset.targets)

    def test_empty(self):
        d = generate_synthetic(0, 4, RngSeed(1))
        assert d.dataset is None
        assert d.true_sigma.size == 0

    def test_pooled_normalized_noise_is_standard(self):
        # generator self-consistency: (y - f(x)) / s(x) pooled is unit normal
        d = generate_synthetic(100_000, 3, RngSeed(9))
        z = (d.dataset.targets - true_function(d.dataset.features)) / d.true_sigma
        assert -0.02 <= z.mean() <= 0.02
        assert 0.99 <= z.std() <= 1.01

    def test_noise_std_formula(self):
        X = np.array([[0.0, 1.0], [-2.0, 0.0], [3.0, 5.0]])
        np.testing.assert_allclose(noise_std(X), [0.05, 0.45, 0.65])

    def test_features_in_cube(self):
        d = generate_synthetic(5000, 2, RngSeed(3))
        assert d.dataset.features.min() >= -3.0
        assert d.dataset.features.max() <= 3.0

    def test_groups_partition_by_first_coordinate(self):
        d = generate_synthetic(2000, 2, RngSeed(6), n_groups=4)
        groups = np.asarray(d.dataset.groups)
        assert set(groups) == {"g0", "g1", "g2", "g3"}
        x0 = d.dataset.features[:, 0]
        assert x0[groups == "g0"].max() < x0[groups == "g3"].min()

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            generate_synthetic(-1, 2, RngSeed(0))
        with pytest.raises(DomainError):
            generate_synthetic(10, 0, RngSeed(0))

    def test_oracle_prediction_set_is_calibrated(self):
        from uqregress.calibration import calibration_curve

        d = generate_synthetic(50_000, 2, RngSeed(7))
        p = calibrated_prediction_set(d)
        assert calibration_curve(p).miscalibration_area < 0.01
