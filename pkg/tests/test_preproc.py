import math

import numpy as np
import pytest

from blurmap.errors import ContractViolation
from blurmap.transform.preproc import (
    GaussianParams,
    gaussian_filter,
    gaussian_kernel_2d,
    gradient_magnitude,
)


def test_constant_image_is_preserved():
    img = np.full((6, 9), 0.37)
    assert np.allclose(gaussian_filter(img), 0.37, atol=1e-15)


def test_impulse_response_center_weight():
    img = np.zeros((5, 5))
    img[2, 2] = 1.0
    out = gaussian_filter(img, GaussianParams(sigma=0.5, radius=1))

    x = np.array([-1.0, 0.0, 1.0])
    weights = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / (2 * 0.25))
    expected = 1.0 / weights.sum()
    assert out[2, 2] == pytest.approx(expected, abs=1e-12)
    assert out[2, 2] == pytest.approx(0.6193, abs=1e-4)


def test_kernel_is_normalized():
    assert gaussian_kernel_2d(GaussianParams(sigma=1.3, radius=4)).sum() == pytest.approx(1.0)


def test_repeated_filtering_matches_wider_sigma():
    yy, xx = np.mgrid[:32, :32]
    smooth = 0.5 + 0.4 * np.sin(xx / 5.0) * np.cos(yy / 7.0)
    twice = gaussian_filter(gaussian_filter(smooth))
    once = gaussian_filter(smooth, GaussianParams.for_sigma(math.sqrt(2) * 0.5))
    assert np.max(np.abs(twice - once)) <= 0.02


def test_params_validation():
    with pytest.raises(ContractViolation):
        GaussianParams(sigma=0.0)
    with pytest.raises(ContractViolation):
        GaussianParams(radius=0)


def test_constant_image_has_zero_gradient():
    assert np.all(gradient_magnitude(np.full((7, 7), 0.8)) == 0.0)


def test_horizontal_ramp_gradient():
    img = np.tile(np.arange(10, dtype=np.float64), (6, 1))
    g = gradient_magnitude(img)
    assert g.shape == img.shape
    assert np.allclose(g[:-1, :-1], math.sqrt(2))


def test_single_white_pixel():
    img = np.zeros((7, 7))
    img[3, 3] = 1.0
    g = gradient_magnitude(img)
    # the pixel lies on one diagonal of each 2x2 window that contains it
    for i, j in [(3, 3), (2, 2), (2, 3), (3, 2)]:
        assert g[i, j] == pytest.approx(1.0)
    assert np.count_nonzero(g) == 4


def test_gradient_invariants(rng):
    img = rng.random((16, 20))
    g = gradient_magnitude(img)
    assert np.all(g >= 0)
    assert np.allclose(gradient_magnitude(img + 3.25), g, atol=1e-12)
    assert np.allclose(gradient_magnitude(2.5 * img), 2.5 * g, atol=1e-12)
