import math

import numpy as np
import pytest

from blurmap.errors import ContractViolation
from blurmap.transform.postproc import SmoothParams, domain_transform_smooth, normalize_map


def test_sigma_h_variances_sum_to_sigma_s():
    params = SmoothParams(sigma_s=15.0, iterations=3)
    total = sum(params.sigma_h(i) ** 2 for i in range(1, 4))
    assert total == pytest.approx(15.0 ** 2)
    assert params.sigma_h(1) > params.sigma_h(2) > params.sigma_h(3)


def test_constant_map_is_preserved(rng):
    guide = rng.random((20, 30))
    out = domain_transform_smooth(np.full((20, 30), 0.42), guide)
    assert np.max(np.abs(out - 0.42)) < 1e-12


def test_step_is_blurred_under_uniform_guide():
    step = np.zeros((8, 40))
    step[:, 20:] = 1.0
    out = domain_transform_smooth(step, np.zeros_like(step), SmoothParams(sigma_s=5.0))
    assert 0.05 < out[4, 19] < 0.95
    assert 0.05 < out[4, 20] < 0.95


def test_step_in_guide_is_preserved():
    step = np.zeros((8, 40))
    step[:, 20:] = 1.0
    out = domain_transform_smooth(step, step, SmoothParams(sigma_s=15.0, sigma_r=0.3))
    mid = out[4]
    crossing = np.flatnonzero((mid[:-1] < 0.5) & (mid[1:] >= 0.5))
    assert crossing.size == 1
    assert abs(crossing[0] + 0.5 - 19.5) <= 2.0
    assert mid[:18].max() < 0.05
    assert mid[22:].min() > 0.95


def test_output_stays_in_input_range(rng):
    map_ = rng.random((16, 16))
    out = domain_transform_smooth(map_, rng.random((16, 16)))
    assert out.min() >= map_.min() - 1e-12
    assert out.max() <= map_.max() + 1e-12


def test_shape_mismatch_rejected():
    with pytest.raises(ContractViolation):
        domain_transform_smooth(np.zeros((4, 4)), np.zeros((4, 5)))


def test_params_validation():
    with pytest.raises(ContractViolation):
        SmoothParams(sigma_s=0.0)
    with pytest.raises(ContractViolation):
        SmoothParams(iterations=0)
    with pytest.raises(ContractViolation):
        SmoothParams(guide="mask")


def test_normalize_map_examples():
    assert normalize_map(np.array([[2.0, 4.0, 6.0]])).map.tolist() == [[0.0, 0.5, 1.0]]
    assert np.all(normalize_map(np.full((3, 3), 7.0)).map == 0.0)


def test_normalize_map_is_idempotent(rng):
    once = normalize_map(rng.random((9, 9)) * 40.0 - 3.0).map
    assert once.min() == 0.0 and once.max() == 1.0
    assert np.allclose(normalize_map(once).map, once, atol=1e-15)


def test_normalize_map_keeps_params():
    blur_map = normalize_map(np.eye(3), {"scales": [7, 15]})
    assert blur_map.params == {"scales": [7, 15]}
    assert blur_map.shape == (3, 3)
    assert not math.isnan(blur_map.map.sum())
