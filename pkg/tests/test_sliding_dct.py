import numpy as np
import pytest

from blurmap.errors import ContractViolation
from blurmap.transform.sliding_dct import (
    ScaleSet,
    dct2,
    dct_basis,
    extract_patch,
    hf_count,
    hf_magnitudes_at,
    hf_magnitudes_naive,
    hf_magnitudes_plane,
    hf_strip,
    high_freq_indices,
    high_freq_positions,
    idct2,
    pad_for,
)


def test_dct2_of_constant_patch():
    coeffs = dct2(np.full((7, 7), 0.3))
    assert coeffs[0, 0] == pytest.approx(7 * 0.3)
    rest = coeffs.copy()
    rest[0, 0] = 0.0
    assert np.max(np.abs(rest)) < 1e-12


def test_dct2_is_orthonormal(rng):
    patch = rng.random((15, 15))
    coeffs = dct2(patch)
    assert np.max(np.abs(idct2(coeffs) - patch)) < 1e-10
    assert np.sum(coeffs ** 2) == pytest.approx(np.sum(patch ** 2), rel=1e-9)


def test_basis_matches_scipy_dct(rng):
    patch = rng.random((7, 7))
    C = dct_basis(7)
    assert np.allclose(C @ patch @ C.T, dct2(patch), atol=1e-12)


@pytest.mark.parametrize("M", [1, 3, 7, 15, 31, 63])
def test_index_set_cardinality(M):
    assert len(high_freq_indices(M)) == (M * M + M) // 2 == hf_count(M)


def test_index_set_small_cases():
    assert len(high_freq_indices(7)) == 28
    assert high_freq_indices(1) == [(0, 0)]
    assert high_freq_indices(3) == [(0, 2), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]


def test_scale_set_defaults():
    scales = ScaleSet()
    assert scales.sizes == (7, 15, 31, 63)
    assert scales.m == 4
    assert scales.retained == 116
    assert scales.fused_length == 2660
    assert all(m == 2 ** (2 + r) - 1 for r, m in enumerate(scales.sizes, start=1))


@pytest.mark.parametrize("sizes", [(8,), (1,), (7, 7), (15, 7), ()])
def test_scale_set_rejects_bad_sizes(sizes):
    with pytest.raises(ContractViolation):
        ScaleSet(sizes=sizes)


def test_constant_image_has_no_high_frequencies():
    G = np.full((12, 12), 0.6)
    assert np.max(hf_magnitudes_at(G, 5, 5, 7).values) < 1e-12
    assert np.max(hf_magnitudes_plane(G, 7)) < 1e-12


def test_vector_length_and_sign(rng):
    G = rng.random((10, 10))
    for M in (3, 7, 15):
        vec = hf_magnitudes_at(G, 0, 9, M)
        assert vec.scale == M
        assert vec.values.shape == (hf_count(M),)
        assert np.all(vec.values >= 0)


def test_at_matches_explicit_patch_dct():
    G = np.random.default_rng(3).random((32, 32))
    M = 7
    patch = G[16 - 3:16 + 4, 16 - 3:16 + 4]
    coeffs = dct2(patch)
    expected = np.array([abs(coeffs[u, v]) for u, v in high_freq_indices(M)])
    assert np.max(np.abs(hf_magnitudes_at(G, 16, 16, M).values - expected)) < 1e-8


def test_patch_uses_replicate_padding():
    G = np.arange(16, dtype=np.float64).reshape(4, 4)
    patch = extract_patch(G, 0, 0, 3)
    assert patch.tolist() == [[0, 0, 1], [0, 0, 1], [4, 4, 5]]


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("M", [7, 15])
@pytest.mark.parametrize("shape", [(24, 24), (32, 32)])
def test_separable_path_matches_naive(seed, M, shape):
    G = np.random.default_rng(seed).random(shape)
    fast = hf_magnitudes_plane(G, M)
    naive = hf_magnitudes_naive(G, M)
    assert fast.shape == (hf_count(M),) + shape
    assert np.max(np.abs(fast - naive)) <= 1e-8


def test_separable_path_independent_of_strip_height(rng):
    G = rng.random((21, 17))
    reference = hf_magnitudes_plane(G, 7, strip_rows=1)
    for strip_rows in (3, 8, 21, 64):
        assert np.max(np.abs(hf_magnitudes_plane(G, 7, strip_rows=strip_rows) - reference)) <= 1e-12


def test_interior_pixels_ignore_padding(rng):
    G = rng.random((20, 20))
    M = 7
    bordered = G.copy()
    bordered[0, :] = 5.0
    bordered[:, -1] = -3.0
    # pixel (10, 10) is at least 3 pixels from every border
    assert np.array_equal(hf_magnitudes_at(G, 10, 10, M).values, hf_magnitudes_at(bordered, 10, 10, M).values)


@pytest.mark.parametrize("M", [3, 7, 15])
def test_band_positions_cover_every_index_once(M):
    positions = high_freq_positions(M)
    assert [len(p) for p in positions] == list(range(1, M + 1))
    assert sorted(np.concatenate(positions).tolist()) == list(range(hf_count(M)))
    indices = high_freq_indices(M)
    for v, p in enumerate(positions):
        assert [indices[k] for k in p] == [(u, v) for u in range(M - 1 - v, M)]


def test_strided_strip_matches_naive(rng):
    G = rng.random((13, 11))
    M = 7
    block = hf_strip(pad_for(G, 5), 5, M, range(1, 12, 3), range(0, 11, 2))
    reference = hf_magnitudes_naive(G, M)
    assert block.shape == (4, 6, hf_count(M))
    for a, i in enumerate(range(1, 12, 3)):
        for b, j in enumerate(range(0, 11, 2)):
            assert np.allclose(block[a, b], reference[:, i, j], atol=1e-12)
