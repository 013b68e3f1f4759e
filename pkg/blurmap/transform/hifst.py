"""Multiscale fusion, sorting, layer normalization, max pooling and entropy weighting."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from skimage.filters import rank

from ..errors import ContractViolation
from ..imageio import GrayImage, check_gray, check_same_shape
from ..workers import map_ordered
from .sliding_dct import ScaleSet, hf_strip, pad_for

logger = logging.getLogger(__name__)

# rank filters take up to 12-bit integer images
MAX_ENTROPY_BINS = 4096


@dataclass(frozen=True)
class FusedStack:
    """Per-pixel ascending-sorted S smallest fused magnitudes.

    values has shape (S, N1, N2); values[t] is layer L_t.
    """

    values: np.ndarray

    @property
    def S(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape[1:]


@dataclass(frozen=True)
class LayerStats:
    minima: np.ndarray
    maxima: np.ndarray

    @property
    def degenerate(self) -> np.ndarray:
        return self.maxima <= self.minima


@dataclass(frozen=True)
class EntropyParams:
    """Local entropy window (k x k) and histogram over [0, 1]."""

    window: int = 7
    bins: int = 256

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ContractViolation(f"entropy window must be odd and >= 3, got {self.window}")
        if not 2 <= self.bins <= MAX_ENTROPY_BINS:
            raise ContractViolation(f"entropy bins must be in [2, {MAX_ENTROPY_BINS}], got {self.bins}")

    @property
    def upper_bound(self) -> float:
        """log2(min(k^2, bins)), the largest attainable entropy."""
        return float(np.log2(min(self.window ** 2, self.bins)))


def _sorted_strip(padded, pad, sizes, S, rows, cols) -> np.ndarray:
    fused = np.concatenate([hf_strip(padded, pad, M, rows, cols) for M in sizes], axis=-1)
    if S < fused.shape[-1]:
        fused = np.partition(fused, S - 1, axis=-1)[..., :S]
    return np.sort(fused, axis=-1)


def fuse_and_sort(
    G: GrayImage,
    scales: ScaleSet = ScaleSet(),
    stride: int = 1,
    strip_rows: int = 8,
) -> FusedStack:
    """Fuses all scales per pixel and keeps the S = sum(M_r) smallest, ascending.

    With stride > 1 only every stride-th row and column is evaluated and
    the stack is upsampled by pixel repetition.
    """
    G = check_gray(G)
    if stride < 1:
        raise ContractViolation(f"stride must be >= 1, got {stride}")
    if strip_rows < 1:
        raise ContractViolation(f"strip_rows must be >= 1, got {strip_rows}")

    n1, n2 = G.shape
    S = scales.retained
    pad = scales.max_half
    padded = pad_for(G, pad)
    grid_rows = range(0, n1, stride)
    grid_cols = range(0, n2, stride)
    strips = [grid_rows[k:k + strip_rows] for k in range(0, len(grid_rows), strip_rows)]

    logger.debug(f"fuse_and_sort: {len(strips)} strips, scales={scales.sizes}, S={S}")
    blocks = map_ordered(
        lambda rows: _sorted_strip(padded, pad, scales.sizes, S, rows, grid_cols),
        strips,
    )
    values = np.moveaxis(np.concatenate(blocks, axis=0), -1, 0)

    if stride > 1:
        values = np.repeat(np.repeat(values, stride, axis=1), stride, axis=2)[:, :n1, :n2]

    return FusedStack(values=np.ascontiguousarray(values))


def layer_normalize(stack: FusedStack) -> Tuple[np.ndarray, LayerStats]:
    """Min-max normalizes every layer over all pixels; constant layers become zeros."""
    values = stack.values
    stats = LayerStats(minima=values.min(axis=(1, 2)), maxima=values.max(axis=(1, 2)))

    out = np.zeros_like(values)
    for t in np.flatnonzero(~stats.degenerate):
        np.subtract(values[t], stats.minima[t], out=out[t])
        out[t] /= stats.maxima[t] - stats.minima[t]
    return out, stats


def normalized_max_pool(stack: FusedStack) -> Tuple[GrayImage, LayerStats]:
    """max_pool(layer_normalize(stack)) without materializing the normalized stack."""
    values = stack.values
    stats = LayerStats(minima=values.min(axis=(1, 2)), maxima=values.max(axis=(1, 2)))

    T = np.zeros(stack.shape)
    layer = np.empty(stack.shape)
    for t in np.flatnonzero(~stats.degenerate):
        np.subtract(values[t], stats.minima[t], out=layer)
        layer /= stats.maxima[t] - stats.minima[t]
        np.maximum(T, layer, out=T)
    return T, stats


def max_pool(normalized: np.ndarray) -> GrayImage:
    """T(i, j): maximum over the normalized layers."""
    if normalized.ndim != 3 or normalized.shape[0] < 1:
        raise ContractViolation(f"expected a (S, N1, N2) stack, got shape {normalized.shape}")
    return normalized.max(axis=0)


def hifst_transform(G: GrayImage, scales: ScaleSet = ScaleSet(), stride: int = 1, strip_rows: int = 8) -> np.ndarray:
    """Normalized sorted layers for inspection, shape (S, N1, N2)."""
    normalized, _ = layer_normalize(fuse_and_sort(G, scales, stride=stride, strip_rows=strip_rows))
    return normalized


def entropy_bin_index(T: GrayImage, bins: int) -> np.ndarray:
    """Uniform bins over [0, 1]; the last bin is right-closed."""
    idx = np.minimum(np.floor(T * bins), bins - 1)
    return idx.astype(np.uint8 if bins <= 256 else np.uint16)


def local_entropy(T: GrayImage, params: EntropyParams = EntropyParams()) -> GrayImage:
    """Shannon entropy (bits) of the k x k replicate-padded histogram around each pixel."""
    T = check_gray(T)
    if T.min() < -1e-12 or T.max() > 1.0 + 1e-12:
        raise ContractViolation(f"entropy input must lie in [0, 1], got [{T.min()}, {T.max()}]")
    T = np.clip(T, 0.0, 1.0)

    h = params.window // 2
    idx = np.pad(entropy_bin_index(T, params.bins), h, mode="edge")
    footprint = np.ones((params.window, params.window), dtype=np.uint8)
    entropy = rank.entropy(idx, footprint)
    return np.asarray(entropy[h:-h, h:-h], dtype=np.float64)


def weight_map(T: GrayImage, omega: GrayImage) -> GrayImage:
    """D_raw = T * omega, pointwise."""
    T = check_gray(T)
    omega = check_gray(omega)
    check_same_shape(T, omega, "T and omega")
    return T * omega
