"""Numerical core: pre-filtering, sliding DCT, HiFST layers, smoothing."""

from .preproc import GaussianParams, gaussian_filter, gradient_magnitude
from .sliding_dct import ScaleSet, dct2, high_freq_indices, hf_magnitudes_at, hf_magnitudes_plane
from .hifst import EntropyParams, FusedStack, fuse_and_sort, layer_normalize, local_entropy, max_pool, normalized_max_pool, weight_map
from .postproc import BlurMap, SmoothParams, domain_transform_smooth, normalize_map

__all__ = [
    "GaussianParams",
    "gaussian_filter",
    "gradient_magnitude",
    "ScaleSet",
    "dct2",
    "high_freq_indices",
    "hf_magnitudes_at",
    "hf_magnitudes_plane",
    "EntropyParams",
    "FusedStack",
    "fuse_and_sort",
    "layer_normalize",
    "local_entropy",
    "max_pool",
    "normalized_max_pool",
    "weight_map",
    "BlurMap",
    "SmoothParams",
    "domain_transform_smooth",
    "normalize_map",
]
