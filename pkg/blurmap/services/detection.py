"""Blur detection pipeline: image -> B_g -> G -> HiFST -> T -> omega -> D."""

import logging
import time
from contextlib import contextmanager
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import PipelineConfig, get_config
from ..imageio import GrayImage, PathLike, check_gray, load_image
from ..transform.hifst import (
    FusedStack,
    fuse_and_sort,
    layer_normalize,
    local_entropy,
    max_pool,
    normalized_max_pool,
    weight_map,
)
from ..transform.postproc import BlurMap, domain_transform_smooth, normalize_map, normalize_values
from ..transform.preproc import gaussian_filter, gradient_magnitude
from ..transform.sliding_dct import hf_magnitudes_at

logger = logging.getLogger(__name__)


@contextmanager
def _stage(name: str, timings: Dict[str, float]):
    started = time.perf_counter()
    yield
    timings[name] = time.perf_counter() - started
    logger.info(f"stage={name} seconds={timings[name]:.3f}")


def gradient_of(image: GrayImage, config: PipelineConfig) -> GrayImage:
    """G: Roberts gradient magnitude of the Gaussian pre-filtered image."""
    return gradient_magnitude(gaussian_filter(image, config.gaussian_params()))


def compute_max_pool(image: GrayImage, config: Optional[PipelineConfig] = None) -> GrayImage:
    """T for an image via the separable sliding-DCT path."""
    config = config or get_config()
    G = gradient_of(check_gray(image), config)
    stack = fuse_and_sort(G, config.scale_set(), stride=config.stride, strip_rows=config.strip_rows)
    T, _ = normalized_max_pool(stack)
    return T


def brute_force_stack(G: GrayImage, config: PipelineConfig) -> FusedStack:
    """FusedStack from per-pixel patch DCTs and a full sort. Slow; small images only."""
    scales = config.scale_set()
    S = scales.retained
    n1, n2 = G.shape
    values = np.empty((S, n1, n2))
    for i in range(n1):
        for j in range(n2):
            fused = np.concatenate([hf_magnitudes_at(G, i, j, M).values for M in scales.sizes])
            values[:, i, j] = np.sort(fused)[:S]
    return FusedStack(values=values)


def compute_max_pool_brute_force(image: GrayImage, config: Optional[PipelineConfig] = None) -> GrayImage:
    config = config or get_config()
    G = gradient_of(check_gray(image), config)
    normalized, _ = layer_normalize(brute_force_stack(G, config))
    return max_pool(normalized)


def detect(image: GrayImage, config: Optional[PipelineConfig] = None) -> BlurMap:
    """Full pipeline for one grayscale image."""
    config = config or get_config()
    image = check_gray(image)
    timings: Dict[str, float] = {}

    with _stage("gradient", timings):
        G = gradient_of(image, config)
    with _stage("fuse_and_sort", timings):
        stack = fuse_and_sort(G, config.scale_set(), stride=config.stride, strip_rows=config.strip_rows)
    with _stage("max_pool", timings):
        T, _ = normalized_max_pool(stack)
        del stack
    with _stage("entropy", timings):
        omega = local_entropy(T, config.entropy_params())
        weighted = weight_map(T, omega)
    with _stage("smoothing", timings):
        smooth = config.smooth_params()
        guide = image if smooth.guide == "input" else normalize_values(weighted)
        smoothed = domain_transform_smooth(weighted, guide, smooth)

    params = config.as_dict(pipeline_only=True)
    params["timings"] = timings
    blur_map = normalize_map(smoothed, params)
    logger.info(
        f"Detected blur map {image.shape[0]}x{image.shape[1]} "
        f"in {sum(timings.values()):.2f}s (scales={config.scales}, stride={config.stride})"
    )
    return blur_map


def detect_file(path: PathLike, config: Optional[PipelineConfig] = None) -> Tuple[GrayImage, BlurMap]:
    image = load_image(path)
    return image, detect(image, config)
