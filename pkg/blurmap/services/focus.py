"""Applications of the blur map: camera focus points, DOF estimate, blur magnification."""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from ..imageio import GrayImage, check_same_shape
from ..transform.postproc import BlurMap, normalize_values
from ..transform.preproc import GaussianParams, gaussian_filter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FocusParams:
    """Threshold on the smoothed map and the pre-smoothing sigma (pixels)."""

    threshold: float = 0.98
    sigma: float = 5.0

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ContractViolation(f"focus threshold must be in (0, 1], got {self.threshold}")
        if not self.sigma > 0:
            raise ContractViolation(f"focus sigma must be > 0, got {self.sigma}")


def focus_points(blur_map: BlurMap, params: FocusParams = FocusParams()) -> GrayImage:
    """Binary map F: 1 where the smoothed, renormalized map reaches the threshold."""
    smoothed = gaussian_filter(blur_map.map, GaussianParams.for_sigma(params.sigma))
    d_prime = normalize_values(smoothed)
    focus = (d_prime >= params.threshold).astype(np.float64)
    logger.info(f"Focus points: {int(focus.sum())} pixels at threshold {params.threshold}")
    return focus


def dof_estimate(blur_map: BlurMap) -> float:
    """Median of the map (lower median for even pixel counts)."""
    values = np.sort(blur_map.map, axis=None)
    return float(values[(values.size - 1) // 2])


def _blur_channels(img: np.ndarray, sigma: float) -> np.ndarray:
    params = GaussianParams.for_sigma(sigma)
    if img.ndim == 2:
        return gaussian_filter(img, params)
    return np.stack([gaussian_filter(img[..., c], params) for c in range(img.shape[2])], axis=2)


def magnify_blur(img: np.ndarray, blur_map: BlurMap, strength: float, levels: int = 8) -> np.ndarray:
    """Re-blurs out-of-focus areas with sigma = strength * (1 - D).

    `levels` uniformly blurred copies (sigma 0 ... strength) are blended by
    linear interpolation over sigma. Works on gray (H, W) and color
    (H, W, C) images.
    """
    img = np.asarray(img, dtype=np.float64)
    check_same_shape(img, blur_map.map, "image and blur map")
    if strength < 0:
        raise ContractViolation(f"strength must be >= 0, got {strength}")
    if levels < 2:
        raise ContractViolation(f"levels must be >= 2, got {levels}")
    if strength == 0:
        return img.copy()

    sigmas = np.linspace(0.0, strength, levels)
    stack = [img] + [_blur_channels(img, s) for s in sigmas[1:]]

    position = (1.0 - np.clip(blur_map.map, 0.0, 1.0)) * (levels - 1)
    lower = np.minimum(np.floor(position).astype(int), levels - 2)
    frac = position - lower
    if img.ndim == 3:
        lower = lower[..., None]
        frac = frac[..., None]

    out = np.zeros_like(img)
    for k in range(levels - 1):
        weight_lo = np.where(lower == k, 1.0 - frac, 0.0)
        weight_hi = np.where(lower == k, frac, 0.0)
        out += weight_lo * stack[k] + weight_hi * stack[k + 1]

    logger.info(f"Magnified blur with strength={strength} over {levels} levels")
    return out


def focus_overlay(image: np.ndarray, focus: GrayImage) -> np.ndarray:
    """RGB rendering of the image with focus points painted red."""
    image = np.asarray(image, dtype=np.float64)
    check_same_shape(image, focus, "image and focus map")
    rgb = np.repeat(image[..., None], 3, axis=2) if image.ndim == 2 else image[..., :3].copy()
    rgb[focus > 0] = (1.0, 0.0, 0.0)
    return rgb
