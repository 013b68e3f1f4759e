"""Denoising pre-filter and Roberts gradient magnitude."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ContractViolation
from ..imageio import GrayImage, check_gray

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussianParams:
    """Sampled Gaussian kernel parameters (sigma and radius in pixels)."""

    sigma: float = 0.5
    radius: int = 1

    def __post_init__(self):
        if not self.sigma > 0:
            raise ContractViolation(f"gaussian sigma must be > 0, got {self.sigma}")
        if int(self.radius) != self.radius or self.radius < 1:
            raise ContractViolation(f"gaussian radius must be an integer >= 1, got {self.radius}")

    @classmethod
    def for_sigma(cls, sigma: float) -> "GaussianParams":
        """Kernel covering three standard deviations."""
        return cls(sigma=sigma, radius=max(1, math.ceil(3 * sigma)))


def gaussian_kernel_1d(params: GaussianParams) -> np.ndarray:
    """Sampled, renormalized 1-D Gaussian on [-radius, radius]."""
    x = np.arange(-params.radius, params.radius + 1, dtype=np.float64)
    weights = np.exp(-(x ** 2) / (2.0 * params.sigma ** 2))
    return weights / weights.sum()


def gaussian_kernel_2d(params: GaussianParams) -> np.ndarray:
    """Sampled 2-D Gaussian, normalized to unit mass."""
    k = gaussian_kernel_1d(params)
    return np.outer(k, k)


def gaussian_filter(img: GrayImage, params: GaussianParams = GaussianParams()) -> GrayImage:
    """Gaussian smoothing with replicate padding (B_g for the default params).

    The sampled 2-D kernel is the outer product of the 1-D one and the
    renormalization factorizes, so two 1-D passes give the same result.
    """
    img = check_gray(img)
    k = gaussian_kernel_1d(params)
    out = ndimage.correlate1d(img, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def gradient_magnitude(img: GrayImage) -> GrayImage:
    """Roberts cross gradient magnitude, anchored at the top-left kernel element.

    gx(i, j) = img(i, j) - img(i+1, j+1)
    gy(i, j) = img(i, j+1) - img(i+1, j)

    The bottom row and right column are replicated so the output keeps the
    input dimensions.
    """
    img = check_gray(img)
    padded = np.pad(img, ((0, 1), (0, 1)), mode="edge")
    gx = padded[:-1, :-1] - padded[1:, 1:]
    gy = padded[:-1, 1:] - padded[1:, :-1]
    return np.hypot(gx, gy)
