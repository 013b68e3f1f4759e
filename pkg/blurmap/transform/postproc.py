"""Edge-preserving smoothing (domain transform, recursive filter) and final normalization."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from ..errors import ContractViolation
from ..imageio import GrayImage, check_gray, check_same_shape

logger = logging.getLogger(__name__)

GUIDES = ("input", "map")


@dataclass(frozen=True)
class SmoothParams:
    sigma_s: float = 15.0
    sigma_r: float = 0.3
    iterations: int = 3
    guide: str = "input"

    def __post_init__(self):
        if not self.sigma_s > 0:
            raise ContractViolation(f"sigma_s must be > 0, got {self.sigma_s}")
        if not self.sigma_r > 0:
            raise ContractViolation(f"sigma_r must be > 0, got {self.sigma_r}")
        if self.iterations < 1:
            raise ContractViolation(f"iterations must be >= 1, got {self.iterations}")
        if self.guide not in GUIDES:
            raise ContractViolation(f"guide must be one of {GUIDES}, got {self.guide!r}")

    def sigma_h(self, i: int) -> float:
        """Box sigma of iteration i (1-based); the variances sum to sigma_s^2."""
        n = self.iterations
        return self.sigma_s * math.sqrt(3.0) * 2.0 ** (n - i) / math.sqrt(4.0 ** n - 1.0)


@dataclass(frozen=True)
class BlurMap:
    """Final map in [0, 1], higher = sharper, plus the parameters that produced it."""

    map: GrayImage
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def shape(self):
        return self.map.shape


def _recursive_filter_rows(img: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """One causal + anti-causal pass along axis 1.

    weights[:, n] = a ** d(n) links sample n to sample n - 1.
    """
    out = img.copy()
    n = out.shape[1]
    for j in range(1, n):
        out[:, j] += weights[:, j] * (out[:, j - 1] - out[:, j])
    for j in range(n - 2, -1, -1):
        out[:, j] += weights[:, j + 1] * (out[:, j + 1] - out[:, j])
    return out


def domain_transform_smooth(
    map_: GrayImage,
    guide: GrayImage,
    params: SmoothParams = SmoothParams(),
) -> GrayImage:
    """Recursive-filter domain transform of `map_`, edges taken from `guide`."""
    map_ = check_gray(map_)
    guide = check_gray(guide)
    check_same_shape(map_, guide, "map and guide")

    ratio = params.sigma_s / params.sigma_r
    # transformed-domain distance between neighbours, 1 + (s/r)|dI|
    dh = np.ones_like(guide)
    dv = np.ones_like(guide)
    dh[:, 1:] += ratio * np.abs(np.diff(guide, axis=1))
    dv[1:, :] += ratio * np.abs(np.diff(guide, axis=0))

    out = map_
    for i in range(1, params.iterations + 1):
        a = math.exp(-math.sqrt(2.0) / params.sigma_h(i))
        out = _recursive_filter_rows(out, a ** dh)
        out = _recursive_filter_rows(out.T, (a ** dv).T).T
    return np.ascontiguousarray(out)


def normalize_values(values: np.ndarray) -> np.ndarray:
    """Min-max to [0, 1]; constant input maps to zeros."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def normalize_map(map_: GrayImage, params: Dict[str, Any] = None) -> BlurMap:
    """Final normalization; attaches the parameter record."""
    map_ = check_gray(map_)
    return BlurMap(map=normalize_values(map_), params=dict(params or {}))
