"""Seeded synthetic image/mask pairs: sharp texture composited over a blurred background."""

import csv
import logging
import math
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy import ndimage
from skimage.restoration import denoise_bilateral

from ..errors import ContractViolation
from ..imageio import GrayImage, PathLike, save_image
from ..transform.postproc import normalize_values
from ..transform.preproc import GaussianParams, gaussian_filter

logger = logging.getLogger(__name__)

SHAPES = ("half-plane", "square", "disk")
BLUR_KINDS = ("gaussian", "motion", "disk", "radial", "zoom", "surface")
DEFAULT_SIGMAS = (2.0, 4.0, 8.0)

Seed = Union[int, Sequence[int]]


def region_mask(shape: str, size: int) -> GrayImage:
    """1 = sharp. Square side and disk radius are size // 4 and size // 4."""
    mask = np.zeros((size, size))
    if shape == "half-plane":
        mask[:, : size // 2] = 1.0
    elif shape == "square":
        side = size // 4
        lo = (size - side) // 2
        mask[lo:lo + side, lo:lo + side] = 1.0
    elif shape == "disk":
        yy, xx = np.mgrid[:size, :size]
        c = (size - 1) / 2.0
        mask[(yy - c) ** 2 + (xx - c) ** 2 <= (size // 4) ** 2] = 1.0
    else:
        raise ContractViolation(f"unknown region shape {shape!r}, expected one of {SHAPES}")
    return mask


def texture(rng: np.random.Generator, size: int) -> GrayImage:
    """Fine random texture in [0.1, 0.9]."""
    noise = rng.random((size, size))
    return 0.1 + 0.8 * normalize_values(gaussian_filter(noise, GaussianParams.for_sigma(1.0)))


def disk_kernel(radius: float) -> np.ndarray:
    r = max(1, int(math.ceil(radius)))
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    kernel = (yy ** 2 + xx ** 2 <= radius ** 2).astype(np.float64)
    return kernel / kernel.sum()


def motion_kernel(sigma: float, angle: float) -> np.ndarray:
    """Normalized line of length 2 * ceil(2 sigma) + 1 through the centre."""
    half = int(math.ceil(2 * sigma))
    size = 2 * half + 1
    kernel = np.zeros((size, size))
    for t in np.linspace(-half, half, 4 * size):
        row = int(round(half - t * math.sin(angle)))
        col = int(round(half + t * math.cos(angle)))
        kernel[row, col] = 1.0
    return kernel / kernel.sum()


def swept_blur(img: GrayImage, sigma: float, path: str) -> GrayImage:
    """Spatially varying blur around the image centre.

    Each pixel averages samples along a rotation arc (`radial`) or a ray
    through the centre (`zoom`). The blur length grows with the distance
    from the centre and is 4 sigma end to end a quarter of the image side away.
    """
    rows, cols = img.shape
    yy, xx = np.indices(img.shape, dtype=np.float64)
    cy, cx = (rows - 1) / 2.0, (cols - 1) / 2.0
    dy, dx = yy - cy, xx - cx
    reach = 2.0 * sigma / (max(rows, cols) / 4.0)
    steps = 2 * int(math.ceil(4 * sigma)) + 1

    total = np.zeros_like(img, dtype=np.float64)
    for t in np.linspace(-reach, reach, steps):
        if path == "radial":
            c, s = math.cos(t), math.sin(t)
            coords = [cy + dy * c + dx * s, cx + dx * c - dy * s]
        else:
            coords = [cy + dy * (1.0 + t), cx + dx * (1.0 + t)]
        total += ndimage.map_coordinates(img, coords, order=1, mode="nearest")
    return total / steps


def apply_blur(img: GrayImage, kind: str, sigma: float, rng: np.random.Generator) -> GrayImage:
    if kind == "gaussian":
        return gaussian_filter(img, GaussianParams.for_sigma(sigma))
    if kind == "disk":
        return ndimage.correlate(img, disk_kernel(sigma), mode="nearest")
    if kind == "motion":
        return ndimage.correlate(img, motion_kernel(sigma, rng.uniform(0.0, math.pi)), mode="nearest")
    if kind in ("radial", "zoom"):
        return swept_blur(img, sigma, kind)
    if kind == "surface":
        # edge-preserving: range sigma wide enough to flatten the texture
        return denoise_bilateral(img, sigma_color=0.3, sigma_spatial=sigma, mode="edge")
    raise ContractViolation(f"unknown blur kind {kind!r}, expected one of {BLUR_KINDS}")


def composite(mask: GrayImage, sigma_blur: float, seed: Seed, kind: str = "gaussian") -> GrayImage:
    rng = np.random.default_rng(seed)
    size = mask.shape[0]
    sharp = texture(rng, size)
    background = apply_blur(texture(rng, size), kind, sigma_blur, rng)
    return mask * sharp + (1.0 - mask) * background


def make_pair(
    shape: str = "half-plane",
    size: int = 256,
    sigma_blur: float = 4.0,
    seed: Seed = 7,
    kind: str = "gaussian",
) -> Tuple[GrayImage, GrayImage]:
    """(image, mask) with the sharp region given by `shape`."""
    if size < 16:
        raise ContractViolation(f"synthetic images need size >= 16, got {size}")
    if sigma_blur <= 0:
        raise ContractViolation(f"sigma_blur must be > 0, got {sigma_blur}")
    mask = region_mask(shape, size)
    return composite(mask, sigma_blur, seed, kind), mask


def make_sharp_fraction_pair(
    fraction: float,
    size: int = 128,
    sigma_blur: float = 4.0,
    seed: Seed = 7,
) -> Tuple[GrayImage, GrayImage]:
    """Image sharp on the leftmost `fraction` of its columns."""
    if not 0.0 <= fraction <= 1.0:
        raise ContractViolation(f"fraction must be in [0, 1], got {fraction}")
    mask = np.zeros((size, size))
    mask[:, : int(round(fraction * size))] = 1.0
    return composite(mask, sigma_blur, seed), mask


def generate_suite(
    out_dir: PathLike,
    count: int = 20,
    seed: int = 7,
    sigmas: Sequence[float] = DEFAULT_SIGMAS,
    shapes: Sequence[str] = SHAPES,
    kinds: Sequence[str] = ("gaussian",),
    size: int = 256,
) -> List[Path]:
    """Writes images/synth_XXX.png, masks/synth_XXX.png and manifest.csv.

    Pair k cycles through shapes, then sigmas, then kinds, and draws its
    randomness from the seed sequence (seed, k).
    """
    out_dir = Path(out_dir)
    images_dir, masks_dir = out_dir / "images", out_dir / "masks"
    images_dir.mkdir(parents=True, exist_ok=True)
    masks_dir.mkdir(parents=True, exist_ok=True)

    written = []
    rows = []
    for k in range(count):
        shape = shapes[k % len(shapes)]
        sigma = float(sigmas[(k // len(shapes)) % len(sigmas)])
        kind = kinds[(k // (len(shapes) * len(sigmas))) % len(kinds)]
        image, mask = make_pair(shape, size, sigma, seed=[seed, k], kind=kind)

        name = f"synth_{k:03d}"
        save_image(image, images_dir / f"{name}.png")
        save_image(mask, masks_dir / f"{name}.png")
        written.append(images_dir / f"{name}.png")
        rows.append((name, shape, sigma, kind))

    with (out_dir / "manifest.csv").open("w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(("name", "shape", "sigma_blur", "kind"))
        writer.writerows(rows)

    logger.info(f"Generated {count} synthetic pairs in {out_dir} (seed={seed})")
    return written
