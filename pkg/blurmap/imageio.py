"""Raster decoding/encoding and the canonical grayscale representation.

A GrayImage is a 2-D float64 numpy array with finite values. Inputs are
scaled to [0, 1] on load; maps produced by the pipeline live in [0, 1] too.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import numpy.typing as npt
from PIL import Image, UnidentifiedImageError

from .errors import ContractViolation, ImageFormatError, ImageReadError, MapRangeError

logger = logging.getLogger(__name__)

GrayImage = npt.NDArray[np.float64]
PathLike = Union[str, Path]

# Rec. 601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

RASTER_SUFFIXES = {".png", ".jpg", ".jpeg", ".pgm", ".ppm", ".pfm", ".bmp"}
MAP_FORMATS = ("png8", "pfm32")


def check_gray(img) -> GrayImage:
    """Validates a GrayImage and returns it as a float64 array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ContractViolation(f"GrayImage must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolation(f"GrayImage must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("GrayImage contains NaN or Inf values")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "inputs") -> None:
    if a.shape[:2] != b.shape[:2]:
        raise ContractViolation(f"{what} have different dimensions: {a.shape[:2]} vs {b.shape[:2]}")


def to_gray(arr: np.ndarray) -> GrayImage:
    """Rec. 601 luminance for (H, W, 3|4) arrays; 2-D arrays pass through unchanged."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        return arr[..., :3] @ LUMA_WEIGHTS
    if arr.ndim == 3 and arr.shape[2] in (1, 2):
        return arr[..., 0]
    raise ImageFormatError(f"Cannot convert array of shape {arr.shape} to grayscale")


# ========== PFM ==========

def _read_pfm(path: Path) -> np.ndarray:
    with path.open("rb") as fp:
        kind = fp.readline().strip()
        if kind not in (b"Pf", b"PF"):
            raise ImageFormatError(f"{path}: not a PFM file")
        dims = fp.readline().split()
        scale_line = fp.readline().strip()
        try:
            width, height = int(dims[0]), int(dims[1])
            scale = float(scale_line)
        except (IndexError, ValueError) as e:
            raise ImageFormatError(f"{path}: malformed PFM header") from e
        channels = 3 if kind == b"PF" else 1
        dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
        data = np.frombuffer(fp.read(), dtype=dtype)

    expected = width * height * channels
    if data.size != expected:
        raise ImageFormatError(f"{path}: expected {expected} samples, found {data.size}")
    shape = (height, width, channels) if channels == 3 else (height, width)
    # PFM stores rows bottom to top
    return np.flipud(data.reshape(shape)).astype(np.float64)


def _write_pfm(arr: GrayImage, path: Path) -> None:
    height, width = arr.shape
    header = f"Pf\n{width} {height}\n-1.0\n".encode("ascii")
    body = np.flipud(arr).astype("<f4").tobytes()
    path.write_bytes(header + body)


# ========== Load / save ==========

def _pil_to_float(img: Image.Image) -> np.ndarray:
    """Pillow image to float array scaled to [0, 1] by the sample bit depth."""
    if img.mode == "P":
        img = img.convert("RGBA" if "transparency" in img.info else "RGB")
    if img.mode in ("CMYK", "YCbCr", "LAB", "HSV"):
        img = img.convert("RGB")
    if img.mode == "1":
        return np.asarray(img, dtype=np.float64)
    if img.mode.startswith("I;16") or img.mode == "I":
        return np.asarray(img, dtype=np.float64) / 65535.0
    if img.mode == "F":
        return np.asarray(img, dtype=np.float64)
    return np.asarray(img, dtype=np.float64) / 255.0


def load_raster(path: PathLike) -> np.ndarray:
    """Reads a raster as float (H, W) or (H, W, C) array, integer ranges scaled to [0, 1]."""
    path = Path(path)
    if not path.is_file():
        raise ImageReadError(f"{path}: no such file")

    if path.suffix.lower() == ".pfm":
        try:
            return _read_pfm(path)
        except OSError as e:
            raise ImageReadError(f"{path}: {e}") from e

    try:
        with Image.open(path) as img:
            img.load()
            arr = _pil_to_float(img)
    except UnidentifiedImageError as e:
        raise ImageFormatError(f"{path}: unsupported raster format") from e
    except OSError as e:
        raise ImageReadError(f"{path}: {e}") from e

    logger.debug(f"Loaded {path} shape={arr.shape}")
    return arr


def load_image(path: PathLike) -> GrayImage:
    """Loads any supported raster as a GrayImage."""
    return check_gray(to_gray(load_raster(path)))


def load_color(path: PathLike) -> np.ndarray:
    """Loads a raster as an (H, W, 3) float array in [0, 1]."""
    arr = load_raster(path)
    if arr.ndim == 2:
        return np.repeat(arr[..., None], 3, axis=2)
    if arr.shape[2] in (1, 2):
        return np.repeat(arr[..., :1], 3, axis=2)
    return arr[..., :3]


def load_mask(path: PathLike) -> GrayImage:
    """Loads a ground-truth mask: 1 = sharp (white), 0 = blurred (black)."""
    return (load_image(path) >= 0.5).astype(np.float64)


def quantize8(values: np.ndarray) -> np.ndarray:
    """value * 255 rounded half up, as uint8."""
    return np.floor(np.asarray(values, dtype=np.float64) * 255.0 + 0.5).astype(np.uint8)


def save_map(map_: GrayImage, path: PathLike, format: str = "png8") -> None:
    """Writes a map as 8-bit grayscale PNG or little-endian 32-bit PFM."""
    arr = check_gray(map_)
    path = Path(path)
    if format not in MAP_FORMATS:
        raise ImageFormatError(f"Unknown map format {format!r}, expected one of {MAP_FORMATS}")

    if format == "png8":
        lo, hi = float(arr.min()), float(arr.max())
        if lo < 0.0 or hi > 1.0:
            raise MapRangeError(f"png8 needs values in [0, 1], got [{lo}, {hi}]")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if format == "png8":
            Image.fromarray(quantize8(arr)).save(path, format="PNG")
        else:
            _write_pfm(arr, path)
    except OSError as e:
        raise ImageReadError(f"{path}: write failed: {e}") from e

    logger.debug(f"Saved {format} map to {path}")


def save_image(arr: np.ndarray, path: PathLike) -> None:
    """Writes a gray or RGB float image in [0, 1] as 8-bit PNG."""
    arr = np.clip(np.asarray(arr, dtype=np.float64), 0.0, 1.0)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(quantize8(arr)).save(path, format="PNG")
    except OSError as e:
        raise ImageReadError(f"{path}: write failed: {e}") from e


def to_display(map_: GrayImage, invert: bool = False) -> GrayImage:
    """Display polarity: higher is sharper unless inverted."""
    return 1.0 - map_ if invert else map_
