"""High-frequency DCT magnitudes of the patch centred on every pixel.

Two paths compute the same numbers:

* the naive path (`hf_magnitudes_at`) extracts the replicate-padded M x M
  patch and runs a full 2-D DCT-II; it is the reference;
* the separable path (`hf_strip`, `hf_magnitudes_plane`) correlates rows
  with every basis vector once, then correlates the columns of those
  intermediates, which is O(M) work per coefficient and pixel.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import fft

from ..errors import ContractViolation
from ..imageio import GrayImage, check_gray

logger = logging.getLogger(__name__)

DEFAULT_SCALES = (7, 15, 31, 63)


@dataclass(frozen=True)
class ScaleSet:
    """Patch sizes M_r fused by the transform."""

    sizes: Tuple[int, ...] = DEFAULT_SCALES

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes:
            raise ContractViolation("ScaleSet needs at least one patch size")
        for m in sizes:
            if m < 3 or m % 2 == 0:
                raise ContractViolation(f"patch sizes must be odd and >= 3, got {m}")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ContractViolation(f"patch sizes must be strictly increasing, got {sizes}")

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def retained(self) -> int:
        """S = sum of M_r, the number of layers kept after sorting."""
        return sum(self.sizes)

    @property
    def fused_length(self) -> int:
        """Length of the per-pixel fused vector before truncation."""
        return sum(hf_count(m) for m in self.sizes)

    @property
    def max_half(self) -> int:
        return self.sizes[-1] // 2

    @classmethod
    def single(cls, size: int) -> "ScaleSet":
        return cls(sizes=(size,))


@dataclass(frozen=True)
class HfPatchVector:
    """Unsorted high-frequency coefficient magnitudes of one M x M patch."""

    scale: int
    values: np.ndarray


def hf_count(M: int) -> int:
    return (M * M + M) // 2


def dct2(patch: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II."""
    return fft.dctn(np.asarray(patch, dtype=np.float64), type=2, norm="ortho")


def idct2(coeffs: np.ndarray) -> np.ndarray:
    return fft.idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")


def high_freq_indices(M: int) -> List[Tuple[int, int]]:
    """Index pairs (u, v) with u + v >= M - 1, row-major by u then v."""
    if M < 1:
        raise ContractViolation(f"patch size must be >= 1, got {M}")
    return [(u, v) for u in range(M) for v in range(M) if u + v >= M - 1]


@lru_cache(maxsize=None)
def high_freq_mask(M: int) -> np.ndarray:
    u, v = np.indices((M, M))
    mask = (u + v) >= M - 1
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=None)
def high_freq_positions(M: int) -> Tuple[np.ndarray, ...]:
    """For each v, where (u, v) for u = M - 1 - v ... M - 1 sits in high_freq_indices(M)."""
    order = np.full((M, M), -1, dtype=np.intp)
    order[high_freq_mask(M)] = np.arange(hf_count(M))
    positions = tuple(order[M - 1 - v:, v].copy() for v in range(M))
    for p in positions:
        p.setflags(write=False)
    return positions


@lru_cache(maxsize=None)
def dct_basis(M: int) -> np.ndarray:
    """Orthonormal DCT-II matrix C with C[k, x] = a_k cos(pi (2x + 1) k / 2M)."""
    k = np.arange(M)[:, None]
    x = np.arange(M)[None, :]
    basis = np.cos(np.pi * (2 * x + 1) * k / (2 * M)) * np.sqrt(2.0 / M)
    basis[0, :] = np.sqrt(1.0 / M)
    basis.setflags(write=False)
    return basis


def _check_scale(M: int) -> None:
    if M < 1 or M % 2 == 0:
        raise ContractViolation(f"patch size must be odd, got {M}")


def extract_patch(G: GrayImage, i: int, j: int, M: int) -> np.ndarray:
    """M x M patch centred on (i, j); indices outside the image are clamped."""
    h = M // 2
    rows = np.clip(np.arange(i - h, i + h + 1), 0, G.shape[0] - 1)
    cols = np.clip(np.arange(j - h, j + h + 1), 0, G.shape[1] - 1)
    return G[np.ix_(rows, cols)]


def hf_magnitudes_at(G: GrayImage, i: int, j: int, M: int) -> HfPatchVector:
    """Naive path: |dct2(patch)| at high_freq_indices(M), in that order."""
    G = check_gray(G)
    _check_scale(M)
    if not (0 <= i < G.shape[0] and 0 <= j < G.shape[1]):
        raise ContractViolation(f"pixel ({i}, {j}) outside image of shape {G.shape}")
    coeffs = dct2(extract_patch(G, i, j, M))
    return HfPatchVector(scale=M, values=np.abs(coeffs[high_freq_mask(M)]))


def hf_magnitudes_naive(G: GrayImage, M: int) -> np.ndarray:
    """Reference planes, shape (K, N1, N2), built pixel by pixel."""
    G = check_gray(G)
    out = np.empty((hf_count(M),) + G.shape)
    for i in range(G.shape[0]):
        for j in range(G.shape[1]):
            out[:, i, j] = hf_magnitudes_at(G, i, j, M).values
    return out


def pad_for(G: GrayImage, half: int) -> np.ndarray:
    """Replicate-pads G by `half` pixels on every side."""
    return np.pad(G, half, mode="edge")


def hf_strip(
    padded: np.ndarray,
    pad: int,
    M: int,
    rows: range,
    cols: range,
) -> np.ndarray:
    """Separable sliding DCT for a block of output pixels.

    `padded` is the image replicate-padded by `pad` >= M // 2. Output pixel
    (r, c) of the original image sits at padded[r + pad, c + pad]. `rows`
    and `cols` are ranges of output coordinates (a step > 1 subsamples).

    Returns an array of shape (len(rows), len(cols), K) holding
    |coefficient| at high_freq_indices(M) order for every requested pixel.
    """
    h = M // 2
    C = dct_basis(M)

    # Row pass: correlate each needed row with every basis vector b_v.
    # Patch rows for output row r span padded rows r + pad - h ... r + pad + h.
    row_lo = rows.start + pad - h
    row_hi = rows[-1] + pad + h + 1
    col_windows = sliding_window_view(padded[row_lo:row_hi], M, axis=1)
    col_windows = col_windows[:, [c + pad - h for c in cols], :]
    n_rows, n_cols = col_windows.shape[:2]
    row_pass = (np.ascontiguousarray(col_windows).reshape(-1, M) @ C.T).reshape(n_rows, n_cols, M)

    # Column pass: correlate the row-pass intermediates along rows with b_u,
    # only for the u >= M - 1 - v each v contributes to the high band.
    row_windows = sliding_window_view(row_pass, M, axis=0)
    row_windows = row_windows[: (len(rows) - 1) * rows.step + 1 : rows.step]
    n_out = row_windows.shape[0]
    out = np.empty((n_out, n_cols, hf_count(M)))
    positions = high_freq_positions(M)
    for v in range(M):
        band = row_windows[:, :, v, :] @ C[M - 1 - v:].T
        out[..., positions[v]] = np.abs(band)
    return out


def hf_magnitudes_plane(G: GrayImage, M: int, strip_rows: int = 8) -> np.ndarray:
    """Separable path over the whole image, shape (K, N1, N2)."""
    G = check_gray(G)
    _check_scale(M)
    h = M // 2
    padded = pad_for(G, h)
    n1, n2 = G.shape
    out = np.empty((hf_count(M), n1, n2))
    for r0 in range(0, n1, strip_rows):
        rows = range(r0, min(r0 + strip_rows, n1))
        block = hf_strip(padded, h, M, rows, range(n2))
        out[:, rows.start:rows.stop, :] = np.moveaxis(block, -1, 0)
    return out
