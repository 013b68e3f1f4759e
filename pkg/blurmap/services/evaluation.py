"""Evaluation harness: precision-recall by threshold sweep, noise and scale experiments."""

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from ..config import PipelineConfig, get_config
from ..errors import BlurmapError, ContractViolation
from ..imageio import RASTER_SUFFIXES, GrayImage, PathLike, check_gray, check_same_shape, load_image, load_mask, quantize8
from ..transform.postproc import BlurMap
from ..transform.sliding_dct import ScaleSet
from .detection import detect
from .focus import dof_estimate

logger = logging.getLogger(__name__)

THRESHOLDS = np.arange(256)
MASK_SUFFIXES = (".png", ".pgm", ".bmp")
CSV_HEADER = ("threshold", "precision", "recall", "f_measure")
AVERAGING = ("micro", "macro")
# out_dir/<stem>.csv per image; this stem holds the dataset curve
AGGREGATE_STEM = "aggregate"


# ========== Curves ==========

@dataclass(frozen=True)
class ConfusionCounts:
    """TP / FP / FN per threshold 0..255; positive class = sharp."""

    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(tp=self.tp + other.tp, fp=self.fp + other.fp, fn=self.fn + other.fn)


@dataclass(frozen=True)
class PrCurve:
    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    @classmethod
    def from_counts(cls, counts: ConfusionCounts) -> "PrCurve":
        predicted = counts.tp + counts.fp
        actual = counts.tp + counts.fn
        # 0/0 is defined as 1 for both ratios
        precision = np.divide(counts.tp, predicted, out=np.ones(len(THRESHOLDS)), where=predicted > 0)
        recall = np.divide(counts.tp, actual, out=np.ones(len(THRESHOLDS)), where=actual > 0)
        return cls(thresholds=THRESHOLDS.copy(), precision=precision, recall=recall)

    def f_measure(self, beta2: float = 1.0) -> np.ndarray:
        return np.array([f_measure(p, r, beta2) for p, r in zip(self.precision, self.recall)])

    def max_f_measure(self, beta2: float = 1.0) -> float:
        return float(self.f_measure(beta2).max())

    def best_threshold(self, beta2: float = 1.0) -> int:
        return int(self.thresholds[int(np.argmax(self.f_measure(beta2)))])

    def entries(self) -> List[Tuple[int, float, float]]:
        return [(int(t), float(p), float(r)) for t, p, r in zip(self.thresholds, self.precision, self.recall)]


def f_measure(p: float, r: float, beta2: float = 1.0) -> float:
    """(1 + b2) p r / (b2 p + r); 0 when the denominator vanishes."""
    denominator = beta2 * p + r
    if denominator == 0:
        return 0.0
    return (1.0 + beta2) * p * r / denominator


def _map_values(map_) -> GrayImage:
    return map_.map if isinstance(map_, BlurMap) else check_gray(map_)


def confusion_counts(map_, gt: GrayImage) -> ConfusionCounts:
    """Counts for prediction = (round(map * 255) >= threshold) at every threshold."""
    values = _map_values(map_)
    gt = check_gray(gt)
    check_same_shape(values, gt, "map and ground truth")

    q = quantize8(np.clip(values, 0.0, 1.0))
    sharp = gt >= 0.5
    hist_sharp = np.bincount(q[sharp], minlength=256)
    hist_blurred = np.bincount(q[~sharp], minlength=256)

    # pixels at or above each threshold
    tp = np.cumsum(hist_sharp[::-1])[::-1]
    fp = np.cumsum(hist_blurred[::-1])[::-1]
    fn = int(sharp.sum()) - tp
    return ConfusionCounts(tp=tp, fp=fp, fn=fn)


def pr_curve(map_, gt: GrayImage) -> PrCurve:
    return PrCurve.from_counts(confusion_counts(map_, gt))


def macro_average(curves: Sequence[PrCurve]) -> PrCurve:
    return PrCurve(
        thresholds=THRESHOLDS.copy(),
        precision=np.mean([c.precision for c in curves], axis=0),
        recall=np.mean([c.recall for c in curves], axis=0),
    )


def region_means(map_, gt: GrayImage, margin: int = 8) -> Tuple[float, float]:
    """Mean map value over interior sharp and interior blurred pixels.

    Regions are eroded by `margin` pixels; an empty region yields NaN.
    """
    values = _map_values(map_)
    gt = check_gray(gt)
    check_same_shape(values, gt, "map and ground truth")
    sharp = gt >= 0.5
    if margin > 0:
        sharp_inner = ndimage.binary_erosion(sharp, iterations=margin)
        blurred_inner = ndimage.binary_erosion(~sharp, iterations=margin)
    else:
        sharp_inner, blurred_inner = sharp, ~sharp
    sharp_mean = float(values[sharp_inner].mean()) if sharp_inner.any() else float("nan")
    blurred_mean = float(values[blurred_inner].mean()) if blurred_inner.any() else float("nan")
    return sharp_mean, blurred_mean


def write_curve_csv(curve: PrCurve, path: PathLike, beta2: float = 1.0) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    f_values = curve.f_measure(beta2)
    with path.open("w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for (t, p, r), f in zip(curve.entries(), f_values):
            writer.writerow((t, f"{p:.6f}", f"{r:.6f}", f"{f:.6f}"))


# ========== Datasets ==========

@dataclass
class ImageResult:
    name: str
    curve: PrCurve
    counts: ConfusionCounts
    sharp_mean: float
    blurred_mean: float
    dof: float

    @property
    def max_f(self) -> float:
        return self.curve.max_f_measure()

    @property
    def discriminates(self) -> bool:
        return bool(self.sharp_mean > self.blurred_mean)


@dataclass
class DatasetReport:
    averaging: str = "micro"
    aggregate: Optional[PrCurve] = None
    images: List[ImageResult] = field(default_factory=list)
    errors: List[Dict[str, str]] = field(default_factory=list)

    @property
    def warnings(self) -> int:
        return len(self.errors)

    @property
    def max_f(self) -> Optional[float]:
        return self.aggregate.max_f_measure() if self.aggregate else None

    @property
    def discriminating(self) -> int:
        return sum(1 for r in self.images if r.discriminates)


def find_mask(image_path: Path, masks_dir: Path) -> Optional[Path]:
    for suffix in MASK_SUFFIXES:
        candidate = masks_dir / (image_path.stem + suffix)
        if candidate.is_file():
            return candidate
    return None


def pair_dataset(images_dir: PathLike, masks_dir: PathLike) -> Tuple[List[Tuple[Path, Path]], List[Dict[str, str]]]:
    """Image/mask pairs by identical stem, in sorted filename order."""
    images_dir, masks_dir = Path(images_dir), Path(masks_dir)
    pairs, errors = [], []
    for image_path in sorted(p for p in images_dir.iterdir() if p.suffix.lower() in RASTER_SUFFIXES):
        if image_path.stem == AGGREGATE_STEM:
            logger.error(f"Skipping {image_path.name}: {AGGREGATE_STEM}.csv holds the dataset curve")
            errors.append({"image": image_path.name, "error": f"reserved name {AGGREGATE_STEM!r}"})
            continue
        mask_path = find_mask(image_path, masks_dir)
        if mask_path is None:
            logger.error(f"No mask for {image_path.name} in {masks_dir}")
            errors.append({"image": image_path.name, "error": "missing mask"})
            continue
        pairs.append((image_path, mask_path))
    return pairs, errors


def load_pairs(pairs: Sequence[Tuple[Path, Path]], errors: List[Dict[str, str]]) -> List[Tuple[str, GrayImage, GrayImage]]:
    loaded = []
    for image_path, mask_path in pairs:
        try:
            image = load_image(image_path)
            gt = load_mask(mask_path)
            check_same_shape(image, gt, f"{image_path.name} and its mask")
        except (BlurmapError, OSError) as e:
            logger.error(f"Skipping {image_path.name}: {e}")
            errors.append({"image": image_path.name, "error": str(e)})
            continue
        loaded.append((image_path.stem, image, gt))
    return loaded


def _aggregate(results: Sequence[ImageResult], averaging: str) -> Optional[PrCurve]:
    if not results:
        return None
    if averaging == "macro":
        return macro_average([r.curve for r in results])
    total = results[0].counts
    for r in results[1:]:
        total = total + r.counts
    return PrCurve.from_counts(total)


def evaluate_loaded(
    loaded: Sequence[Tuple[str, GrayImage, GrayImage]],
    config: PipelineConfig,
    averaging: str = "micro",
    perturb: Optional[Callable[[int, GrayImage], GrayImage]] = None,
    margin: int = 8,
) -> DatasetReport:
    """Runs detection on every (name, image, gt) and aggregates the curves."""
    if averaging not in AVERAGING:
        raise ContractViolation(f"averaging must be one of {AVERAGING}, got {averaging!r}")
    report = DatasetReport(averaging=averaging)
    for index, (name, image, gt) in enumerate(loaded):
        if perturb is not None:
            image = perturb(index, image)
        try:
            blur_map = detect(image, config)
        except BlurmapError as e:
            logger.error(f"Detection failed for {name}: {e}")
            report.errors.append({"image": name, "error": str(e)})
            continue
        counts = confusion_counts(blur_map, gt)
        sharp_mean, blurred_mean = region_means(blur_map, gt, margin)
        report.images.append(ImageResult(
            name=name,
            curve=PrCurve.from_counts(counts),
            counts=counts,
            sharp_mean=sharp_mean,
            blurred_mean=blurred_mean,
            dof=dof_estimate(blur_map),
        ))
        logger.info(f"Evaluated {name}: max F={report.images[-1].max_f:.3f}")
    report.aggregate = _aggregate(report.images, averaging)
    return report


def run_dataset(
    images_dir: PathLike,
    masks_dir: PathLike,
    config: Optional[PipelineConfig] = None,
    out_dir: Optional[PathLike] = None,
    averaging: str = "micro",
) -> DatasetReport:
    """Evaluates every image against its same-stem mask; writes per-image and aggregate CSVs."""
    config = config or get_config()
    pairs, errors = pair_dataset(images_dir, masks_dir)
    loaded = load_pairs(pairs, errors)
    report = evaluate_loaded(loaded, config, averaging)
    report.errors[:0] = errors

    if out_dir is not None:
        out_dir = Path(out_dir)
        for result in report.images:
            write_curve_csv(result.curve, out_dir / f"{result.name}.csv")
        if report.aggregate is not None:
            write_curve_csv(report.aggregate, out_dir / f"{AGGREGATE_STEM}.csv")

    if report.warnings:
        logger.warning(f"Dataset evaluation finished with {report.warnings} warnings")
    logger.info(
        f"Evaluated {len(report.images)} images, aggregate max F="
        f"{report.max_f if report.max_f is not None else float('nan'):.4f}"
    )
    return report


# ========== Experiments ==========

def add_noise(image: GrayImage, variance: float, rng: np.random.Generator) -> GrayImage:
    """Zero-mean Gaussian noise of the given variance, clamped to [0, 1]."""
    if variance < 0:
        raise ContractViolation(f"noise variance must be >= 0, got {variance}")
    if variance == 0:
        return image
    noisy = image + rng.normal(0.0, np.sqrt(variance), size=image.shape)
    return np.clip(noisy, 0.0, 1.0)


def noise_sweep(
    image: GrayImage,
    gt: GrayImage,
    variances: Sequence[float],
    seed: int,
    config: Optional[PipelineConfig] = None,
) -> List[Tuple[float, PrCurve]]:
    """PR curve of the full pipeline on seeded noisy copies of one image."""
    config = config or get_config()
    image = check_gray(image)
    curves = []
    for variance in variances:
        noisy = add_noise(image, variance, np.random.default_rng(seed))
        curves.append((variance, pr_curve(detect(noisy, config), gt)))
        logger.info(f"Noise variance {variance}: max F={curves[-1][1].max_f_measure():.4f}")
    return curves


def ablation_configs(scales: ScaleSet, config: PipelineConfig) -> Dict[str, PipelineConfig]:
    """One configuration per single scale, plus the multiscale one."""
    configs = {f"M={m}": replace(config, scales=(m,)) for m in scales.sizes}
    configs["multiscale"] = replace(config, scales=scales.sizes)
    return configs


def scale_ablation(
    image: GrayImage,
    gt: GrayImage,
    scales: Optional[ScaleSet] = None,
    config: Optional[PipelineConfig] = None,
) -> Dict[str, PrCurve]:
    config = config or get_config()
    scales = scales or config.scale_set()
    return {
        label: pr_curve(detect(image, cfg), gt)
        for label, cfg in ablation_configs(scales, config).items()
    }


def dataset_noise_sweep(
    images_dir: PathLike,
    masks_dir: PathLike,
    variances: Sequence[float],
    seed: int,
    config: Optional[PipelineConfig] = None,
    averaging: str = "micro",
) -> List[Tuple[float, DatasetReport]]:
    """Suite-level noise experiment; image k gets generator seed (seed, k)."""
    config = config or get_config()
    pairs, errors = pair_dataset(images_dir, masks_dir)
    loaded = load_pairs(pairs, errors)
    results = []
    for variance in variances:
        def perturb(index, image, variance=variance):
            return add_noise(image, variance, np.random.default_rng([seed, index]))

        report = evaluate_loaded(loaded, config, averaging, perturb=perturb)
        report.errors[:0] = errors
        results.append((variance, report))
        logger.info(f"Suite noise variance {variance}: max F={report.max_f}")
    return results


def dataset_scale_ablation(
    images_dir: PathLike,
    masks_dir: PathLike,
    config: Optional[PipelineConfig] = None,
    averaging: str = "micro",
) -> Dict[str, DatasetReport]:
    config = config or get_config()
    pairs, errors = pair_dataset(images_dir, masks_dir)
    loaded = load_pairs(pairs, errors)
    reports = {}
    for label, cfg in ablation_configs(config.scale_set(), config).items():
        reports[label] = evaluate_loaded(loaded, cfg, averaging)
        reports[label].errors[:0] = errors
        logger.info(f"Suite ablation {label}: max F={reports[label].max_f}")
    return reports
