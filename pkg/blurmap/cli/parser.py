"""Argument parser for the blurmap command line."""

import argparse
import math
from dataclasses import fields
from typing import Callable, List, Sequence

from ..config import ENV_PREFIX, PipelineConfig
from ..services.evaluation import AVERAGING
from ..services.synthetic import BLUR_KINDS, SHAPES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INVARIANT = 3

FIELD_HELP = {
    "scales": "comma-separated odd patch sizes M_r fused by the transform",
    "gaussian_sigma": "sigma of the Gaussian pre-filter (pixels)",
    "gaussian_radius": "radius of the Gaussian pre-filter kernel (pixels)",
    "entropy_window": "odd side k of the local entropy window",
    "entropy_bins": "histogram bins over [0, 1] for the local entropy",
    "smooth_sigma_s": "spatial sigma of the edge-preserving smoothing",
    "smooth_sigma_r": "range sigma of the edge-preserving smoothing",
    "smooth_iterations": "iterations of the recursive domain-transform filter",
    "smooth_guide": "edge guide for smoothing: 'input' (the image) or 'map'",
    "focus_threshold": "threshold Th on the smoothed map for focus points",
    "focus_sigma": "Gaussian sigma applied to the map before thresholding",
    "magnify_levels": "number of blur levels blended by blur magnification",
    "stride": "evaluate every n-th pixel and upsample (1 = every pixel)",
    "threads": "worker threads (0 = one per CPU); never changes results",
    "strip_rows": "image rows per work item; never changes results",
    "log_level": "log level (DEBUG, INFO, WARNING, ERROR)",
}


def number_list(strictly_positive: bool = False) -> Callable[[str], List[float]]:
    """Comma-separated non-negative floats; at least one."""

    def parse(value: str) -> List[float]:
        items = [v.strip() for v in value.split(",") if v.strip()]
        if not items:
            raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")
        try:
            numbers = [float(v) for v in items]
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {value!r}")
        for number in numbers:
            if not math.isfinite(number) or number < 0 or (strictly_positive and number == 0):
                bound = "> 0" if strictly_positive else ">= 0"
                raise argparse.ArgumentTypeError(f"values must be {bound}, got {number:g}")
        return numbers

    return parse


def name_list(allowed: Sequence[str]) -> Callable[[str], List[str]]:
    """Comma-separated names, each one of `allowed`."""

    def parse(value: str) -> List[str]:
        items = [v.strip() for v in value.split(",") if v.strip()]
        if not items:
            raise argparse.ArgumentTypeError(f"expected one or more of {','.join(allowed)}")
        unknown = [v for v in items if v not in allowed]
        if unknown:
            raise argparse.ArgumentTypeError(f"unknown {unknown[0]!r}, expected one of {','.join(allowed)}")
        return items

    return parse


class BlurmapArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message):
        self.print_usage()
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def config_arguments() -> argparse.ArgumentParser:
    """Parent parser: one flag per PipelineConfig field plus config file options."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group(
        "pipeline configuration",
        f"precedence: flags > {ENV_PREFIX}<FIELD> environment > --config file > defaults",
    )
    group.add_argument("--config", metavar="PATH", help="flat 'key = value' configuration file")
    group.add_argument("--save-config", metavar="PATH", help="write the effective configuration to PATH")

    defaults = PipelineConfig()
    for f in fields(PipelineConfig):
        flag = "--" + f.name.replace("_", "-")
        default = getattr(defaults, f.name)
        if isinstance(default, tuple):
            default = ",".join(str(v) for v in default)
        group.add_argument(
            flag,
            dest=f.name,
            metavar=f.name.split("_")[-1].upper(),
            default=None,
            help=f"{FIELD_HELP[f.name]} (default: {default})",
        )
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = config_arguments()
    parser = BlurmapArgumentParser(
        prog="blurmap",
        description="Spatially-varying blur detection maps from a single image.",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=BlurmapArgumentParser)
    subparsers.required = True

    detect = subparsers.add_parser("detect", parents=[parent], help="compute the blur map of an image")
    detect.add_argument("input", help="input image (PNG, JPEG, PGM, PFM)")
    detect.add_argument("output", help="output map path")
    detect.add_argument("--format", choices=("png8", "pfm32", "both"), default="png8", help="map file format")
    detect.add_argument("--invert", action="store_true", help="write png8 with higher = blurrier (PFM unchanged)")

    focus = subparsers.add_parser("focus", parents=[parent], help="camera focus points map")
    focus.add_argument("input", help="input image")
    focus.add_argument("output", help="binary focus map (PNG)")
    focus.add_argument("--input-map", metavar="PFM", help="reuse a stored blur map instead of detecting")
    focus.add_argument("--overlay", metavar="PATH", help="also write the image with focus points in red")

    magnify = subparsers.add_parser("magnify", parents=[parent], help="blur magnification")
    magnify.add_argument("input", help="input image (color is kept)")
    magnify.add_argument("output", help="output image (PNG)")
    magnify.add_argument("--strength", type=float, default=4.0, help="sigma applied where the map is 0 (default: 4.0)")
    magnify.add_argument("--input-map", metavar="PFM", help="reuse a stored blur map instead of detecting")

    evaluate = subparsers.add_parser("eval", parents=[parent], help="precision-recall evaluation on a dataset")
    evaluate.add_argument("images", help="directory of images")
    evaluate.add_argument("masks", help="directory of same-stem masks (white = sharp)")
    evaluate.add_argument("out", help="directory for per-image and aggregate CSV files")
    evaluate.add_argument("--averaging", choices=AVERAGING, default="micro", help="dataset aggregation (default: micro)")
    evaluate.add_argument("--report", metavar="PATH", help="write an HTML report")
    evaluate.add_argument("--noise-variances", metavar="LIST", type=number_list(), help="comma-separated noise variances to sweep, e.g. 0,1e-4,1e-2")
    evaluate.add_argument("--noise-seed", type=int, default=7, help="seed of the noise sweep (default: 7)")
    evaluate.add_argument("--ablation", action="store_true", help="also evaluate each scale on its own")

    synth = subparsers.add_parser("gen-synthetic", parents=[parent], help="write a seeded synthetic dataset")
    synth.add_argument("out", help="output directory (images/, masks/, manifest.csv)")
    synth.add_argument("--count", type=int, default=20, help="number of pairs (default: 20)")
    synth.add_argument("--seed", type=int, default=7, help="random seed (default: 7)")
    synth.add_argument("--size", type=int, default=256, help="image side in pixels (default: 256)")
    synth.add_argument("--sigmas", type=number_list(strictly_positive=True), default="2,4,8", help="background blur sigmas (default: 2,4,8)")
    synth.add_argument("--shapes", type=name_list(SHAPES), default=",".join(SHAPES), help=f"sharp region shapes from {SHAPES}")
    synth.add_argument("--kinds", type=name_list(BLUR_KINDS), default="gaussian", help=f"background blur kinds from {BLUR_KINDS}")

    return parser
