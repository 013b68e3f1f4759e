"""Subcommand handlers and the command-line entry point."""

import json
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..config import PipelineConfig, set_config
from ..errors import ConfigError, ContractViolation, ImageFormatError, ImageReadError, MapRangeError
from ..imageio import load_color, load_image, save_image, save_map, to_display, to_gray
from ..logs import setup_logging
from ..report import write_report
from ..services.detection import detect
from ..services.evaluation import dataset_noise_sweep, dataset_scale_ablation, run_dataset, write_curve_csv
from ..services.focus import dof_estimate, focus_overlay, focus_points, magnify_blur
from ..services.synthetic import generate_suite
from ..transform.postproc import BlurMap
from ..workers import worker_pool
from .parser import EXIT_INVARIANT, EXIT_IO, EXIT_OK, EXIT_USAGE, build_parser

logger = logging.getLogger(__name__)


def resolve_config(args) -> PipelineConfig:
    """Defaults < config file < environment < flags."""
    config = PipelineConfig()
    if args.config:
        config = PipelineConfig.from_file(args.config, config)
    config = PipelineConfig.from_env(config)
    overrides = {f.name: getattr(args, f.name, None) for f in fields(PipelineConfig)}
    return config.with_overrides(overrides)


def _blur_map_for(args, config: PipelineConfig) -> BlurMap:
    if getattr(args, "input_map", None):
        stored = load_image(args.input_map)
        return BlurMap(map=np.clip(stored, 0.0, 1.0), params={"source": str(args.input_map)})
    return detect(load_image(args.input), config)


# ========== Handlers ==========

def cmd_detect(args, config: PipelineConfig) -> int:
    blur_map = detect(load_image(args.input), config)
    output = Path(args.output)

    if args.format in ("png8", "both"):
        png_path = output if args.format == "png8" else output.with_suffix(".png")
        save_map(to_display(blur_map.map, args.invert), png_path, "png8")
    if args.format in ("pfm32", "both"):
        pfm_path = output if args.format == "pfm32" else output.with_suffix(".pfm")
        save_map(blur_map.map, pfm_path, "pfm32")

    params = {k: v for k, v in blur_map.params.items() if k != "timings"}
    output.with_suffix(".json").write_text(json.dumps(params, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    print(f"dof={dof_estimate(blur_map):.6f}")
    return EXIT_OK


def cmd_focus(args, config: PipelineConfig) -> int:
    blur_map = _blur_map_for(args, config)
    focus = focus_points(blur_map, config.focus_params())
    save_map(focus, args.output, "png8")
    if args.overlay:
        save_image(focus_overlay(load_color(args.input), focus), args.overlay)
    print(f"focus_pixels={int(focus.sum())}")
    return EXIT_OK


def cmd_magnify(args, config: PipelineConfig) -> int:
    original = load_color(args.input)
    if getattr(args, "input_map", None):
        blur_map = _blur_map_for(args, config)
    else:
        blur_map = detect(to_gray(original), config)
    save_image(magnify_blur(original, blur_map, args.strength, config.magnify_levels), args.output)
    return EXIT_OK


def cmd_eval(args, config: PipelineConfig) -> int:
    out_dir = Path(args.out)
    report = run_dataset(args.images, args.masks, config, out_dir, averaging=args.averaging)
    if report.aggregate is None:
        print("error: no image/mask pairs could be evaluated", file=sys.stderr)
        return EXIT_IO

    extra = []
    if args.noise_variances:
        for variance, noisy in dataset_noise_sweep(
            args.images, args.masks, args.noise_variances, args.noise_seed, config, args.averaging
        ):
            write_curve_csv(noisy.aggregate, out_dir / "noise" / f"variance_{variance:g}.csv")
            extra.append((f"noise variance {variance:g}", noisy.aggregate))
            print(f"noise_variance={variance:g} max_f={noisy.max_f:.4f}")
    if args.ablation:
        for label, ablated in dataset_scale_ablation(args.images, args.masks, config, args.averaging).items():
            write_curve_csv(ablated.aggregate, out_dir / "ablation" / f"{label.replace('=', '')}.csv")
            extra.append((label, ablated.aggregate))
            print(f"ablation={label} max_f={ablated.max_f:.4f}")

    if args.report:
        write_report(report, args.report, config.as_dict(pipeline_only=True), extra)

    print(f"images={len(report.images)} warnings={report.warnings} max_f={report.max_f:.4f}")
    print(f"sharp_above_blurred={report.discriminating}/{len(report.images)}")
    return EXIT_OK


def cmd_gen_synthetic(args, config: PipelineConfig) -> int:
    written = generate_suite(
        args.out,
        count=args.count,
        seed=args.seed,
        sigmas=args.sigmas,
        shapes=args.shapes,
        kinds=args.kinds,
        size=args.size,
    )
    print(f"pairs={len(written)}")
    return EXIT_OK


HANDLERS = {
    "detect": cmd_detect,
    "focus": cmd_focus,
    "magnify": cmd_magnify,
    "eval": cmd_eval,
    "gen-synthetic": cmd_gen_synthetic,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parses arguments, runs one subcommand, maps errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = resolve_config(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(config.log_level)
    set_config(config)

    try:
        if args.save_config:
            config.save(args.save_config)
            logger.info(f"Configuration saved to {args.save_config}")
        with worker_pool(config.threads):
            return HANDLERS[args.command](args, config)
    except ConfigError as e:
        message, code = str(e), EXIT_USAGE
    except (ContractViolation, MapRangeError, AssertionError) as e:
        message, code = str(e), EXIT_INVARIANT
    except (ImageReadError, ImageFormatError, OSError) as e:
        message, code = str(e), EXIT_IO

    logger.error(f"{args.command} failed: {message}")
    print(f"error: {message}", file=sys.stderr)
    return code
