"""Jinja2 rendering of dataset evaluation reports."""

import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import jinja2

from .. import __version__
from ..imageio import PathLike
from ..services.evaluation import DatasetReport, PrCurve

logger = logging.getLogger(__name__)

TEMPLATES_DIR = Path(__file__).parent / "templates"

_env = jinja2.Environment(
    loader=jinja2.FileSystemLoader(TEMPLATES_DIR),
    autoescape=jinja2.select_autoescape(["html"]),
    trim_blocks=True,
    lstrip_blocks=True,
)


def curve_points(curve: PrCurve, width: int = 320, height: int = 320) -> str:
    """SVG polyline points, recall on x and precision on y."""
    return " ".join(
        f"{r * width:.1f},{(1.0 - p) * height:.1f}"
        for _, p, r in curve.entries()
    )


def _curve_summary(label: str, curve: PrCurve) -> Dict[str, Any]:
    return {
        "label": label,
        "max_f": curve.max_f_measure(),
        "best_threshold": curve.best_threshold(),
        "points": curve_points(curve),
    }


def render_report(
    report: DatasetReport,
    config: Dict[str, Any],
    extra_curves: Optional[List[Tuple[str, PrCurve]]] = None,
) -> str:
    template = _env.get_template("report.html")
    curves = []
    if report.aggregate is not None:
        curves.append(_curve_summary(f"aggregate ({report.averaging})", report.aggregate))
    for label, curve in extra_curves or []:
        curves.append(_curve_summary(label, curve))

    return template.render(
        version=__version__,
        generated_at=datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M UTC"),
        report=report,
        curves=curves,
        config=config,
    )


def write_report(report: DatasetReport, path: PathLike, config: Dict[str, Any], extra_curves=None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_report(report, config, extra_curves), encoding="utf-8")
    logger.info(f"Report written to {path}")
