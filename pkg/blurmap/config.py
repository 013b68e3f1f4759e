"""Pipeline configuration: defaults, config file, environment, CLI overrides."""

import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from .errors import ConfigError, ContractViolation
from .services.focus import FocusParams
from .transform.hifst import EntropyParams
from .transform.postproc import SmoothParams
from .transform.preproc import GaussianParams
from .transform.sliding_dct import DEFAULT_SCALES, ScaleSet

logger = logging.getLogger(__name__)

ENV_PREFIX = "BLURMAP_"

# Execution knobs: they change how the work is scheduled, never the result.
EXECUTION_FIELDS = ("threads", "strip_rows", "log_level")


@dataclass
class PipelineConfig:
    """Every tunable of the detection pipeline and its applications."""

    scales: Tuple[int, ...] = DEFAULT_SCALES
    gaussian_sigma: float = 0.5
    gaussian_radius: int = 1
    entropy_window: int = 7
    entropy_bins: int = 256

    # Edge-preserving smoothing
    smooth_sigma_s: float = 15.0
    smooth_sigma_r: float = 0.3
    smooth_iterations: int = 3
    smooth_guide: str = "input"

    # Focus points map and blur magnification
    focus_threshold: float = 0.98
    focus_sigma: float = 5.0
    magnify_levels: int = 8

    # 1 = every pixel; larger values are a preview mode
    stride: int = 1

    threads: int = 0
    strip_rows: int = 8
    log_level: str = "INFO"

    def __post_init__(self):
        self.scales = tuple(int(s) for s in self.scales)
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        if self.threads < 0:
            raise ConfigError(f"threads must be >= 0 (0 = auto), got {self.threads}")
        if self.strip_rows < 1:
            raise ConfigError(f"strip_rows must be >= 1, got {self.strip_rows}")
        if self.magnify_levels < 2:
            raise ConfigError(f"magnify_levels must be >= 2, got {self.magnify_levels}")
        try:
            self.gaussian_params()
            self.scale_set()
            self.entropy_params()
            self.smooth_params()
            self.focus_params()
        except ContractViolation as e:
            raise ConfigError(str(e)) from e

    # ========== Component views ==========

    def gaussian_params(self) -> GaussianParams:
        return GaussianParams(sigma=self.gaussian_sigma, radius=self.gaussian_radius)

    def scale_set(self) -> ScaleSet:
        return ScaleSet(sizes=self.scales)

    def entropy_params(self) -> EntropyParams:
        return EntropyParams(window=self.entropy_window, bins=self.entropy_bins)

    def smooth_params(self) -> SmoothParams:
        return SmoothParams(
            sigma_s=self.smooth_sigma_s,
            sigma_r=self.smooth_sigma_r,
            iterations=self.smooth_iterations,
            guide=self.smooth_guide,
        )

    def focus_params(self) -> FocusParams:
        return FocusParams(threshold=self.focus_threshold, sigma=self.focus_sigma)

    def as_dict(self, pipeline_only: bool = False) -> Dict[str, Any]:
        data = asdict(self)
        data["scales"] = list(self.scales)
        if pipeline_only:
            for name in EXECUTION_FIELDS:
                data.pop(name)
        return data

    # ========== Text format ==========

    def to_text(self) -> str:
        """Flat `key = value` lines, readable back by from_text."""
        lines = ["# blurmap pipeline configuration"]
        for f in fields(self):
            lines.append(f"{f.name} = {_format_value(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, base: Optional["PipelineConfig"] = None) -> "PipelineConfig":
        values: Dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            values[key.strip().replace("-", "_")] = value.strip()
        return (base or cls()).with_overrides(values)

    @classmethod
    def from_file(cls, path, base: Optional["PipelineConfig"] = None) -> "PipelineConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        logger.info(f"Loaded configuration from {path}")
        return cls.from_text(text, base)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_env(cls, base: Optional["PipelineConfig"] = None, environ: Optional[Mapping[str, str]] = None) -> "PipelineConfig":
        """Applies BLURMAP_<FIELD> environment variables on top of `base`."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            env_value = environ.get(ENV_PREFIX + f.name.upper())
            if env_value is not None:
                values[f.name] = env_value
        if "log_level" not in values and environ.get("LOG_LEVEL"):
            values["log_level"] = environ["LOG_LEVEL"]
        return (base or cls()).with_overrides(values)

    def with_overrides(self, values: Mapping[str, Any]) -> "PipelineConfig":
        """New config with the given fields replaced; strings are parsed."""
        known = {f.name: f for f in fields(self)}
        parsed = {}
        for key, value in values.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"unknown configuration key {key!r}")
            parsed[key] = _parse_value(key, value, getattr(self, key))
        return replace(self, **parsed)


def _format_value(value: Any) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(key: str, value: Any, current: Any) -> Any:
    if not isinstance(value, str):
        return tuple(value) if isinstance(current, tuple) else value
    try:
        if isinstance(current, tuple):
            return tuple(int(v) for v in value.split(",") if v.strip())
        if isinstance(current, bool):
            return value.lower() in ("1", "true", "yes", "on")
        if isinstance(current, int):
            return int(value)
        if isinstance(current, float):
            return float(value)
    except ValueError as e:
        raise ConfigError(f"invalid value for {key}: {value!r}") from e
    return value


# Global configuration
config: Optional[PipelineConfig] = None


def get_config() -> PipelineConfig:
    """Returns the process-wide configuration (defaults + environment)."""
    global config
    if config is None:
        config = PipelineConfig.from_env()
    return config


def set_config(new_config: PipelineConfig) -> PipelineConfig:
    global config
    config = new_config
    return config
