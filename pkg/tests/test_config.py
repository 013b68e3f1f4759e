import pytest

from blurmap.config import PipelineConfig, get_config, set_config
from blurmap.errors import ConfigError


def test_defaults():
    config = PipelineConfig()
    assert config.scales == (7, 15, 31, 63)
    assert config.gaussian_sigma == 0.5 and config.gaussian_radius == 1
    assert config.entropy_window == 7 and config.entropy_bins == 256
    assert config.smooth_sigma_s == 15.0 and config.smooth_sigma_r == 0.3
    assert config.focus_threshold == 0.98 and config.focus_sigma == 5.0
    assert config.stride == 1


def test_text_round_trip():
    config = PipelineConfig(scales=(3, 7, 15), smooth_sigma_r=0.125, smooth_guide="map", threads=3)
    assert PipelineConfig.from_text(config.to_text()) == config


def test_text_comments_and_dashes():
    text = "# preview run\nstride = 2  # every other pixel\nfocus-threshold = 0.9\n\n"
    config = PipelineConfig.from_text(text)
    assert config.stride == 2
    assert config.focus_threshold == 0.9


def test_from_file(tmp_path):
    path = tmp_path / "blurmap.conf"
    PipelineConfig(entropy_bins=64).save(path)
    assert PipelineConfig.from_file(path).entropy_bins == 64
    with pytest.raises(ConfigError):
        PipelineConfig.from_file(tmp_path / "missing.conf")


def test_env_overrides_file():
    base = PipelineConfig.from_text("stride = 2\nentropy_window = 9\n")
    config = PipelineConfig.from_env(base, {"BLURMAP_STRIDE": "4", "BLURMAP_SCALES": "7,15"})
    assert config.stride == 4
    assert config.entropy_window == 9
    assert config.scales == (7, 15)


def test_flags_override_env():
    config = PipelineConfig.from_env(None, {"BLURMAP_STRIDE": "4"})
    config = config.with_overrides({"stride": 3, "threads": None})
    assert config.stride == 3
    assert config.threads == 0


def test_pipeline_dict_leaves_out_execution_fields():
    data = PipelineConfig(threads=6).as_dict(pipeline_only=True)
    assert "threads" not in data and "strip_rows" not in data and "log_level" not in data
    assert data["scales"] == [7, 15, 31, 63]


@pytest.mark.parametrize("text", [
    "scales = 8",
    "scales = 15,7",
    "entropy_window = 4",
    "smooth_sigma_s = -1",
    "smooth_guide = mask",
    "focus_threshold = 1.5",
    "stride = 0",
    "threads = many",
    "colour = blue",
    "no equals sign here",
])
def test_invalid_values_are_config_errors(text):
    with pytest.raises(ConfigError):
        PipelineConfig.from_text(text)


def test_global_config(monkeypatch):
    previous = set_config(PipelineConfig(stride=2))
    assert get_config() is previous
    set_config(None)
    monkeypatch.setenv("BLURMAP_ENTROPY_BINS", "32")
    assert get_config().entropy_bins == 32
    set_config(None)


def test_plain_log_level_env_is_a_fallback():
    assert PipelineConfig.from_env(None, {"LOG_LEVEL": "DEBUG"}).log_level == "DEBUG"
    environ = {"LOG_LEVEL": "DEBUG", "BLURMAP_LOG_LEVEL": "WARNING"}
    assert PipelineConfig.from_env(None, environ).log_level == "WARNING"
