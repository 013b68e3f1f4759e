import numpy as np
import pytest

from blurmap.config import PipelineConfig
from blurmap.transform.preproc import GaussianParams, gaussian_filter
from blurmap.workers import close_pool


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_image(rng):
    return rng.random((24, 24))


@pytest.fixture
def fast_config():
    """Small scales so end-to-end runs stay quick on tiny images."""
    return PipelineConfig(scales=(3, 7), smooth_sigma_s=5.0, threads=1)


@pytest.fixture
def half_blurred(rng):
    """Left half white noise, right half the same noise blurred with sigma 3."""
    noise = rng.random((64, 64))
    blurred = gaussian_filter(noise, GaussianParams.for_sigma(3.0))
    image = noise.copy()
    image[:, 32:] = blurred[:, 32:]
    mask = np.zeros_like(image)
    mask[:, :32] = 1.0
    return image, mask


@pytest.fixture(autouse=True)
def _no_leaked_pool():
    yield
    close_pool()
