import csv

import numpy as np
import pytest
from PIL import Image

from blurmap.config import PipelineConfig
from blurmap.errors import ContractViolation
from blurmap.services.detection import detect
from blurmap.services.evaluation import (
    CSV_HEADER,
    ConfusionCounts,
    PrCurve,
    ablation_configs,
    add_noise,
    confusion_counts,
    f_measure,
    macro_average,
    noise_sweep,
    pr_curve,
    region_means,
    run_dataset,
    write_curve_csv,
)
from blurmap.services.synthetic import make_pair
from blurmap.transform.sliding_dct import ScaleSet


def _save(array, path):
    Image.fromarray(np.round(np.clip(array, 0, 1) * 255).astype(np.uint8)).save(path)


@pytest.fixture
def tiny_dataset(tmp_path):
    images, masks = tmp_path / "images", tmp_path / "masks"
    images.mkdir()
    masks.mkdir()
    for k, shape in enumerate(("half-plane", "disk")):
        image, mask = make_pair(shape, size=32, sigma_blur=3.0, seed=[1, k])
        _save(image, images / f"pair_{k}.png")
        _save(mask, masks / f"pair_{k}.png")
    return images, masks


# ========== Curves ==========

def test_perfect_map_curve():
    gt = np.array([[1.0, 1.0, 0.0, 0.0]])
    curve = pr_curve(gt.copy(), gt)
    assert curve.precision[0] == pytest.approx(0.5)
    assert curve.recall[0] == 1.0
    assert curve.precision[255] == 1.0 and curve.recall[255] == 1.0
    assert curve.precision[128] == 1.0 and curve.recall[128] == 1.0


def test_inverted_map_curve():
    gt = np.array([[1.0, 1.0, 0.0, 0.0]])
    curve = pr_curve(1.0 - gt, gt)
    assert curve.precision[255] == 0.0
    assert curve.recall[255] == 0.0


def test_empty_prediction_counts_as_full_precision():
    gt = np.array([[1.0, 0.0]])
    curve = pr_curve(np.zeros((1, 2)), gt)
    # nothing reaches threshold 1, so TP + FP = 0
    assert curve.precision[1] == 1.0
    assert curve.recall[1] == 0.0


def test_quantization_rounds_half_up():
    gt = np.array([[1.0]])
    counts = confusion_counts(np.array([[0.5]]), gt)
    assert counts.tp[128] == 1
    assert counts.tp[129] == 0


def test_recall_is_monotone_and_positives_constant(rng):
    values = rng.random((20, 20))
    gt = (rng.random((20, 20)) > 0.6).astype(np.float64)
    counts = confusion_counts(values, gt)
    curve = PrCurve.from_counts(counts)
    assert np.all(np.diff(curve.recall) <= 0)
    assert np.all(counts.tp + counts.fn == int(gt.sum()))
    assert curve.thresholds.tolist() == list(range(256))


def test_counts_add_up():
    a = ConfusionCounts(tp=np.ones(256), fp=np.zeros(256), fn=np.full(256, 2.0))
    total = a + a
    assert total.tp[0] == 2 and total.fn[5] == 4


def test_f_measure_examples():
    assert f_measure(1.0, 1.0) == 1.0
    assert f_measure(0.5, 1.0) == pytest.approx(2.0 / 3.0)
    assert f_measure(0.0, 0.0) == 0.0
    assert f_measure(0.5, 1.0, beta2=0.3) == pytest.approx(1.3 * 0.5 / (0.3 * 0.5 + 1.0))


def test_best_threshold_matches_max_f():
    gt = np.array([[1.0, 1.0, 0.0, 0.0]])
    curve = pr_curve(np.array([[0.9, 0.6, 0.4, 0.1]]), gt)
    assert curve.max_f_measure() == 1.0
    t = curve.best_threshold()
    assert curve.precision[t] == 1.0 and curve.recall[t] == 1.0


def test_macro_average_is_mean_of_curves():
    gt = np.array([[1.0, 0.0]])
    a = pr_curve(np.array([[1.0, 0.0]]), gt)
    b = pr_curve(np.array([[0.0, 1.0]]), gt)
    mean = macro_average([a, b])
    assert np.allclose(mean.precision, (a.precision + b.precision) / 2)
    assert np.allclose(mean.recall, (a.recall + b.recall) / 2)


def test_region_means_on_clean_split():
    gt = np.zeros((32, 32))
    gt[:, :16] = 1.0
    values = gt * 0.8 + 0.1
    sharp, blurred = region_means(values, gt, margin=4)
    assert sharp == pytest.approx(0.9)
    assert blurred == pytest.approx(0.1)


def test_curve_csv_format(tmp_path):
    gt = np.array([[1.0, 0.0]])
    path = tmp_path / "curve.csv"
    write_curve_csv(pr_curve(np.array([[0.75, 0.25]]), gt), path)
    with path.open() as fp:
        rows = list(csv.reader(fp))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 257
    assert rows[1] == ["0", "0.500000", "1.000000", "0.666667"]


# ========== Datasets ==========

def test_run_dataset_writes_curves(tiny_dataset, tmp_path, fast_config):
    images, masks = tiny_dataset
    out = tmp_path / "out"
    report = run_dataset(images, masks, fast_config, out)
    assert [r.name for r in report.images] == ["pair_0", "pair_1"]
    assert report.warnings == 0
    assert sorted(p.name for p in out.glob("*.csv")) == ["aggregate.csv", "pair_0.csv", "pair_1.csv"]
    assert 0.0 <= report.max_f <= 1.0


def test_duplicated_pair_keeps_micro_average(tiny_dataset, tmp_path, fast_config):
    images, masks = tiny_dataset
    single = tmp_path / "single"
    (single / "images").mkdir(parents=True)
    (single / "masks").mkdir()
    for sub, src in (("images", images), ("masks", masks)):
        data = (src / "pair_0.png").read_bytes()
        (single / sub / "a.png").write_bytes(data)
        (single / sub / "b.png").write_bytes(data)
    doubled = run_dataset(single / "images", single / "masks", fast_config)
    alone = run_dataset(images, masks, fast_config).images[0].curve
    assert np.allclose(doubled.aggregate.precision, alone.precision)
    assert np.allclose(doubled.aggregate.recall, alone.recall)


def test_missing_mask_is_a_warning(tiny_dataset, fast_config):
    images, masks = tiny_dataset
    (masks / "pair_1.png").unlink()
    report = run_dataset(images, masks, fast_config)
    assert report.warnings == 1
    assert report.errors[0]["image"] == "pair_1.png"
    assert len(report.images) == 1


def test_macro_averaging_option(tiny_dataset, fast_config):
    images, masks = tiny_dataset
    report = run_dataset(images, masks, fast_config, averaging="macro")
    expected = macro_average([r.curve for r in report.images])
    assert np.allclose(report.aggregate.precision, expected.precision)
    with pytest.raises(ContractViolation):
        run_dataset(images, masks, fast_config, averaging="median")


# ========== Experiments ==========

def test_zero_noise_is_identity(rng):
    image = rng.random((8, 8))
    assert np.array_equal(add_noise(image, 0.0, np.random.default_rng(0)), image)
    noisy = add_noise(image, 0.01, np.random.default_rng(0))
    assert noisy.min() >= 0.0 and noisy.max() <= 1.0
    with pytest.raises(ContractViolation):
        add_noise(image, -0.1, np.random.default_rng(0))


def test_noise_sweep_is_seeded(fast_config):
    image, mask = make_pair("half-plane", size=32, sigma_blur=3.0, seed=2)
    first = noise_sweep(image, mask, [0.0, 0.001], seed=4, config=fast_config)
    second = noise_sweep(image, mask, [0.0, 0.001], seed=4, config=fast_config)
    assert [v for v, _ in first] == [0.0, 0.001]
    for (_, a), (_, b) in zip(first, second):
        assert np.array_equal(a.precision, b.precision)
        assert np.array_equal(a.recall, b.recall)
    clean = pr_curve(detect(image, fast_config), mask)
    assert np.array_equal(first[0][1].precision, clean.precision)


def test_ablation_configs():
    configs = ablation_configs(ScaleSet(), PipelineConfig())
    assert list(configs) == ["M=7", "M=15", "M=31", "M=63", "multiscale"]
    assert configs["M=7"].scale_set().retained == 7
    assert configs["multiscale"].scale_set().retained == 116


def test_image_named_aggregate_is_skipped(tiny_dataset, tmp_path, fast_config):
    images, masks = tiny_dataset
    (images / "aggregate.png").write_bytes((images / "pair_0.png").read_bytes())
    (masks / "aggregate.png").write_bytes((masks / "pair_0.png").read_bytes())
    out = tmp_path / "out"
    report = run_dataset(images, masks, fast_config, out)
    assert [r.name for r in report.images] == ["pair_0", "pair_1"]
    assert report.warnings == 1
    assert report.errors[0]["image"] == "aggregate.png"
    with (out / "aggregate.csv").open() as fp:
        rows = list(csv.reader(fp))
    assert rows[1][1] == f"{report.aggregate.precision[0]:.6f}"
