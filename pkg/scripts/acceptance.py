#!/usr/bin/env python3
"""Desk-scale acceptance run on the seeded synthetic suite.

Generates 20 pairs (sigma_blur in {2, 4}), then reports blur discrimination,
aggregate max F-measure, the noise experiment and the single-scale ablation.

Manual run: python scripts/acceptance.py [workdir]
"""

import os
import sys
import tempfile
from pathlib import Path

# Load .env if exists (BLURMAP_* overrides)
env_path = Path(__file__).parent.parent / ".env"
if env_path.exists():
    for line in env_path.read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#") and "=" in line:
            key, _, value = line.partition("=")
            os.environ.setdefault(key.strip(), value.strip())

# Add project root to path (for `import blurmap...`)
sys.path.insert(0, str(Path(__file__).parent.parent))

from blurmap.config import PipelineConfig
from blurmap.logs import setup_logging
from blurmap.services.evaluation import dataset_noise_sweep, dataset_scale_ablation, run_dataset
from blurmap.services.synthetic import generate_suite
from blurmap.workers import worker_pool


def main() -> int:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="blurmap-"))
    config = PipelineConfig.from_env()
    setup_logging(config.log_level)

    generate_suite(workdir / "suite", count=20, seed=7, sigmas=(2.0, 4.0))
    images, masks = workdir / "suite" / "images", workdir / "suite" / "masks"
    failures = []

    with worker_pool(config.threads):
        report = run_dataset(images, masks, config, workdir / "curves")
        print(f"discrimination {report.discriminating}/20, aggregate max F {report.max_f:.4f}")
        if report.discriminating < 19:
            failures.append("discrimination")
        if report.max_f < 0.80:
            failures.append("max F")

        sweep = dict(dataset_noise_sweep(images, masks, [0.0, 1e-4, 1e-2], seed=7, config=config))
        base = sweep[0.0].max_f
        for variance in (1e-4, 1e-2):
            print(f"noise variance {variance:g}: max F {sweep[variance].max_f:.4f}")
        if abs(base - sweep[1e-4].max_f) > 0.05:
            failures.append("noise 1e-4")
        if base - sweep[1e-2].max_f > 0.20:
            failures.append("noise 1e-2")

        ablation = dataset_scale_ablation(images, masks, config)
        best_single = max(r.max_f for label, r in ablation.items() if label != "multiscale")
        print(f"multiscale max F {ablation['multiscale'].max_f:.4f}, best single scale {best_single:.4f}")
        if ablation["multiscale"].max_f < best_single - 0.02:
            failures.append("ablation")

    if failures:
        print(f"FAILED: {', '.join(failures)}")
        return 1
    print("all acceptance checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
