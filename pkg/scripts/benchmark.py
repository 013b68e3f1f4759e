#!/usr/bin/env python3
"""Time the default pipeline on a 256x256 image, single-threaded and with 4 workers.

BLAS is pinned to one thread for both runs.

Manual run: python scripts/benchmark.py [--size 256] [--threads 4]
"""

import argparse
import os
import sys
import time
from pathlib import Path

# Load .env if exists (BLURMAP_* overrides)
env_path = Path(__file__).parent.parent / ".env"
if env_path.exists():
    for line in env_path.read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#") and "=" in line:
            key, _, value = line.partition("=")
            os.environ.setdefault(key.strip(), value.strip())

# Both timings run on a single BLAS thread, so workers are the only
# source of parallelism being measured.
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ[var] = "1"

# Add project root to path (for `import blurmap...`)
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from blurmap.config import PipelineConfig
from blurmap.logs import setup_logging
from blurmap.services.detection import detect
from blurmap.services.synthetic import make_pair
from blurmap.workers import worker_pool


def timed_run(image: np.ndarray, config: PipelineConfig, threads: int):
    with worker_pool(threads):
        started = time.perf_counter()
        blur_map = detect(image, config)
        return time.perf_counter() - started, blur_map


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--threads", type=int, default=4)
    args = parser.parse_args()

    config = PipelineConfig.from_env()
    setup_logging(config.log_level)
    image, _ = make_pair("half-plane", args.size, 4.0, seed=7)

    single, map_single = timed_run(image, config, 1)
    multi, map_multi = timed_run(image, config, args.threads)
    identical = np.array_equal(map_single.map, map_multi.map)

    print(f"size={args.size} scales={config.scales}")
    print(f"threads=1 seconds={single:.2f}")
    print(f"threads={args.threads} seconds={multi:.2f} speedup={single / multi:.2f}x")
    print(f"identical_across_thread_counts={identical}")
    return 0 if identical else 3


if __name__ == "__main__":
    sys.exit(main())
