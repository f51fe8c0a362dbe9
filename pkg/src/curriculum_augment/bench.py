"""Throughput benchmark for the per-sample augmentation step.

One timed unit is what the pipeline does per sample after preprocessing:
derive the sample seed, open its stream and apply the technique to a 224x224
(by default) image.  Images come from a pool of distinct synthetic images so
the cache does not flatter the copy-dominated techniques.
"""

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .curriculum import CurriculumSchedule
from .exceptions import InvalidParameterError
from .pipeline import PAIRED_TECHNIQUES, apply_technique, normalize_technique
from .rng import RngStream, derive_seed

POOL_SIZE = 128


def synthesize_pool(size, n, seed):
    rng = RngStream(seed)
    return [rng.bytes(size * size * 3).reshape(size, size, 3).copy() for _ in range(n)]


def _bench_range(start, stop, technique, size, pool_size, seed, schedule, curriculum_epochs, epoch, alpha):
    pool = synthesize_pool(size, pool_size, seed)
    paired = technique in PAIRED_TECHNIQUES
    latencies = []
    digests = []
    clock = time.perf_counter
    for i in range(start, stop):
        ep = epoch + (i % curriculum_epochs)
        n_regions = schedule.regions_for_epoch(ep)
        img = pool[i % len(pool)]
        other = pool[(i + 1) % len(pool)] if paired else None
        t0 = clock()
        rng = RngStream(derive_seed(seed, ep, i))
        out, _, _ = apply_technique(
            technique, img, rng, box=schedule.box, n_regions=n_regions, alpha=alpha, other=other
        )
        latencies.append(clock() - t0)
        digests.append(hashlib.sha256(out.tobytes()).digest())
    return latencies, digests


def run_bench(technique, size=224, iterations=1000, workers=1, seed=0, box=32,
              epoch=0, curriculum_epochs=1, alpha=0.2, schedule=None):
    """Time ``iterations`` augmentations and summarize them.

    With ``curriculum_epochs > 1`` iteration ``i`` runs at epoch
    ``epoch + i % curriculum_epochs``, spreading the work evenly over a
    curriculum the way a multi-epoch training run does.
    """
    technique = normalize_technique(technique)
    if iterations < 1:
        raise InvalidParameterError(f"iterations must be >= 1, got {iterations}")
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    if curriculum_epochs < 1 or epoch < 0:
        raise InvalidParameterError("epoch must be >= 0 and curriculum_epochs >= 1")
    if box > size:
        raise InvalidParameterError(f"box exceeds image: {box}px box on a {size}x{size} image")
    if schedule is None:
        schedule = CurriculumSchedule(box=box)
    args = (technique, size, min(POOL_SIZE, iterations), seed, schedule, curriculum_epochs, epoch, alpha)

    bounds = np.linspace(0, iterations, min(workers, iterations) + 1).astype(int)
    start = time.perf_counter()
    if workers == 1:
        parts = [_bench_range(0, iterations, *args)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futures = [
                ex.submit(_bench_range, int(lo), int(hi), *args)
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            parts = [f.result() for f in futures]
    wall = time.perf_counter() - start

    latencies = np.array([t for lat, _ in parts for t in lat])
    checksum = hashlib.sha256(b"".join(d for _, dig in parts for d in dig)).hexdigest()
    ms = latencies * 1e3
    return {
        "technique": technique,
        "image_size": size,
        "iterations": iterations,
        "workers": workers,
        "box": schedule.box,
        "epochs": list(range(epoch, epoch + curriculum_epochs)),
        "images_per_second": iterations / wall if wall > 0 else float("inf"),
        "per_image_ms": {
            "mean": float(ms.mean()),
            "p50": float(np.percentile(ms, 50)),
            "p90": float(np.percentile(ms, 90)),
            "p99": float(np.percentile(ms, 99)),
        },
        "wall_time": wall,
        "checksum": checksum,
    }
