"""Haar-uniform state sampling and deterministic batch evaluation.

Per-state seeds are derived as ``seed + index``, so serial runs and
worker-partitioned runs produce identical streams; each state's work
item is pure, and aggregation is by index, independent of worker count.
The generator is numpy's default PCG64, seeded explicitly and echoed in
all outputs.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import FlowConfig
from .errors import ConvergenceError, ReconstructionError
from .measures import k4_from_canonic
from .states import PureState
from .su_reduction import reduce_su

__all__ = ["haar_sample", "k4_batch", "histogram_counts"]


def haar_sample(n, seed):
    """One Haar-uniform n-qubit pure state (deterministic per seed).

    Draws 2**n standard complex Gaussian amplitudes (real block then
    imaginary block) and normalizes; the invariance of the Gaussian
    ensemble makes the result uniform on the sphere.
    """
    if n not in (3, 4):
        raise ValueError("sampling is wired for n in {3, 4}")
    rng = np.random.default_rng(seed)
    size = 1 << n
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return PureState(n, z / np.linalg.norm(z))


def _k4_work_item(args):
    index, n, seed, cfg_tuple = args
    cfg = FlowConfig(*cfg_tuple)
    state = haar_sample(n, seed + index)
    try:
        tm, _ = reduce_su(state, cfg)
        return index, k4_from_canonic(tm.state), tm.iterations, None
    except (ConvergenceError, ReconstructionError) as err:
        return index, None, None, str(err)


def _cfg_tuple(cfg):
    return (
        cfg.dt0, cfg.tol_linear, cfg.tol_phase, cfg.max_iters,
        cfg.tol_cubic, cfg.tol_det, cfg.tol_gamma,
    )


def k4_batch(count, seed, n=4, cfg=None, workers=1):
    """K4 for ``count`` Haar samples with per-index seeds.

    Returns (values, failures): ``values`` maps index -> K4 for every
    state whose reduction converged, ``failures`` maps index -> message
    for the rest (reported, never dropped silently).
    """
    cfg = cfg or FlowConfig()
    items = [(i, n, seed, _cfg_tuple(cfg)) for i in range(count)]
    results = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_k4_work_item, items, chunksize=64))
    else:
        results = [_k4_work_item(item) for item in items]
    values, failures = {}, {}
    for index, value, _iters, error in sorted(results):
        if error is None:
            values[index] = value
        else:
            failures[index] = error
    return values, failures


def histogram_counts(values, bin_count, lo=0.0, hi=1.0):
    """Fixed-range histogram; values at the top edge land in the last bin."""
    edges = np.linspace(lo, hi, bin_count + 1)
    data = np.fromiter(values, dtype=float)
    counts, _ = np.histogram(np.clip(data, lo, hi), bins=edges)
    return edges, counts
