"""Timing harness comparing the fast clip against the brute-force oracle."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .quat_core import DEFAULT_AXIS, Axis
from .quat_linalg import QTensor
from .spectral_clip import ORACLE_MAX_SIDE, clip, oracle_clip, spectral_norm


@dataclass(frozen=True)
class BenchRow:
    n: int
    clip_ms: float
    oracle_ms: float | None


def time_call(fn, min_total: float = 0.05, min_reps: int = 3, max_reps: int = 200) -> float:
    """Best single-call wall time in milliseconds."""
    best = float("inf")
    spent = 0.0
    reps = 0
    while reps < min_reps or (spent < min_total and reps < max_reps):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = min(best, dt)
        spent += dt
        reps += 1
    return best * 1e3


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _warm_up(axis: Axis) -> None:
    k = QTensor.random((4, 4), np.random.default_rng(0))
    clip(k, 0.5 * spectral_norm(k, axis), axis)
    oracle_clip(k, 1.0, axis)


def run_bench(sizes, seed: int = 0, axis: Axis = DEFAULT_AXIS, oracle_max: int = ORACLE_MAX_SIDE) -> list[BenchRow]:
    """Time clip (and the oracle where allowed) on random N x N kernels."""
    _warm_up(axis)
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        kernel = QTensor.random((n, n), rng)
        t = 0.5 * spectral_norm(kernel, axis)
        clip_ms = time_call(lambda: clip(kernel, t, axis))
        oracle_ms = None
        if n <= oracle_max:
            oracle_ms = time_call(lambda: oracle_clip(kernel, t, axis))
        rows.append(BenchRow(int(n), clip_ms, oracle_ms))
    return rows


def slopes(rows: list[BenchRow]) -> tuple[float, float]:
    """(clip slope over all rows, oracle slope over rows with an oracle time)."""
    clip_slope = loglog_slope([r.n for r in rows], [r.clip_ms for r in rows])
    with_oracle = [r for r in rows if r.oracle_ms is not None]
    oracle_slope = loglog_slope([r.n for r in with_oracle], [r.oracle_ms for r in with_oracle])
    return clip_slope, oracle_slope
