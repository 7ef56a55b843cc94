"""Small numeric helpers: deterministic reductions, thread budget, tolerances."""

import math
import os

import numpy as np


def pairwise_sum(values):
    """Sum in a fixed pairwise tree so the result is independent of chunking.

    Parallel and serial runs reduce in the same order, which keeps CSV
    output byte-identical across thread counts.
    """
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.concatenate([a, [0.0]])
        a = a[0::2] + a[1::2]
    return float(a[0])


def worker_count():
    """Worker cap from the UMBILIC_THREADS env var, clamped to [1, 64]."""
    raw = os.environ.get("UMBILIC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, min(n, 64))


def wrap_angle(theta):
    """Reduce an angle to [0, 2*pi)."""
    t = math.fmod(float(theta), 2.0 * math.pi)
    return t + 2.0 * math.pi if t < 0.0 else t


def close_rel(a, b, tol, floor=1.0):
    """True when |a - b| <= tol * max(floor, |a|, |b|)."""
    return abs(a - b) <= tol * max(floor, abs(a), abs(b))


def unit3(v):
    """Normalize a 3-vector (or an array of them along the last axis)."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n
