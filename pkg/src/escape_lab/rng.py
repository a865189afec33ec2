"""Seeded, splittable random streams.

Every stream is addressed by ``(seed, stream_id)`` and backed by the
counter-based Philox generator, so a chunk of work draws the same numbers
no matter which worker runs it or in what order.
"""
from __future__ import annotations

import os

import numpy as np

THREADS_ENV = "ESCAPE_LAB_THREADS"


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    if seed < 0 or stream_id < 0:
        raise ValueError("seed and stream_id must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))


def chunk_counts(total: int, chunk: int) -> list[int]:
    """Split ``total`` draws into fixed-size chunks (last one may be short).

    The split depends only on ``total`` and ``chunk``, never on the worker
    count, which is what keeps reductions byte-identical.
    """
    if total <= 0:
        return []
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def worker_count(default: int | None = None) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return default if default is not None else (os.cpu_count() or 1)
