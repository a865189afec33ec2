import numpy as np
import pytest

from escape_lab.paths import PolyChain


def hit_count_area(centers, radii, samples, rng, box=None):
    """Brute-force intersection area by hit counting in a box; returns (area, stderr)."""
    centers = np.asarray(centers, float)
    radii = np.asarray(radii, float)
    if box is None:
        lo = (centers - radii[:, None]).max(axis=0)
        hi = (centers + radii[:, None]).min(axis=0)
    else:
        lo, hi = box
    if np.any(hi <= lo):
        return 0.0, 0.0
    vol = float(np.prod(hi - lo))
    hits = 0
    left = samples
    while left:
        m = min(left, 1 << 20)
        x = rng.uniform(lo, hi, (m, centers.shape[1]))
        inside = np.ones(m, bool)
        for c, r in zip(centers, radii):
            inside &= ((x - c) ** 2).sum(axis=1) <= r * r
        hits += int(inside.sum())
        left -= m
    p = hits / samples
    return vol * p, vol * np.sqrt(p * (1 - p) / samples)


def random_chain(rng, k_max=6, segment_length=0.5, max_turn=np.pi):
    k = int(rng.integers(0, k_max + 1))
    return PolyChain.from_turns(rng.uniform(-max_turn, max_turn, k), segment_length)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
