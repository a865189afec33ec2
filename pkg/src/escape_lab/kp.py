"""Numerical checks of the Kneser-Poulsen inequalities.

A configuration ``q`` is an expansion of ``p`` when no pairwise center
distance shrinks going from ``p`` to ``q``. Then the union of the balls
should not shrink and the intersection should not grow. In the plane this
is a theorem and is checked here with exact areas. In higher dimensions it
is checked statistically with Monte Carlo volumes.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from escape_lab.errors import InvalidLambda, InvalidMotion, InvalidTau, LengthMismatch, NotAnExpansion
from escape_lab.geom import (
    DiskConfig,
    as_vector,
    intersection_area_2d,
    intersection_volume_mc,
    union_area_2d,
    union_volume_mc,
    uniform_sphere_sample,
)
from escape_lab.rng import stream, worker_count

KP_SLACK = 1e-9
MC_SIGMAS = 4.0
GENERATORS = ("scaling", "projection")


@dataclass(frozen=True)
class ConfigPair:
    """``p`` (the contracted configuration) and ``q`` (its expansion)."""

    p: DiskConfig
    q: DiskConfig

    def __post_init__(self):
        if len(self.p) != len(self.q):
            raise LengthMismatch(f"p has {len(self.p)} balls, q has {len(self.q)}")
        if self.p.dim != self.q.dim:
            raise LengthMismatch("p and q live in different dimensions")
        if not np.array_equal(self.p.radii, self.q.radii):
            raise LengthMismatch("p and q must carry the same radii")


@dataclass(frozen=True)
class ExpansionCheck:
    ok: bool
    witness: tuple[int, int] | None = None
    margin: float = 0.0  # min over pairs of d_q - d_p

    def __bool__(self) -> bool:
        return self.ok


def _pairwise(c: np.ndarray) -> np.ndarray:
    return np.linalg.norm(c[:, None, :] - c[None, :, :], axis=2)


def is_expansion(pair: ConfigPair, slack: float = 0.0) -> ExpansionCheck:
    """Whether every pairwise distance in ``q`` is at least the one in ``p`` minus ``slack``."""
    n = len(pair.p)
    if n < 2:
        return ExpansionCheck(True, None, math.inf)
    gap = _pairwise(pair.q.centers) - _pairwise(pair.p.centers)
    iu = np.triu_indices(n, 1)
    vals = gap[iu]
    k = int(np.argmin(vals))
    margin = float(vals[k])
    if margin < -slack:
        return ExpansionCheck(False, (int(iu[0][k]), int(iu[1][k])), margin)
    return ExpansionCheck(True, None, margin)


def contract_by_scaling(q: DiskConfig, lam: float) -> ConfigPair:
    """Shrink ``q`` by ``lam`` about its centroid."""
    if not (0.0 < lam <= 1.0):
        raise InvalidLambda(f"lambda must lie in (0, 1], got {lam}")
    c = q.centers.mean(axis=0)
    return ConfigPair(DiskConfig(c + lam * (q.centers - c), q.radii), q)


def contract_by_projection(q: DiskConfig, axis) -> ConfigPair:
    """Project ``q`` onto the line through its centroid along unit ``axis``."""
    a = as_vector(axis, q.dim)
    if abs(np.linalg.norm(a) - 1.0) > 1e-9:
        raise ValueError("axis must be a unit vector")
    c = q.centers.mean(axis=0)
    p = c + np.outer((q.centers - c) @ a, a)
    return ConfigPair(DiskConfig(p, q.radii), q)


@dataclass(frozen=True)
class KPReport:
    intersection_ok: bool
    union_ok: bool
    intersection_p: float
    intersection_q: float
    union_p: float
    union_q: float
    intersection_stderr: float = 0.0
    union_stderr: float = 0.0

    @property
    def ok(self) -> bool:
        return self.intersection_ok and self.union_ok


def _require_expansion(pair: ConfigPair, slack: float):
    chk = is_expansion(pair, slack)
    if not chk:
        raise NotAnExpansion(f"q shrinks the distance between balls {chk.witness} by {-chk.margin:.3g}")


def verify_kp_2d(pair: ConfigPair, slack: float = KP_SLACK) -> KPReport:
    """Exact planar check of both inequalities."""
    _require_expansion(pair, slack)
    ip, _ = intersection_area_2d(pair.p)
    iq, _ = intersection_area_2d(pair.q)
    up = union_area_2d(pair.p).value
    uq = union_area_2d(pair.q).value
    return KPReport(bool(ip >= iq - slack), bool(up <= uq + slack), float(ip), float(iq), float(up), float(uq))


def verify_kp_mc(pair: ConfigPair, samples: int, rng: np.random.Generator) -> KPReport:
    """Monte Carlo check in any dimension; flags use a 4-sigma band."""
    _require_expansion(pair, KP_SLACK)
    ip = intersection_volume_mc(pair.p, samples, rng)
    iq = intersection_volume_mc(pair.q, samples, rng)
    up = union_volume_mc(pair.p, samples, rng)
    uq = union_volume_mc(pair.q, samples, rng)
    ise = math.hypot(ip.stderr, iq.stderr)
    use = math.hypot(up.stderr, uq.stderr)
    return KPReport(
        bool(ip.value >= iq.value - MC_SIGMAS * ise),
        bool(up.value <= uq.value + MC_SIGMAS * use),
        float(ip.value),
        float(iq.value),
        float(up.value),
        float(uq.value),
        float(ise),
        float(use),
    )


def random_pair(
    rng: np.random.Generator,
    generator: str,
    dim: int = 2,
    n_max: int = 6,
    radii: tuple[float, float] = (0.5, 1.5),
    spread: float = 1.0,
) -> ConfigPair:
    """A random configuration and a contraction of it."""
    n = int(rng.integers(1, n_max + 1))
    centers = rng.uniform(-spread, spread, (n, dim))
    r = rng.uniform(radii[0], radii[1], n)
    q = DiskConfig(centers, r)
    if generator == "scaling":
        return contract_by_scaling(q, float(rng.uniform(0.05, 1.0)))
    if generator == "projection":
        return contract_by_projection(q, uniform_sphere_sample(dim, rng))
    raise ValueError(f"unknown generator {generator!r}")


def campaign_record(seed: int, index: int, generator: str, dim: int, n_max: int, samples: int) -> dict:
    """One campaign pair drawn from stream ``(seed, index)`` and its report as a JSON-ready dict."""
    rng = stream(seed, index)
    gen = generator if generator != "mixed" else GENERATORS[index % 2]
    pair = random_pair(rng, gen, dim, n_max)
    rec = {"seed": seed, "index": index, "generator": gen, "N": len(pair.q), "dim": dim}
    chk = is_expansion(pair, 1e-12)
    if not chk:
        rec.update(flags={"expansion": False}, witness=list(chk.witness))
        return rec
    if dim == 2:
        rep = verify_kp_2d(pair)
        rec["areas"] = {
            "intersection_p": rep.intersection_p,
            "intersection_q": rep.intersection_q,
            "union_p": rep.union_p,
            "union_q": rep.union_q,
        }
        rec["exact"] = True
    else:
        rep = verify_kp_mc(pair, samples, rng)
        rec["volumes"] = {
            "intersection_p": rep.intersection_p,
            "intersection_q": rep.intersection_q,
            "union_p": rep.union_p,
            "union_q": rep.union_q,
            "intersection_stderr": rep.intersection_stderr,
            "union_stderr": rep.union_stderr,
        }
        rec["exact"] = False
    rec["flags"] = {"expansion": True, "intersection_ok": rep.intersection_ok, "union_ok": rep.union_ok}
    return rec


def run_campaign(
    size: int,
    seed: int,
    generator: str = "mixed",
    dim: int = 2,
    n_max: int = 6,
    samples: int = 100_000,
    workers: int | None = None,
) -> Iterator[dict]:
    """Records in index order regardless of how many workers compute them."""
    if generator not in GENERATORS + ("mixed",):
        raise ValueError(f"unknown generator {generator!r}")
    workers = workers or worker_count(1)

    def one(i):
        return campaign_record(seed, i, generator, dim, n_max, samples)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            yield from ex.map(one, range(size))
    else:
        for i in range(size):
            yield one(i)


def record_line(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True)


@dataclass(frozen=True)
class StretchMotion:
    """Collinear motion from straightened-chain gaps ``l`` to line gaps ``L``.

    Position ``j`` at time ``tau`` is the sum over ``m < j`` of
    ``tau * L[m] + (1 - tau) * l[m]`` along the first axis.
    """

    chain_lengths: tuple[float, ...]
    target_lengths: tuple[float, ...]
    tol: float = field(default=1e-12, compare=False)

    def __post_init__(self):
        l = tuple(float(x) for x in self.chain_lengths)
        L = tuple(float(x) for x in self.target_lengths)
        if len(l) != len(L):
            raise LengthMismatch("chain and target gap lists differ in length")
        for j, (a, b) in enumerate(zip(l, L)):
            if a < 0 or b < 0:
                raise InvalidMotion(f"gap {j} is negative")
            if a > b + self.tol:
                raise InvalidMotion(f"chain gap {j} ({a}) exceeds its target ({b})")
        # absorb rounding in l_j <= L_j
        l = tuple(min(a, b) for a, b in zip(l, L))
        object.__setattr__(self, "chain_lengths", l)
        object.__setattr__(self, "target_lengths", L)

    @classmethod
    def from_chain(cls, points, times) -> "StretchMotion":
        """Gaps of a sampled unit-speed path: ``l_j = |p_{j+1} - p_j|``, ``L_j = t_{j+1} - t_j``."""
        pts = np.asarray(points, dtype=float)
        t = np.asarray(times, dtype=float)
        l = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        return cls(tuple(l), tuple(np.diff(t)), tol=1e-9)


def stretch_motion_eval(motion: StretchMotion, tau: float, dim: int = 2) -> np.ndarray:
    if not (0.0 <= tau <= 1.0):
        raise InvalidTau(f"tau must lie in [0, 1], got {tau}")
    gaps = tau * np.asarray(motion.target_lengths) + (1.0 - tau) * np.asarray(motion.chain_lengths)
    pts = np.zeros((gaps.size + 1, dim))
    pts[1:, 0] = np.cumsum(gaps)
    return pts


def verify_motion_expansive(motion: StretchMotion, grid: int = 101, tol: float = 1e-12) -> ExpansionCheck:
    """Every pairwise distance must be nondecreasing along a uniform tau grid.

    On failure the witness is the offending index pair; ``margin`` holds the
    worst decrease seen (negative).
    """
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    taus = np.linspace(0.0, 1.0, grid)
    prev = None
    worst = math.inf
    witness = None
    for tau in taus:
        d = _pairwise(stretch_motion_eval(motion, float(tau), 1))
        if prev is not None:
            step = d - prev
            k = np.unravel_index(int(np.argmin(step)), step.shape)
            if step[k] < worst:
                worst = float(step[k])
                witness = (int(min(k)), int(max(k)))
        prev = d
    if worst < -tol:
        return ExpansionCheck(False, witness, worst)
    return ExpansionCheck(True, None, worst)
