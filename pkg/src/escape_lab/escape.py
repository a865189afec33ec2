"""Escape times and the expected escape time J.

For a start point ``x`` the hiker is still inside the unit ball at time
``t`` iff ``x`` lies in every unit ball centered at ``-path(s)``, s <= t.
So the survival probability is the area of an intersection of translated
disks divided by pi, and J is the time integral of that area over pi.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from escape_lab.errors import DimensionMismatch, InvalidSpacing, OutsideBall
from escape_lab.geom import (
    EPS_GEOM,
    ArcRegion,
    RegionClipper,
    intersection_area_2d,
    intersection_volume_mc,
    lens_area,
    uniform_ball_samples,
    uniform_sphere_samples,
)
from escape_lab.paths import Arc, UnitSpeedPath, centers_for_partition, check_partition
from escape_lab.rng import chunk_counts, stream, worker_count

H_DEFAULT = 0.005
T_CAP_DEFAULT = 16.0
EPS_AREA_DEFAULT = 1e-10
H_STEP_DEFAULT = 1e-3

QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"
CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class NonEscapeApprox:
    t: float
    partition: np.ndarray
    region: ArcRegion | None
    area: float
    exact: bool
    stderr: float = 0.0


@dataclass(frozen=True)
class MeanEscapeEstimate:
    """An estimate of J.

    ``error_bound`` is the left-minus-right Riemann gap for quadrature, the
    standard error for Monte Carlo and the integrator's error estimate for
    the closed-form line integral. When ``truncated`` is set the path did
    not clear the ball by the time cap and ``value`` is a lower bound.
    """

    value: float
    error_bound: float
    truncated: bool
    method: str
    diagnostics: np.ndarray | None = None  # rows of (t, area, cumulative J)
    samples: int = 0

    def write_csv(self, fp) -> None:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["t", "area", "cumulative_J"])
        if self.diagnostics is not None:
            for t, a, j in self.diagnostics:
                w.writerow([repr(float(t)), repr(float(a)), repr(float(j))])


def non_escape_area(
    path: UnitSpeedPath,
    t: float,
    partition,
    *,
    rng: np.random.Generator | None = None,
    samples: int = 200_000,
) -> NonEscapeApprox:
    """Area (volume for n >= 3) of the intersection of unit balls at ``-path(t_i)``.

    Planar paths get the exact arc-polygon area. Higher dimensions fall back
    to Monte Carlo and need ``rng``.
    """
    times = check_partition(partition)
    if abs(times[-1] - t) > 1e-12 * max(1.0, t):
        raise InvalidSpacing(f"partition ends at {times[-1]}, not at t={t}")
    config = centers_for_partition(path, times)
    if config.dim == 2:
        area, region = intersection_area_2d(config)
        return NonEscapeApprox(float(t), times, region, area, True)
    if rng is None:
        raise ValueError("a random stream is required for n >= 3")
    vol = intersection_volume_mc(config, samples, rng)
    return NonEscapeApprox(float(t), times, None, vol.value, False, vol.stderr)


def line_nonescape_area(t: float) -> float:
    """Area of the non-escape region of a straight line at time ``t``: the two-endpoint lens."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return lens_area(t, 1.0, 1.0)


def mean_escape_quadrature(
    path: UnitSpeedPath,
    h: float = H_DEFAULT,
    t_cap: float = T_CAP_DEFAULT,
    eps_area: float = EPS_AREA_DEFAULT,
) -> MeanEscapeEstimate:
    """Left Riemann sum of (1/pi) * area(K_i) over the grid ``t_i = i*h``.

    ``K_i`` intersects the unit disks at ``-path(t_m)`` for every ``m <= i``
    and is maintained by clipping. Since ``K_i`` contains the true
    non-escape region and areas only shrink with time, the sum is an upper
    bound on J that decreases as ``h`` is refined.
    """
    if path.dim != 2:
        raise DimensionMismatch("exact quadrature is planar only")
    if not (h > 0 and t_cap >= h):
        raise InvalidSpacing(f"need h > 0 and t_cap >= h, got h={h}, t_cap={t_cap}")
    n_steps = math.ceil(t_cap / h - 1e-9)
    clipper = RegionClipper((0.0, 0.0))
    rows: list[tuple[float, float, float]] = []
    total = 0.0
    truncated = False
    last_area = math.pi
    block = 512
    for b0 in range(0, n_steps + 1, block):
        idx = np.arange(b0, min(b0 + block, n_steps + 1))
        pts = path.eval_many(idx * h)
        done = False
        for i, p in zip(idx, pts):
            t = i * h
            a = math.pi if i == 0 else clipper.clip((-p[0], -p[1]))
            last_area = a
            if a < eps_area:
                rows.append((t, a, total / math.pi))
                done = True
                break
            if i == n_steps:
                truncated = True
                rows.append((t, a, total / math.pi))
                done = True
                break
            total += a * h
            rows.append((t, a, total / math.pi))
        if done:
            break
    value = total / math.pi
    bound = h * (math.pi - last_area) / math.pi
    return MeanEscapeEstimate(value, bound, truncated, QUADRATURE, np.array(rows))


def mean_escape_line_quadrature(tolerance: float = 1e-8) -> MeanEscapeEstimate:
    """J of a straight line by adaptive quadrature of the lens area over [0, 2]."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    val, err = integrate.quad(lens_area, 0.0, 2.0, epsabs=0.1 * math.pi * tolerance, epsrel=0.0, limit=200)
    return MeanEscapeEstimate(val / math.pi, err / math.pi, False, QUADRATURE)


def _ray_exit(p: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Smallest ``tau >= 0`` with ``|p + tau u| = 1`` for points ``p`` inside the ball."""
    b = p @ u
    c = 1.0 - np.einsum("...i,...i->...", p, p)
    root = np.sqrt(np.maximum(b * b + c, 0.0))
    # two algebraically equal forms; pick the one without cancellation
    with np.errstate(divide="ignore", invalid="ignore"):
        alt = c / (b + root)
    return np.where(b > 0, alt, root - b)


def line_escape_time(x, u) -> float:
    """Exit time from the unit ball moving from ``x`` along unit direction ``u``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != u.shape:
        raise DimensionMismatch("x and u differ in dimension")
    if np.linalg.norm(x) > 1.0 + EPS_GEOM:
        raise OutsideBall(f"|x| = {np.linalg.norm(x)} > 1")
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise ValueError("u must be a unit vector")
    return float(_ray_exit(x, u))


def escape_times(
    path: UnitSpeedPath,
    x: np.ndarray,
    t_cap: float = T_CAP_DEFAULT,
    h_step: float = H_STEP_DEFAULT,
) -> np.ndarray:
    """Escape times for many start points ``x`` (rows); ``inf`` if the path never exits."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != path.dim:
        raise DimensionMismatch(f"path is {path.dim}-dimensional, points are {x.shape[1]}-dimensional")
    T = np.full(x.shape[0], math.inf)
    if isinstance(path, Arc):
        return _arc_escape_times(path, x, t_cap, h_step)
    alive = np.arange(x.shape[0])
    for s0, p0, u, length in path.pieces():
        if alive.size == 0:
            break
        tau = _ray_exit(x[alive] + p0, u)
        hit = tau <= length
        T[alive[hit]] = s0 + tau[hit]
        alive = alive[~hit]
    return T


def _arc_escape_times(path: Arc, x: np.ndarray, t_cap: float, h_step: float) -> np.ndarray:
    T = np.full(x.shape[0], math.inf)
    arc_end = min(path.length, t_cap)
    alive = np.arange(x.shape[0])
    n_grid = math.ceil(arc_end / h_step - 1e-9)
    grid = np.minimum(np.arange(n_grid + 1) * h_step, arc_end)
    i0 = 1
    while i0 <= n_grid and alive.size:
        block = max(1, min(1024, 4_000_000 // alive.size))
        ts = grid[i0 : i0 + block]
        g = path.eval_many(ts)
        pts = x[alive, None, :] + g[None, :, :]
        out = np.einsum("abi,abi->ab", pts, pts) >= 1.0
        hit = out.any(axis=1)
        if hit.any():
            first = np.argmax(out[hit], axis=1) + i0
            rows = alive[hit]
            T[rows] = _bisect_exit(path, x[rows], grid[first - 1], grid[first])
            alive = alive[~hit]
        i0 += block
    if alive.size and math.isfinite(path.length) and path.length <= t_cap:
        p0, u = path.tail()
        T[alive] = path.length + _ray_exit(x[alive] + p0, u)
    return T


def _bisect_exit(path: Arc, x: np.ndarray, lo: np.ndarray, hi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        p = x + path.eval_many(mid)
        out = np.einsum("ai,ai->a", p, p) >= 1.0
        hi = np.where(out, mid, hi)
        lo = np.where(out, lo, mid)
        if np.all(mid == lo) and np.all(mid == hi):
            break
    return hi


def path_escape_time(
    path: UnitSpeedPath,
    x,
    t_cap: float = T_CAP_DEFAULT,
    h_step: float = H_STEP_DEFAULT,
) -> float:
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) > 1.0 + EPS_GEOM:
        raise OutsideBall(f"|x| = {np.linalg.norm(x)} > 1")
    return float(escape_times(path, x[None, :], t_cap, h_step)[0])


def _mc_moments(path, count, rng, t_cap, h_step):
    x = uniform_ball_samples(path.dim, count, rng)
    T = escape_times(path, x, t_cap, h_step)
    trapped = ~np.isfinite(T)
    T = np.where(trapped, t_cap, T)
    return float(T.sum()), float(np.dot(T, T)), int(trapped.sum())


def _estimate_from_moments(s, s2, n, trapped) -> MeanEscapeEstimate:
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return MeanEscapeEstimate(mean, math.sqrt(var / n), trapped > 0, MONTE_CARLO, samples=n)


def mean_escape_monte_carlo(
    path: UnitSpeedPath,
    samples: int,
    rng: np.random.Generator,
    *,
    n: int | None = None,
    t_cap: float = T_CAP_DEFAULT,
    h_step: float = H_STEP_DEFAULT,
    chunk: int = 1 << 16,
) -> MeanEscapeEstimate:
    """Sample mean of escape times from uniform start points in the unit ball.

    Start points that never escape are counted at ``t_cap`` and flag the
    estimate as truncated.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if n is not None and n != path.dim:
        raise DimensionMismatch(f"path is {path.dim}-dimensional, asked for n={n}")
    s = s2 = 0.0
    trapped = 0
    for m in chunk_counts(samples, chunk):
        a, b, c = _mc_moments(path, m, rng, t_cap, h_step)
        s += a
        s2 += b
        trapped += c
    return _estimate_from_moments(s, s2, samples, trapped)


def mean_escape_monte_carlo_streams(
    path: UnitSpeedPath,
    samples: int,
    seed: int,
    *,
    workers: int | None = None,
    t_cap: float = T_CAP_DEFAULT,
    h_step: float = H_STEP_DEFAULT,
    chunk: int = 1 << 16,
) -> MeanEscapeEstimate:
    """Monte Carlo J with chunk ``k`` drawn from stream ``(seed, k)``.

    Chunks are reduced in index order, so the result does not depend on
    ``workers``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    counts = chunk_counts(samples, chunk)

    def run(k):
        return _mc_moments(path, counts[k], stream(seed, k), t_cap, h_step)

    workers = workers or worker_count(1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, range(len(counts))))
    else:
        parts = [run(k) for k in range(len(counts))]
    s = s2 = 0.0
    trapped = 0
    for a, b, c in parts:
        s += a
        s2 += b
        trapped += c
    return _estimate_from_moments(s, s2, samples, trapped)


def mean_escape_random_direction(n: int, samples: int, rng: np.random.Generator) -> MeanEscapeEstimate:
    """Monte Carlo straight-line escape with a uniformly random direction per sample."""
    s = s2 = 0.0
    for m in chunk_counts(samples, 1 << 16):
        x = uniform_ball_samples(n, m, rng)
        u = uniform_sphere_samples(n, m, rng)
        b = np.einsum("ai,ai->a", x, u)
        c = 1.0 - np.einsum("ai,ai->a", x, x)
        T = np.sqrt(np.maximum(b * b + c, 0.0)) - b
        s += float(T.sum())
        s2 += float(np.dot(T, T))
    return _estimate_from_moments(s, s2, samples, 0)
