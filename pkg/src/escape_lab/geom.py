"""Planar disk intersections and unions, plus n-ball sampling and measures.

Intersections of disks are convex arc polygons. Their boundary is found
circle by circle: the part of circle ``i`` inside disk ``j`` is a single
angular interval, and the boundary arcs on circle ``i`` are whatever
survives intersecting those intervals. The area is the polygon spanned by
the arc endpoints plus one circular segment per arc, which reduces to a sum
of independent per-arc terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from escape_lab.errors import DimensionMismatch

EPS_GEOM = 1e-9
N_INCL = 12
TWO_PI = 2.0 * math.pi

# Angular tolerances for arc bookkeeping (radians).
_MEMBER_TOL = 1e-10
_DEDUP_TOL = 1e-9
_MIN_ARC = 1e-10


def as_vector(coords, dim: int | None = None) -> np.ndarray:
    """Validate and convert coordinates to a 1-D float array."""
    v = np.asarray(coords, dtype=float).reshape(-1)
    if v.size == 0:
        raise DimensionMismatch("a vector needs at least one coordinate")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("coordinates must be finite")
    return v


@dataclass(frozen=True, eq=False)
class DiskConfig:
    """Closed balls with centers ``centers[i]`` and radii ``radii[i]``."""

    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.asarray(self.radii, dtype=float).reshape(-1)
        if c.shape[0] == 0:
            raise ValueError("DiskConfig must be non-empty")
        if c.shape[0] != r.size:
            raise ValueError("centers and radii differ in length")
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(r)):
            raise ValueError("centers and radii must be finite")
        if np.any(r <= 0):
            raise ValueError("radii must be positive")
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    @classmethod
    def unit(cls, centers) -> "DiskConfig":
        c = np.atleast_2d(np.asarray(centers, dtype=float))
        return cls(c, np.ones(c.shape[0]))

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def __len__(self) -> int:
        return self.radii.size

    def subset(self, indices: Sequence[int]) -> "DiskConfig":
        idx = list(indices)
        return DiskConfig(self.centers[idx], self.radii[idx])


class Measure(NamedTuple):
    """An area/volume with its standard error (0 when computed exactly)."""

    value: float
    stderr: float = 0.0
    exact: bool = True


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise boundary arc of circle ``disk`` from ``start`` spanning ``width``."""

    disk: int
    center: tuple[float, float]
    radius: float
    start: float
    width: float

    def point(self, angle: float) -> np.ndarray:
        cx, cy = self.center
        return np.array([cx + self.radius * math.cos(angle), cy + self.radius * math.sin(angle)])

    @property
    def start_point(self) -> np.ndarray:
        return self.point(self.start)

    @property
    def end_point(self) -> np.ndarray:
        return self.point(self.start + self.width)

    def chord_term(self) -> float:
        return _chord_term(self.center[0], self.center[1], self.radius, self.start, self.width)

    def segment_area(self) -> float:
        return 0.5 * self.radius**2 * (self.width - math.sin(self.width))


def _chord_term(cx: float, cy: float, r: float, start: float, width: float) -> float:
    # half the cross product of the chord endpoints (shoelace contribution)
    x0 = cx + r * math.cos(start)
    y0 = cy + r * math.sin(start)
    x1 = cx + r * math.cos(start + width)
    y1 = cy + r * math.sin(start + width)
    return 0.5 * (x0 * y1 - x1 * y0)


def _arc_area_term(cx: float, cy: float, r: float, start: float, width: float) -> float:
    return _chord_term(cx, cy, r, start, width) + 0.5 * r * r * (width - math.sin(width))


@dataclass(frozen=True)
class ArcRegion:
    """Convex arc polygon bounding an intersection of disks.

    ``vertices[k]`` is where ``arcs[k]`` starts; arcs run counter-clockwise
    and are stored in boundary order. A whole disk has one full-circle arc
    and no vertices.
    """

    vertices: np.ndarray
    arcs: tuple[Arc, ...]
    empty: bool = False
    degenerate: bool = False

    @property
    def disks(self) -> list[int]:
        return [a.disk for a in self.arcs]

    @property
    def polygon_area(self) -> float:
        return sum(a.chord_term() for a in self.arcs)

    @property
    def segments_area(self) -> float:
        return sum(a.segment_area() for a in self.arcs)

    @property
    def area(self) -> float:
        if self.empty or self.degenerate:
            return 0.0
        return max(0.0, self.polygon_area + self.segments_area)


EMPTY_REGION = ArcRegion(np.zeros((0, 2)), (), empty=True)


def _region_from_arcs(arcs: list[Arc]) -> ArcRegion:
    if not arcs:
        return EMPTY_REGION
    if len(arcs) == 1 and arcs[0].width >= TWO_PI - _MIN_ARC:
        return ArcRegion(np.zeros((0, 2)), (arcs[0],))
    starts = np.array([a.start_point for a in arcs])
    ref = starts.mean(axis=0)
    order = np.argsort(np.arctan2(starts[:, 1] - ref[1], starts[:, 0] - ref[0]), kind="stable")
    return ArcRegion(starts[order], tuple(arcs[k] for k in order))


def _full_disk_region(disk: int, center, radius: float) -> ArcRegion:
    arc = Arc(disk, (float(center[0]), float(center[1])), float(radius), 0.0, TWO_PI)
    return ArcRegion(np.zeros((0, 2)), (arc,))


def lens_area(d: float, r1: float = 1.0, r2: float = 1.0) -> float:
    """Area of the intersection of two disks with center distance ``d``."""
    d = abs(float(d))
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    if r1 == r2:
        h = d / (2.0 * r1)
        return 2.0 * r1 * r1 * math.acos(h) - d * math.sqrt(r1 * r1 - d * d / 4.0)
    a1 = math.acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1))
    a2 = math.acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2))
    k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * math.sqrt(max(k, 0.0))


def _check_2d(config: DiskConfig):
    if config.dim != 2:
        raise DimensionMismatch(f"planar routine called with {config.dim}-dimensional centers")


def intersection_area_2d(config: DiskConfig, eps: float = EPS_GEOM) -> tuple[float, ArcRegion]:
    """Exact area of the intersection of all disks in ``config``, with its boundary."""
    _check_2d(config)
    c = config.centers
    r = config.radii
    n = r.size

    diff = c[None, :, :] - c[:, None, :]  # diff[i, j] = c_j - c_i
    d = np.hypot(diff[..., 0], diff[..., 1])

    # superset elimination; among coincident disks keep the lowest index
    contains = d + r[:, None] <= r[None, :] + eps  # disk i inside disk j
    np.fill_diagonal(contains, False)
    mutual = contains & contains.T
    lower = np.arange(n)[None, :] < np.arange(n)[:, None]  # j < i
    drop = np.any(contains & ~(mutual & lower), axis=0)
    idx = np.flatnonzero(~drop)
    if idx.size == 1:
        i = int(idx[0])
        return math.pi * float(r[i]) ** 2, _full_disk_region(i, c[i], r[i])

    c, r, d, diff = c[idx], r[idx], d[np.ix_(idx, idx)], diff[np.ix_(idx, idx)]
    m = idx.size
    off = ~np.eye(m, dtype=bool)
    gap = d - (r[:, None] + r[None, :])
    if np.any(gap[off] >= -eps):
        degenerate = not np.any(gap[off] > eps)
        return 0.0, ArcRegion(np.zeros((0, 2)), (), empty=not degenerate, degenerate=degenerate)

    # every remaining pair crosses properly
    with np.errstate(invalid="ignore", divide="ignore"):
        cosa = (d * d + r[:, None] ** 2 - r[None, :] ** 2) / (2.0 * d * r[:, None])
    alpha = np.arccos(np.clip(cosa, -1.0, 1.0))
    phi = np.arctan2(diff[..., 1], diff[..., 0])
    start = np.mod(phi - alpha, TWO_PI)
    width = 2.0 * alpha

    arcs: list[Arc] = []
    for i in range(m):
        others = np.flatnonzero(off[i])
        S = start[i, others]
        W = width[i, others]
        rel = np.mod(S[:, None] - S[None, :], TWO_PI)
        rel = np.where(rel > TWO_PI - _MEMBER_TOL, rel - TWO_PI, rel)
        member = np.all(rel <= W[None, :] + _MEMBER_TOL, axis=1)
        remaining = np.min(W[None, :] - rel, axis=1)
        cand = np.flatnonzero(member & (remaining > _MIN_ARC))
        kept: list[tuple[float, float]] = []
        for j in cand[np.argsort(S[cand], kind="stable")]:
            s = float(S[j])
            if any(_ang_dist(s, s0) < _DEDUP_TOL for s0, _ in kept):
                continue
            kept.append((s, float(min(remaining[j], TWO_PI))))
        for s, w in kept:
            arcs.append(Arc(int(idx[i]), (float(c[i, 0]), float(c[i, 1])), float(r[i]), s, w))

    region = _region_from_arcs(arcs)
    return region.area, region


def _ang_dist(a: float, b: float) -> float:
    x = (a - b) % TWO_PI
    return min(x, TWO_PI - x)


# interval kinds for "circle i inside disk j"
_FULL, _PARTIAL, _INNER, _TOUCH, _APART = range(5)


def _circle_in_disk(cx, cy, r, dx, dy, rd, eps):
    """Angular interval of circle (cx, cy, r) lying inside disk (dx, dy, rd).

    ``_INNER`` means disk j sits inside circle i (circle i contributes
    nothing); ``_TOUCH``/``_APART`` mean the two disks meet in at most one point.
    """
    vx = dx - cx
    vy = dy - cy
    d = math.hypot(vx, vy)
    if d + r <= rd + eps:
        return _FULL, 0.0, TWO_PI
    if d >= r + rd - eps:
        return (_TOUCH if d <= r + rd + eps else _APART), 0.0, 0.0
    if d + rd <= r + eps:
        return _INNER, 0.0, 0.0
    cosa = (d * d + r * r - rd * rd) / (2.0 * d * r)
    a = math.acos(min(1.0, max(-1.0, cosa)))
    return _PARTIAL, (math.atan2(vy, vx) - a) % TWO_PI, 2.0 * a


def _intersect_interval(s1, w1, s2, w2) -> list[tuple[float, float]]:
    if w1 >= TWO_PI:
        return [(s2, w2)]
    if w2 >= TWO_PI:
        return [(s1, w1)]
    out = []
    for k in (-TWO_PI, 0.0, TWO_PI):
        lo = max(s1, s2 + k)
        hi = min(s1 + w1, s2 + w2 + k)
        if hi - lo > _MIN_ARC:
            out.append((lo % TWO_PI, hi - lo))
    return out


class RegionClipper:
    """Running intersection of disks, clipped one disk at a time.

    The old boundary arcs are cut back to the part inside the new disk, and
    every gap left between consecutive surviving pieces is bridged by an
    arc of the new circle. If the result ever grows in area or carries a
    malformed arc, the region is rebuilt from the full disk history with
    :func:`intersection_area_2d`.

    Arcs are rows ``[disk, cx, cy, r, start, width]`` in counter-clockwise
    order. Small boundaries are clipped in plain Python, large ones (a path
    that keeps circling adds an arc per step) with numpy.
    """

    vector_threshold = 24

    def __init__(self, center, radius: float = 1.0, eps: float = EPS_GEOM):
        cx, cy = (float(v) for v in as_vector(center, 2))
        self.eps = eps
        self.history: list[tuple[float, float, float]] = [(cx, cy, float(radius))]
        # list of rows while small, an (n, 6) array once past vector_threshold
        self._arcs: list | np.ndarray = [[0.0, cx, cy, float(radius), 0.0, TWO_PI]]
        self.empty = False
        self.degenerate = False
        self.fallbacks = 0
        self._area: float | None = math.pi * float(radius) ** 2

    @property
    def n_arcs(self) -> int:
        return len(self._arcs)

    @property
    def area(self) -> float:
        if self.empty or self.degenerate:
            return 0.0
        if self._area is None:
            if isinstance(self._arcs, list):
                total = sum(_arc_area_term(*a[1:]) for a in self._arcs)
            else:
                total = float(np.sum(_arc_area_terms(self._arcs)))
            self._area = max(0.0, total)
        return self._area

    def clip(self, center, radius: float = 1.0) -> float:
        cx, cy = float(center[0]), float(center[1])
        r = float(radius)
        disk = len(self.history)
        self.history.append((cx, cy, r))
        if self.empty or self.degenerate:
            return 0.0
        large = self.n_arcs > self.vector_threshold
        if large:
            status, pieces = self._clip_vector(cx, cy, r)
        else:
            status, pieces = self._clip_python(cx, cy, r)
        if status == "same":
            return self.area
        before = self.area
        self._area = None
        if status in ("touch", "apart"):
            self._arcs = []
            self.degenerate = status == "touch"
            self.empty = status == "apart"
            return 0.0
        if len(pieces) == 0:
            if not self._contains_point(cx + r, cy):
                self._arcs = []
                self.empty = True
                return 0.0
            self._arcs = [[float(disk), cx, cy, r, 0.0, TWO_PI]]
        elif large:
            self._arcs = _bridge(pieces, disk, cx, cy, r)
            if len(self._arcs) <= self.vector_threshold:
                self._arcs = self._arcs.tolist()
        else:
            self._arcs = _bridge_rows(pieces, disk, cx, cy, r)
        if self.area > before + 1e-12 or not self._widths_ok():
            self._rebuild()
        return self.area

    def _widths_ok(self) -> bool:
        if isinstance(self._arcs, list):
            return all(0.0 < a[5] <= TWO_PI for a in self._arcs)
        w = self._arcs[:, 5]
        return bool(np.all((w > 0.0) & (w <= TWO_PI)))

    def _clip_python(self, cx, cy, r):
        eps = self.eps
        pieces: list[list] = []
        changed = False
        for arc in self._arcs:
            if math.hypot(arc[1] - cx, arc[2] - cy) <= eps and abs(arc[3] - r) <= eps:
                # same disk as one already on the boundary
                return "same", None
            kind, s, w = _circle_in_disk(arc[1], arc[2], arc[3], cx, cy, r, eps)
            if kind == _FULL:
                pieces.append(arc)
                continue
            if kind == _TOUCH:
                return "touch", None
            if kind == _APART:
                return "apart", None
            changed = True
            if kind == _PARTIAL:
                for s2, w2 in _intersect_interval(arc[4], arc[5], s, w):
                    pieces.append([arc[0], arc[1], arc[2], arc[3], s2, w2])
        if not changed:
            return "same", None
        return "clipped", pieces

    def _clip_vector(self, cx, cy, r):
        eps = self.eps
        A = np.asarray(self._arcs)
        vx = cx - A[:, 1]
        vy = cy - A[:, 2]
        ri = A[:, 3]
        d = np.hypot(vx, vy)
        if np.any((d <= eps) & (np.abs(ri - r) <= eps)):
            return "same", None
        full = d + ri <= r + eps
        if full.all():
            return "same", None
        far = d >= ri + r - eps
        if far.any():
            return ("apart" if np.any(d[far] > ri[far] + r + eps) else "touch"), None
        partial = ~full & (d + r > ri + eps)
        P = A[partial]
        dp = d[partial]
        rp = P[:, 3]
        cosa = np.clip((dp * dp + rp * rp - r * r) / (2.0 * dp * rp), -1.0, 1.0)
        a = np.arccos(cosa)
        s2 = np.mod(np.arctan2(vy[partial], vx[partial]) - a, TWO_PI)
        w2 = 2.0 * a
        s1, w1 = P[:, 4], P[:, 5]
        whole = w1 >= TWO_PI
        out = [A[full]]
        for k in (-TWO_PI, 0.0, TWO_PI):
            lo = np.maximum(s1, s2 + k)
            hi = np.minimum(s1 + w1, s2 + w2 + k)
            if k == 0.0:
                lo = np.where(whole, s2, lo)
                hi = np.where(whole, s2 + w2, hi)
            keep = (hi - lo > _MIN_ARC) & (~whole if k != 0.0 else True)
            if np.any(keep):
                rows = P[keep].copy()
                rows[:, 4] = np.mod(lo[keep], TWO_PI)
                rows[:, 5] = hi[keep] - lo[keep]
                out.append(rows)
        return "clipped", np.concatenate(out)

    def _contains_point(self, x: float, y: float) -> bool:
        A = np.asarray(self._arcs).reshape(-1, 6)
        return bool(np.all(np.hypot(x - A[:, 1], y - A[:, 2]) <= A[:, 3] + self.eps))

    def _rebuild(self):
        self.fallbacks += 1
        h = np.array(self.history)
        _, region = intersection_area_2d(DiskConfig(h[:, :2], h[:, 2]), self.eps)
        self._area = None
        self.empty = region.empty
        self.degenerate = region.degenerate
        self._arcs = [[float(a.disk), a.center[0], a.center[1], a.radius, a.start, a.width] for a in region.arcs]
        if len(self._arcs) > self.vector_threshold:
            self._arcs = np.array(self._arcs)

    def region(self) -> ArcRegion:
        if self.empty or self.degenerate:
            return ArcRegion(np.zeros((0, 2)), (), empty=self.empty, degenerate=self.degenerate)
        rows = self._arcs if isinstance(self._arcs, list) else self._arcs.tolist()
        arcs = [Arc(int(a[0]), (a[1], a[2]), a[3], a[4], a[5]) for a in rows]
        return _region_from_arcs(arcs)


def _arc_area_terms(A: np.ndarray) -> np.ndarray:
    cx, cy, r, s, w = A[:, 1], A[:, 2], A[:, 3], A[:, 4], A[:, 5]
    x0 = cx + r * np.cos(s)
    y0 = cy + r * np.sin(s)
    x1 = cx + r * np.cos(s + w)
    y1 = cy + r * np.sin(s + w)
    return 0.5 * (x0 * y1 - x1 * y0) + 0.5 * r * r * (w - np.sin(w))


def _bridge_rows(pieces: list[list], disk: int, cx: float, cy: float, r: float, tol: float = 1e-9) -> list[list]:
    """Plain-Python twin of :func:`_bridge` for short boundaries."""
    ends = []
    for p in pieces:
        pcx, pcy, pr, s, w = p[1], p[2], p[3], p[4], p[5]
        ends.append(
            (pcx + pr * math.cos(s), pcy + pr * math.sin(s), pcx + pr * math.cos(s + w), pcy + pr * math.sin(s + w))
        )
    m = len(pieces)
    mx = sum(e[0] + e[2] for e in ends) / (2 * m)
    my = sum(e[1] + e[3] for e in ends) / (2 * m)
    order = sorted(range(m), key=lambda i: math.atan2(ends[i][1] - my, ends[i][0] - mx))
    out = []
    for k, i in enumerate(order):
        out.append(pieces[i])
        ex, ey = ends[i][2], ends[i][3]
        j = order[(k + 1) % m]
        nx, ny = ends[j][0], ends[j][1]
        if math.hypot(ex - nx, ey - ny) > tol:
            a0 = math.atan2(ey - cy, ex - cx) % TWO_PI
            gw = (math.atan2(ny - cy, nx - cx) - a0) % TWO_PI
            if gw > _MIN_ARC:
                out.append([float(disk), cx, cy, r, a0, gw])
    return out


def _bridge(pieces: np.ndarray, disk: int, cx: float, cy: float, r: float, tol: float = 1e-9) -> np.ndarray:
    """Order clipped pieces counter-clockwise and close each gap with an arc of the new circle."""
    pcx, pcy, pr, s, w = pieces[:, 1], pieces[:, 2], pieces[:, 3], pieces[:, 4], pieces[:, 5]
    sx = pcx + pr * np.cos(s)
    sy = pcy + pr * np.sin(s)
    ex = pcx + pr * np.cos(s + w)
    ey = pcy + pr * np.sin(s + w)
    mx = 0.5 * (sx.mean() + ex.mean())
    my = 0.5 * (sy.mean() + ey.mean())
    order = np.argsort(np.arctan2(sy - my, sx - mx), kind="stable")
    pieces, sx, sy, ex, ey = pieces[order], sx[order], sy[order], ex[order], ey[order]
    nsx = np.roll(sx, -1)
    nsy = np.roll(sy, -1)
    gap = np.hypot(ex - nsx, ey - nsy) > tol
    if not np.any(gap):
        return pieces
    a0 = np.mod(np.arctan2(ey - cy, ex - cx), TWO_PI)
    a1 = np.arctan2(nsy - cy, nsx - cx)
    gw = np.mod(a1 - a0, TWO_PI)
    gap &= gw > _MIN_ARC
    k = np.flatnonzero(gap)
    bridges = np.empty((k.size, 6))
    bridges[:, 0] = disk
    bridges[:, 1] = cx
    bridges[:, 2] = cy
    bridges[:, 3] = r
    bridges[:, 4] = a0[k]
    bridges[:, 5] = gw[k]
    # piece i sorts at 2i, a bridge after piece i at 2i + 1
    keys = np.concatenate([2 * np.arange(pieces.shape[0]), 2 * k + 1])
    merged = np.concatenate([pieces, bridges])
    return merged[np.argsort(keys, kind="stable")]


def union_area_2d(
    config: DiskConfig,
    max_exact: int = N_INCL,
    rng: np.random.Generator | None = None,
    samples: int = 1_000_000,
) -> Measure:
    """Area of the union of the disks.

    Exact inclusion-exclusion for up to ``max_exact`` disks (subsets whose
    intersection is already empty are pruned with all their supersets);
    Monte Carlo over the bounding box beyond that, which needs ``rng``.
    """
    _check_2d(config)
    n = len(config)
    if n > max_exact:
        if rng is None:
            raise ValueError(f"{n} disks exceed the exact limit {max_exact}; pass rng for Monte Carlo")
        return union_volume_mc(config, samples, rng)

    total = 0.0

    def walk(first: int, members: list[int], sign: float):
        nonlocal total
        for j in range(first, n):
            sub = members + [j]
            a, _ = intersection_area_2d(config.subset(sub))
            if a <= 0.0:
                continue
            total += sign * float(a)
            walk(j + 1, sub, -sign)

    walk(0, [], 1.0)
    return Measure(total)


def _hit_fraction(inside_counts: int, samples: int, box_volume: float) -> Measure:
    p = inside_counts / samples
    se = box_volume * math.sqrt(max(p * (1.0 - p), 0.0) / samples) if samples > 1 else float("inf")
    return Measure(box_volume * p, se, exact=False)


def _mc_chunks(samples: int, chunk: int = 1 << 18):
    full, rest = divmod(samples, chunk)
    return [chunk] * full + ([rest] if rest else [])


def intersection_volume_mc(config: DiskConfig, samples: int, rng: np.random.Generator) -> Measure:
    """Monte Carlo volume of the intersection, sampling inside the smallest ball."""
    k = int(np.argmin(config.radii))
    c0, r0 = config.centers[k], config.radii[k]
    n = config.dim
    hits = 0
    for m in _mc_chunks(samples):
        x = c0 + r0 * uniform_ball_samples(n, m, rng)
        d2 = np.sum((x[:, None, :] - config.centers[None, :, :]) ** 2, axis=2)
        hits += int(np.count_nonzero(np.all(d2 <= config.radii**2, axis=1)))
    return _hit_fraction(hits, samples, ball_volume(n) * r0**n)


def union_volume_mc(config: DiskConfig, samples: int, rng: np.random.Generator) -> Measure:
    """Monte Carlo volume of the union over the axis-aligned bounding box."""
    lo = np.min(config.centers - config.radii[:, None], axis=0)
    hi = np.max(config.centers + config.radii[:, None], axis=0)
    hits = 0
    for m in _mc_chunks(samples):
        x = lo + (hi - lo) * rng.random((m, config.dim))
        d2 = np.sum((x[:, None, :] - config.centers[None, :, :]) ** 2, axis=2)
        hits += int(np.count_nonzero(np.any(d2 <= config.radii**2, axis=1)))
    return _hit_fraction(hits, samples, float(np.prod(hi - lo)))


def uniform_sphere_samples(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` unit vectors uniform on the sphere in R^n (normalized Gaussians)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1)
    # a zero Gaussian vector has probability zero; redraw to be safe
    bad = norms == 0.0
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(g, axis=1)
        bad = norms == 0.0
    return g / norms[:, None]


def uniform_ball_samples(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` points uniform in the closed unit n-ball."""
    u = uniform_sphere_samples(n, count, rng)
    return u * rng.random(count)[:, None] ** (1.0 / n)


def uniform_sphere_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    return uniform_sphere_samples(n, 1, rng)[0]


def uniform_ball_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    return uniform_ball_samples(n, 1, rng)[0]


def ball_volume(n: int) -> float:
    """Volume of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def sphere_surface(m: int) -> float:
    """Surface measure of the unit m-sphere in R^(m+1)."""
    if m < 0:
        raise ValueError("sphere dimension must be >= 0")
    k = 0.5 * (m + 1)
    return 2.0 * math.exp(k * math.log(math.pi) - math.lgamma(k))
