"""Unit-speed paths starting at the origin.

Lines and polygonal chains work in any dimension; a chain keeps going
straight past its last joint. Planar constant-curvature arcs may straighten
out or loop forever. Every path is parametrised by arc length.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from escape_lab.errors import DimensionMismatch, InvalidSpacing, NegativeTime
from escape_lab.geom import DiskConfig, as_vector


def _unit(v) -> tuple[float, ...]:
    a = as_vector(v)
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"direction must be a unit vector (norm {norm})")
    return tuple(float(x) for x in a / norm)


@dataclass(frozen=True)
class Line:
    direction: tuple[float, ...] = (1.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "direction", _unit(self.direction))

    @classmethod
    def axis(cls, n: int) -> "Line":
        """The line along the first coordinate axis of R^n."""
        e = [0.0] * n
        e[0] = 1.0
        return cls(tuple(e))

    @property
    def dim(self) -> int:
        return len(self.direction)

    def eval(self, t: float) -> np.ndarray:
        return t * np.asarray(self.direction)

    def eval_many(self, t) -> np.ndarray:
        return np.asarray(t, dtype=float)[..., None] * np.asarray(self.direction)

    def pieces(self) -> list[tuple[float, np.ndarray, np.ndarray, float]]:
        return [(0.0, np.zeros(self.dim), np.asarray(self.direction), math.inf)]


@dataclass(frozen=True)
class PolyChain:
    """Segments of length ``lengths[j]`` along ``directions[j]``.

    Past the last joint the path continues along the final direction, so
    the last length only marks where the chain's described part ends.
    """

    lengths: tuple[float, ...]
    directions: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        dirs = tuple(_unit(d) for d in self.directions)
        if not lengths or len(lengths) != len(dirs):
            raise ValueError("need one direction per segment and at least one segment")
        if any(not math.isfinite(x) or x <= 0 for x in lengths):
            raise ValueError("segment lengths must be positive and finite")
        if len({len(d) for d in dirs}) != 1:
            raise DimensionMismatch("all segment directions must share one dimension")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "directions", dirs)
        cum = [0.0]
        for x in lengths:
            cum.append(cum[-1] + x)
        starts = [np.zeros(len(dirs[0]))]
        for x, d in zip(lengths, dirs):
            starts.append(starts[-1] + x * np.asarray(d))
        object.__setattr__(self, "_cum", tuple(cum))
        object.__setattr__(self, "_starts", tuple(starts))

    @classmethod
    def from_turns(cls, angles, segment_length: float) -> "PolyChain":
        """Planar chain heading along e1, turning by ``angles[m]`` after each segment."""
        heading = 0.0
        dirs = [(1.0, 0.0)]
        for a in angles:
            heading += float(a)
            dirs.append((math.cos(heading), math.sin(heading)))
        return cls((float(segment_length),) * len(dirs), tuple(dirs))

    @property
    def dim(self) -> int:
        return len(self.directions[0])

    @property
    def joint_times(self) -> tuple[float, ...]:
        return self._cum[1:-1]

    def eval(self, t: float) -> np.ndarray:
        # at a breakpoint the incoming segment's endpoint is used
        j = min(bisect.bisect_left(self._cum, t) - 1, len(self.lengths) - 1)
        j = max(j, 0)
        return self._starts[j] + (t - self._cum[j]) * np.asarray(self.directions[j])

    def eval_many(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        cum = np.asarray(self._cum)
        j = np.clip(np.searchsorted(cum, t, side="left") - 1, 0, len(self.lengths) - 1)
        starts = np.asarray(self._starts)
        dirs = np.asarray(self.directions)
        return starts[j] + (t - cum[j])[..., None] * dirs[j]

    def pieces(self) -> list[tuple[float, np.ndarray, np.ndarray, float]]:
        """``(start_time, start_point, direction, length)`` per straight piece; the last is infinite."""
        out = []
        for j, d in enumerate(self.directions):
            length = self.lengths[j] if j < len(self.directions) - 1 else math.inf
            out.append((self._cum[j], self._starts[j], np.asarray(d), length))
        return out


@dataclass(frozen=True)
class Arc:
    """Planar path of signed curvature ``curvature`` for ``length``, then straight.

    Starts tangent to e1, turning left for positive curvature. ``length`` may
    be ``inf`` for a path that loops forever.
    """

    curvature: float
    length: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "curvature", float(self.curvature))
        object.__setattr__(self, "length", float(self.length))
        if not math.isfinite(self.curvature):
            raise ValueError("curvature must be finite")
        if not self.length >= 0:
            raise ValueError("arc length must be non-negative")

    @property
    def dim(self) -> int:
        return 2

    def _on_arc(self, t):
        k = self.curvature
        if k == 0.0:
            return np.stack([t, np.zeros_like(t)], axis=-1)
        return np.stack([np.sin(k * t) / k, (1.0 - np.cos(k * t)) / k], axis=-1)

    def eval_many(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        a = self.length
        if not math.isfinite(a):
            return self._on_arc(t)
        inner = self._on_arc(np.minimum(t, a))
        k = self.curvature
        tangent = np.array([math.cos(k * a), math.sin(k * a)])
        return inner + np.maximum(t - a, 0.0)[..., None] * tangent

    def eval(self, t: float) -> np.ndarray:
        return self.eval_many(np.array(t))

    def tail(self) -> tuple[np.ndarray, np.ndarray]:
        """Start point and direction of the straight continuation."""
        a = self.length
        k = self.curvature
        return self._on_arc(np.array(a)), np.array([math.cos(k * a), math.sin(k * a)])


UnitSpeedPath = Union[Line, PolyChain, Arc]


def path_eval(path: UnitSpeedPath, t: float) -> np.ndarray:
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    return path.eval(float(t))


def check_partition(times) -> np.ndarray:
    p = np.asarray(times, dtype=float).reshape(-1)
    if p.size == 0 or p[0] != 0.0:
        raise InvalidSpacing("a partition starts at 0")
    if np.any(np.diff(p) <= 0):
        raise InvalidSpacing("partition times must be strictly increasing")
    return p


def uniform_partition(t: float, h: float) -> np.ndarray:
    """Times 0, h, 2h, ... ending exactly at ``t`` (the last step may be shorter)."""
    if not (h > 0 and t > 0 and h <= t):
        raise InvalidSpacing(f"need 0 < h <= t, got h={h}, t={t}")
    k = math.floor(t / h + 1e-9)
    times = [i * h for i in range(k + 1)]
    if t - times[-1] > 1e-12 * max(1.0, t):
        times.append(t)
    else:
        times[-1] = t
    return np.array(times)


def centers_for_partition(path: UnitSpeedPath, partition) -> DiskConfig:
    """Unit balls centered at ``-path(t_i)`` for each partition time."""
    times = check_partition(partition)
    centers = np.array([-path_eval(path, t) for t in times])
    return DiskConfig.unit(centers)


def path_from_spec(spec: dict) -> UnitSpeedPath:
    """Build a path from its JSON form; raises ``ValueError`` on malformed input."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError("path spec must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "line":
            if "direction" in spec:
                return Line(tuple(spec["direction"]))
            return Line.axis(int(spec.get("dim", 2)))
        if kind == "polychain":
            if "angles" in spec:
                return PolyChain.from_turns(spec["angles"], float(spec["segment_length"]))
            return PolyChain(tuple(spec["lengths"]), tuple(tuple(d) for d in spec["directions"]))
        if kind == "arc":
            length = spec.get("length")
            return Arc(float(spec["curvature"]), math.inf if length is None else float(length))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed {kind} spec: {exc!r}") from exc
    raise ValueError(f"unknown path type {kind!r}")


def path_to_spec(path: UnitSpeedPath) -> dict:
    if isinstance(path, Line):
        return {"type": "line", "direction": list(path.direction)}
    if isinstance(path, PolyChain):
        return {"type": "polychain", "lengths": list(path.lengths), "directions": [list(d) for d in path.directions]}
    if isinstance(path, Arc):
        return {"type": "arc", "curvature": path.curvature, "length": None if math.isinf(path.length) else path.length}
    raise TypeError(f"not a path: {path!r}")


def load_path(fp) -> UnitSpeedPath:
    try:
        spec = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from exc
    return path_from_spec(spec)
