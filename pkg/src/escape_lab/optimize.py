"""Derivative-free search for the chain with the smallest expected escape time.

Chains are parametrised by their turn angles, so every candidate is a
unit-speed path and all-zero angles is the straight line.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from escape_lab.escape import EPS_AREA_DEFAULT, H_DEFAULT, T_CAP_DEFAULT, mean_escape_quadrature
from escape_lab.paths import PolyChain

TRUNCATION_PENALTY = 8.0


@dataclass(frozen=True)
class ChainParams:
    angles: tuple[float, ...]
    segment_length: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if not self.segment_length > 0:
            raise ValueError("segment_length must be positive")

    @property
    def k(self) -> int:
        return len(self.angles)

    def to_path(self) -> PolyChain:
        return PolyChain.from_turns(self.angles, self.segment_length)


@dataclass(frozen=True)
class QuadSettings:
    h: float = H_DEFAULT
    t_cap: float = T_CAP_DEFAULT
    eps_area: float = EPS_AREA_DEFAULT
    penalty: float = TRUNCATION_PENALTY


def objective(params: ChainParams, settings: QuadSettings = QuadSettings()) -> float:
    """Quadrature estimate of J for the chain; trapped chains pay ``penalty`` per unit area left."""
    est = mean_escape_quadrature(params.to_path(), settings.h, settings.t_cap, settings.eps_area)
    value = est.value
    if est.truncated:
        value += settings.penalty * float(est.diagnostics[-1, 1])
    return value


@dataclass
class OptimizationTrace:
    iterations: list[tuple[tuple[float, ...], float]] = field(default_factory=list)
    best: ChainParams | None = None
    best_value: float = math.inf
    converged: bool = False

    @property
    def evaluations(self) -> int:
        return len(self.iterations)

    def best_so_far(self) -> list[float]:
        out, cur = [], math.inf
        for _, v in self.iterations:
            cur = min(cur, v)
            out.append(cur)
        return out

    def write_csv(self, fp) -> None:
        k = len(self.iterations[0][0]) if self.iterations else 0
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["iteration", "J"] + [f"angle_{m}" for m in range(k)])
        for i, (x, v) in enumerate(self.iterations):
            w.writerow([i, repr(v)] + [repr(a) for a in x])


class _BudgetExhausted(Exception):
    pass


def minimize(
    k: int,
    segment_length: float = 0.5,
    init: ChainParams | None = None,
    budget: int = 500,
    rng: np.random.Generator | None = None,
    settings: QuadSettings = QuadSettings(),
    step: float = 0.1,
    xtol: float = 1e-4,
    init_range: float = 0.5,
) -> OptimizationTrace:
    """Nelder-Mead over the ``k`` turn angles.

    Coefficients are the textbook ones (reflection 1, expansion 2,
    contraction 0.5, shrink 0.5). Stops when the simplex diameter drops
    below ``xtol`` (``converged``) or after ``budget`` objective calls. The
    starting point is evaluated first and counts against the budget.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if init is None:
        if rng is None:
            raise ValueError("need either init or rng")
        init = ChainParams(tuple(rng.uniform(-init_range, init_range, k)), segment_length)
    if init.k != k:
        raise ValueError(f"init has {init.k} angles, expected {k}")
    seg = init.segment_length
    trace = OptimizationTrace()

    def f(x: np.ndarray) -> float:
        if trace.evaluations >= budget:
            raise _BudgetExhausted
        params = ChainParams(tuple(float(a) for a in x), seg)
        v = objective(params, settings)
        trace.iterations.append((params.angles, v))
        if v < trace.best_value:
            trace.best_value = v
            trace.best = params
        return v

    x0 = np.array(init.angles)
    try:
        f(x0)
        simplex = [x0]
        values = [trace.best_value]
        for i in range(k):
            x = x0.copy()
            x[i] += step
            simplex.append(x)
            values.append(f(x))
        simplex = np.array(simplex)
        values = np.array(values)
        while True:
            order = np.argsort(values, kind="stable")
            simplex, values = simplex[order], values[order]
            diam = max(np.linalg.norm(a - b) for a in simplex for b in simplex)
            if diam < xtol:
                trace.converged = True
                break
            centroid = simplex[:-1].mean(axis=0)
            worst = simplex[-1]
            xr = centroid + (centroid - worst)
            fr = f(xr)
            if values[0] <= fr < values[-2]:
                simplex[-1], values[-1] = xr, fr
                continue
            if fr < values[0]:
                xe = centroid + 2.0 * (xr - centroid)
                fe = f(xe)
                if fe < fr:
                    simplex[-1], values[-1] = xe, fe
                else:
                    simplex[-1], values[-1] = xr, fr
                continue
            if fr < values[-1]:
                xc = centroid + 0.5 * (xr - centroid)
                fc = f(xc)
                accept = fc <= fr
            else:
                xc = centroid + 0.5 * (worst - centroid)
                fc = f(xc)
                accept = fc < values[-1]
            if accept:
                simplex[-1], values[-1] = xc, fc
                continue
            for i in range(1, k + 1):
                simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                values[i] = f(simplex[i])
    except _BudgetExhausted:
        pass
    return trace
