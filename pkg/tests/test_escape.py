import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from escape_lab.closedform import expected_linear_escape
from escape_lab.errors import DimensionMismatch, InvalidSpacing, OutsideBall
from escape_lab.escape import (
    escape_times,
    line_escape_time,
    line_nonescape_area,
    mean_escape_line_quadrature,
    mean_escape_monte_carlo,
    mean_escape_monte_carlo_streams,
    mean_escape_quadrature,
    mean_escape_random_direction,
    non_escape_area,
    path_escape_time,
)
from escape_lab.geom import lens_area
from escape_lab.paths import Arc, Line, PolyChain, uniform_partition
from escape_lab.rng import stream

from conftest import random_chain

J_LINE = 8 / (3 * math.pi)
LENS_1 = 2 * math.pi / 3 - math.sqrt(3) / 2
RIGHT_ANGLE = PolyChain((1.0, 1.0), ((1.0, 0.0), (0.0, 1.0)))


def simpson(f, a, b, m=2000):
    x = np.linspace(a, b, 2 * m + 1)
    y = np.array([f(v) for v in x])
    return (b - a) / (6 * m) * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


class TestNonEscapeArea:
    def test_line_tangent(self):
        assert non_escape_area(Line(), 2, [0, 2]).area == 0.0

    def test_line_unit(self):
        r = non_escape_area(Line(), 1, [0, 1])
        assert r.exact and r.area == pytest.approx(LENS_1, abs=1e-12)

    @pytest.mark.parametrize("path", [Line(), RIGHT_ANGLE, Arc(2.0)])
    def test_single_point(self, path):
        r = non_escape_area(path, 0.0, [0])
        assert r.area == pytest.approx(math.pi, abs=1e-14)

    def test_partition_must_end_at_t(self):
        with pytest.raises(InvalidSpacing):
            non_escape_area(Line(), 1.0, [0, 0.5])

    def test_three_dimensional(self):
        r = non_escape_area(Line.axis(3), 1, [0, 1], rng=stream(1), samples=10**6)
        oracle = 5 * math.pi / 12
        assert not r.exact and abs(r.area - oracle) < 4 * r.stderr
        with pytest.raises(ValueError):
            non_escape_area(Line.axis(3), 1, [0, 1])

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), max_size=6), st.floats(0.1, 3), st.integers(2, 5))
    def test_refinement_never_grows(self, a, t, m):
        path = PolyChain.from_turns(a, 0.5)
        coarse = uniform_partition(t, t / m)
        fine = np.unique(np.concatenate([coarse, uniform_partition(t, t / (2 * m + 1))]))
        assert non_escape_area(path, t, fine).area <= non_escape_area(path, t, coarse).area + 1e-9

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), max_size=6), st.floats(0.05, 3))
    def test_dominates_line(self, a, t):
        path = PolyChain.from_turns(a, 0.5)
        P = uniform_partition(t, min(0.05, t))
        assert non_escape_area(path, t, P).area >= line_nonescape_area(t) - 1e-9


class TestLineArea:
    def test_values(self):
        assert line_nonescape_area(0) == pytest.approx(math.pi)
        assert line_nonescape_area(2) == 0.0
        assert line_nonescape_area(2.5) == 0.0
        assert line_nonescape_area(1) == pytest.approx(LENS_1, abs=1e-14)

    def test_intermediate_disks_do_not_cut(self):
        for t in (0.3, 1.0, 1.7):
            assert non_escape_area(Line(), t, uniform_partition(t, 0.01)).area == pytest.approx(
                line_nonescape_area(t), abs=1e-10
            )


class TestQuadrature:
    def test_line(self):
        est = mean_escape_quadrature(Line(), 0.001, 3)
        assert not est.truncated and est.method == "quadrature"
        assert abs(est.value - J_LINE) < 5e-3
        assert est.value >= J_LINE

    def test_flat_arc_is_line(self):
        a = mean_escape_quadrature(Arc(0.0), 0.005, 3).value
        b = mean_escape_quadrature(Line(), 0.005, 3).value
        assert a == pytest.approx(b, abs=1e-9)

    def test_small_circle_is_trapped(self):
        est = mean_escape_quadrature(Arc(4.0), 0.01, 2.0)
        assert est.truncated
        assert est.diagnostics[-1, 1] > 1.0

    def test_area_table_nonincreasing(self):
        for path in (Line(), RIGHT_ANGLE, Arc(1.5, 2.0), PolyChain.from_turns([2.5, -2.5, 2.0], 0.5)):
            a = mean_escape_quadrature(path, 0.01, 8).diagnostics[:, 1]
            assert np.all(np.diff(a) <= 1e-12)

    def test_against_line_integral(self):
        q = mean_escape_quadrature(Line(), 0.002, 3)
        exact = mean_escape_line_quadrature(1e-8)
        assert abs(q.value - exact.value) <= q.error_bound + 1e-8

    def test_csv(self):
        buf = io.StringIO()
        mean_escape_quadrature(Line(), 0.1, 3).write_csv(buf)
        rows = list(csv.reader(io.StringIO(buf.getvalue())))
        assert rows[0] == ["t", "area", "cumulative_J"]
        assert float(rows[1][1]) == pytest.approx(math.pi)
        assert len(rows) == 22

    def test_rejects(self):
        with pytest.raises(DimensionMismatch):
            mean_escape_quadrature(Line.axis(3))
        with pytest.raises(InvalidSpacing):
            mean_escape_quadrature(Line(), 0.5, 0.1)

    def test_above_line_for_chains(self):
        g = np.random.default_rng(5)
        for _ in range(10):
            assert mean_escape_quadrature(random_chain(g), 0.01).value >= J_LINE - 1e-6


class TestLineIntegral:
    def test_value(self):
        est = mean_escape_line_quadrature(1e-8)
        assert abs(est.value - J_LINE) < 1e-8
        assert est.method == "quadrature" and est.error_bound <= 1e-8

    def test_arccos_term(self):
        F = lambda u: u * math.acos(u) - math.sqrt(1 - u * u)  # noqa: E731
        analytic = 2 * 2 * (F(1) - F(0))  # t = 2u
        assert analytic == pytest.approx(4.0)
        assert simpson(lambda t: 2 * math.acos(t / 2), 0, 2) == pytest.approx(analytic, abs=1e-5)
        assert analytic / math.pi == pytest.approx(4 / math.pi)

    def test_root_term(self):
        G = lambda t: -((4 - t * t) ** 1.5) / 6  # noqa: E731
        analytic = G(2) - G(0)
        assert analytic == pytest.approx(4 / 3)
        assert simpson(lambda t: t / 2 * math.sqrt(4 - t * t), 0, 2) == pytest.approx(analytic, abs=1e-5)

    def test_terms_assemble_the_lens(self):
        for t in np.linspace(0, 2, 21):
            assert lens_area(t) == pytest.approx(2 * math.acos(t / 2) - t / 2 * math.sqrt(4 - t * t), abs=1e-14)
        assert 4 / math.pi - 4 / (3 * math.pi) == pytest.approx(J_LINE, rel=1e-15)


class TestEscapeTimes:
    def test_line_examples(self):
        assert line_escape_time([0, 0], [1, 0]) == pytest.approx(1)
        assert line_escape_time([-0.6, 0], [1, 0]) == pytest.approx(1.6)
        assert line_escape_time([0, 0.6], [1, 0]) == pytest.approx(0.8)
        assert line_escape_time([0, 0, 0], [0, 0, 1]) == pytest.approx(1)

    def test_outside(self):
        with pytest.raises(OutsideBall):
            line_escape_time([1.1, 0], [1, 0])
        with pytest.raises(OutsideBall):
            path_escape_time(Line(), [0, 1.01])

    def test_path_examples(self):
        assert path_escape_time(Line(), [0, 0]) == pytest.approx(1)
        assert path_escape_time(Line(), [0.3, 0]) == pytest.approx(0.7)
        assert path_escape_time(RIGHT_ANGLE, [0, -0.9]) == pytest.approx(math.sqrt(0.19), abs=1e-12)

    def test_second_segment_exit(self):
        # from (-0.9, -0.3): first segment ends at (0.1, -0.3), then up to y = sqrt(0.99)
        t = path_escape_time(RIGHT_ANGLE, [-0.9, -0.3])
        assert t == pytest.approx(1 + 0.3 + math.sqrt(0.99), abs=1e-12)

    def test_line_agreement(self):
        g = np.random.default_rng(11)
        for _ in range(10_000):
            n = int(g.integers(1, 6))
            u = g.normal(size=n)
            u /= np.linalg.norm(u)
            x = g.normal(size=n)
            x *= g.uniform() ** (1 / n) / np.linalg.norm(x)
            assert path_escape_time(Line(tuple(u)), x) == pytest.approx(line_escape_time(x, u), abs=1e-12)

    def test_arc_against_dense_scan(self):
        path = Arc(2.0, 1.0)
        g = np.random.default_rng(3)
        X = g.uniform(-0.6, 0.6, (50, 2))
        T = escape_times(path, X)
        t = np.linspace(0, 4, 400_001)
        pts = path.eval_many(t)
        for x, got in zip(X, T):
            out = np.linalg.norm(pts + x, axis=1) >= 1
            assert got == pytest.approx(t[np.argmax(out)], abs=2e-5)

    def test_trapped_is_infinite(self):
        assert math.isinf(path_escape_time(Arc(4.0), [0, 0], t_cap=3))


class TestMonteCarlo:
    @pytest.mark.parametrize("n,samples", [(1, 10**4), (2, 10**6), (3, 10**6)])
    def test_line(self, n, samples):
        est = mean_escape_monte_carlo(Line.axis(n), samples, stream(21, n), n=n)
        assert est.method == "monte_carlo" and not est.truncated
        assert abs(est.value - expected_linear_escape(n)) < 4 * est.error_bound

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            mean_escape_monte_carlo(Line(), 10, stream(1), n=3)

    def test_random_direction_agrees(self):
        for n in (2, 3, 5):
            fixed = mean_escape_monte_carlo(Line.axis(n), 200_000, stream(30, n))
            rand = mean_escape_random_direction(n, 200_000, stream(31, n))
            assert abs(fixed.value - rand.value) < 4 * math.hypot(fixed.error_bound, rand.error_bound)

    def test_trapped_is_lower_bound(self):
        est = mean_escape_monte_carlo(Arc(4.0), 2000, stream(2), t_cap=2.0)
        assert est.truncated and est.value <= 2.0

    def test_chain_against_quadrature(self):
        path = PolyChain.from_turns([1.2, -0.7], 0.5)
        q = mean_escape_quadrature(path, 0.002)
        mc = mean_escape_monte_carlo(path, 400_000, stream(40))
        assert abs(q.value - mc.value) < 4 * mc.error_bound + q.error_bound

    def test_arc_against_quadrature(self):
        path = Arc(1.5, 1.0)
        q = mean_escape_quadrature(path, 0.002)
        mc = mean_escape_monte_carlo(path, 200_000, stream(41))
        assert abs(q.value - mc.value) < 4 * mc.error_bound + q.error_bound

    def test_streams_ignore_worker_count(self):
        a = mean_escape_monte_carlo_streams(Line(), 300_000, 7, workers=1, chunk=50_000)
        b = mean_escape_monte_carlo_streams(Line(), 300_000, 7, workers=4, chunk=50_000)
        assert a.value == b.value and a.error_bound == b.error_bound
