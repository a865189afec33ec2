import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from escape_lab.cli import main

J_LINE = 8 / (3 * math.pi)


def run(argv, capsys):
    rc = main(argv)
    out, err = capsys.readouterr()
    return rc, out, err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


class TestEvaluate:
    def test_line(self, tmp_path, capsys):
        out_csv = tmp_path / "area.csv"
        rc, out, _ = run(["evaluate", write(tmp_path, "l.json", {"type": "line"}), "--out", str(out_csv)], capsys)
        assert rc == 0
        rep = json.loads(out)
        assert abs(rep["J"] - J_LINE) < 5e-3 and rep["truncated"] is False and rep["h"] == 0.005
        rows = list(csv.reader(out_csv.open()))
        assert rows[0] == ["t", "area", "cumulative_J"] and len(rows) > 300

    def test_flat_arc_matches_line(self, tmp_path, capsys):
        _, a, _ = run(["evaluate", write(tmp_path, "a.json", {"type": "arc", "curvature": 0})], capsys)
        _, b, _ = run(["evaluate", write(tmp_path, "l.json", {"type": "line"})], capsys)
        assert json.loads(a)["J"] == pytest.approx(json.loads(b)["J"], abs=1e-9)

    def test_loop_truncates(self, tmp_path, capsys):
        spec = {"type": "arc", "curvature": 4, "length": None}
        rc, out, _ = run(["evaluate", write(tmp_path, "c.json", spec), "--t-cap", "3", "--format", "csv"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rc == 0 and rows[0]["truncated"] == "True"

    @pytest.mark.parametrize("text", ["{oops", '{"type": "helix"}', '{"type": "line", "direction": [1, 1]}'])
    def test_bad_spec(self, tmp_path, capsys, text):
        rc, _, err = run(["evaluate", write(tmp_path, "bad.json", text)], capsys)
        assert rc == 2 and "error" in err

    def test_missing_file(self, tmp_path, capsys):
        rc, _, _ = run(["evaluate", str(tmp_path / "nope.json")], capsys)
        assert rc == 2


class TestTable:
    def test_rows(self, capsys):
        rc, out, _ = run(["table", "--seed", "1", "--n-max", "3", "--samples", "20000"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rc == 0 and [int(r["n"]) for r in rows] == [1, 2, 3]
        assert float(rows[0]["closed_form"]) == pytest.approx(1.0)
        assert rows[0]["assembled"] == ""
        assert float(rows[1]["closed_form"]) == pytest.approx(0.8488263, abs=1e-7)
        for r in rows[1:]:
            assert float(r["closed_form"]) == pytest.approx(float(r["assembled"]), abs=1e-10)

    def test_json(self, capsys):
        rc, out, _ = run(["table", "--seed", "1", "--n-max", "2", "--samples", "1000", "--format", "json"], capsys)
        assert rc == 0 and [json.loads(l)["n"] for l in out.splitlines()] == [1, 2]

    def test_seed_required(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["table"])
        assert e.value.code == 2


class TestKP:
    def test_scaling_campaign(self, capsys):
        rc, out, _ = run(["kp", "--seed", "3", "--size", "200", "--generator", "scaling"], capsys)
        recs = [json.loads(l) for l in out.splitlines()]
        assert rc == 0 and len(recs) == 200
        assert all(r["flags"]["intersection_ok"] and r["flags"]["union_ok"] for r in recs)
        assert {"seed", "generator", "N", "dim", "areas", "flags"} <= set(recs[0])

    def test_mc_campaign(self, capsys):
        rc, out, _ = run(["kp", "--seed", "3", "--size", "20", "--dim", "3", "--samples", "20000"], capsys)
        recs = [json.loads(l) for l in out.splitlines()]
        assert rc == 0 and all("volumes" in r for r in recs)

    def test_empty(self, capsys):
        rc, out, _ = run(["kp", "--seed", "3", "--size", "0"], capsys)
        assert rc == 0 and out == ""

    def test_violation_exit_code(self, capsys, monkeypatch):
        from escape_lab import kp

        def fake(*args, **kwargs):
            yield {"exact": True, "flags": {"expansion": True, "intersection_ok": False, "union_ok": True}}

        monkeypatch.setattr(kp, "run_campaign", fake)
        rc, _, err = run(["kp", "--seed", "1", "--size", "1"], capsys)
        assert rc == 3 and "violation" in err


class TestOptimize:
    def test_zero_init(self, tmp_path, capsys):
        argv = ["optimize", "--seed", "1", "--k", "1", "--seeds", "2", "--init", "zero", "--out", str(tmp_path)]
        rc, out, _ = run(argv, capsys)
        s = json.loads(out)
        assert rc == 0 and s["fraction_reaching_target"] == 1.0
        assert all(r["best_angles"] == [0.0] for r in s["runs"])
        assert sorted(p.name for p in tmp_path.iterdir()) == ["trace_000.csv", "trace_001.csv"]

    def test_budget_zero(self, capsys):
        rc, out, _ = run(["optimize", "--seed", "1", "--seeds", "1", "--budget", "0", "--h", "0.01"], capsys)
        s = json.loads(out)
        assert rc == 0 and s["runs"][0]["evaluations"] == 1

    def test_k1_campaign(self, capsys):
        rc, out, _ = run(["optimize", "--seed", "5", "--k", "1", "--seeds", "20"], capsys)
        assert rc == 0 and json.loads(out)["fraction_reaching_target"] >= 0.9


class TestMC:
    def test_line(self, capsys):
        rc, out, _ = run(["mc", "--seed", "2", "--samples", "200000"], capsys)
        rep = json.loads(out)
        assert rc == 0 and abs(rep["J"] - J_LINE) < 4 * rep["stderr"]

    def test_dim(self, capsys):
        rc, out, _ = run(["mc", "--seed", "2", "--dim", "3", "--samples", "200000"], capsys)
        rep = json.loads(out)
        assert rep["dim"] == 3 and abs(rep["J"] - 0.75) < 4 * rep["stderr"]

    def test_bad_samples(self, capsys):
        rc, _, _ = run(["mc", "--seed", "2", "--samples", "0"], capsys)
        assert rc == 2


def _cli(args, threads):
    env = dict(os.environ, ESCAPE_LAB_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "escape_lab", *args], env=env, capture_output=True, check=True).stdout


@pytest.mark.parametrize(
    "args",
    [
        ["mc", "--seed", "11", "--samples", "300000"],
        ["kp", "--seed", "11", "--size", "40"],
        ["table", "--seed", "11", "--n-max", "3", "--samples", "150000"],
    ],
)
def test_bytes_identical_across_workers(args):
    one = _cli(args, 1)
    assert one == _cli(args, 4) == _cli(args, 1)
