import csv
import io
import json

import numpy as np
import pytest

from bench.fixtures import FIXTURE_NAMES, PRINT_TOL, all_fixtures, default_params, load_fixture
from bench.harness import BenchReport, BenchRow, run_pagerank_sweep, run_table1
from bench.report_manager import (
    CSV_HEADER,
    ReportManager,
    emit,
    format_for,
    render_csv,
    render_json,
    render_markdown,
)
from markov.tensor import residual, validate
from solvers.config import Method, SolverConfig
from solvers.methods import solve


class TestFixtures:
    def test_shapes(self):
        shapes = {fx.name: (fx.order, fx.dim) for fx in all_fixtures()}
        assert shapes == {"i": (3, 3), "ii": (3, 3), "iii": (3, 4), "iv": (4, 3)}

    def test_printed_entries(self):
        assert load_fixture("i").raw[0, 0, 0] == 0.6
        assert load_fixture("iv").raw[0, 0, 0, 0] == 0.3721

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_column_integrity(self, name):
        fx = load_fixture(name)
        off = np.abs(fx.raw_column_sums() - 1.0) > PRINT_TOL
        flagged = sorted(tuple(int(i) + 1 for i in idx) for idx in np.argwhere(off))
        assert flagged == sorted(fx.known_defects)
        assert validate(fx.tensor).ok
        assert np.allclose(fx.tensor.column_sums(), 1.0, atol=1e-12)

    def test_raw_is_read_only(self, fixture_i):
        with pytest.raises(ValueError):
            fixture_i.raw[0, 0, 0] = 1.0

    def test_enforcement(self):
        assert load_fixture("i").enforced(Method.HOPM)
        assert not load_fixture("iii").enforced(Method.QEHOPM)
        assert load_fixture("iv").enforced(Method.GEAP)
        assert load_fixture("iv").params[Method.GEAP] == {"geap_hessian": "nonsym"}

    def test_default_params(self):
        assert default_params("ii", Method.HOPMM1) == {"beta": 0.0045}
        assert default_params("i", Method.RHOPM) == {"gamma": 1.2}
        assert default_params(None, Method.HOPMM2) == {}
        with pytest.raises(KeyError):
            load_fixture("v")


class TestTable1:
    @pytest.fixture(scope="class")
    def report(self):
        return run_table1(workers=2)

    def test_rows(self, report):
        assert len(report.rows) == 24
        assert [r.fixture for r in report.rows[:6]] == ["i"] * 6
        assert report.ok

    def test_row_residual_recomputed(self, report):
        for row in report.rows:
            fx = load_fixture(row.fixture)
            x = solve(fx.tensor, SolverConfig(method=Method(row.method), **row.params)).final_x
            assert row.rr == pytest.approx(residual(fx.tensor, x), abs=1e-14)

    def test_worker_count_does_not_change_rows(self, report):
        serial = run_table1(workers=1)
        assert [(r.fixture, r.method, r.it, r.rr) for r in serial.rows] == \
               [(r.fixture, r.method, r.it, r.rr) for r in report.rows]

    def test_empty_method_list(self):
        report = run_table1(methods=[])
        assert report.rows == []
        assert report.ok


def _toy_report():
    rows = [
        BenchRow("i", "hopm", {}, 15, 2.0e-11, 0.01, True, 2.7e-11,
                 expected_it=15, expected_rr=2.76e-11, enforced=True, passed=True),
        BenchRow("i", "hopmm1", {"beta": 0.045}, 9, 5.0e-11, 0.01, True, 6.2e-11,
                 expected_it=9, expected_rr=6.21e-11, enforced=True, passed=True),
        BenchRow("iii", "qehopm", {}, 12, 1.0e-12, 0.01, True, 1.0e-12,
                 expected_it=13, expected_rr=1.26e-12, enforced=False, passed=True),
    ]
    return BenchReport("table1", rows, {"tol": 1e-10})


class TestRendering:
    def test_csv(self):
        text = render_csv(_toy_report(), include_wall_time=False)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == CSV_HEADER
        assert rows[2][:4] == ["i", "hopmm1", "beta=0.045", "9"]
        assert rows[2][5] == ""

    def test_json_round_trip(self):
        report = _toy_report()
        again = BenchReport.from_dict(json.loads(render_json(report, include_wall_time=False)))
        assert again.campaign == "table1"
        assert [r.it for r in again.rows] == [15, 9, 12]
        assert all(r.wall_time == 0.0 for r in again.rows)
        assert again.rows[1].params == {"beta": 0.045}

    def test_markdown_groups_by_fixture(self):
        lines = render_markdown(_toy_report()).splitlines()
        assert lines[0].startswith("| Examples | Algorithm | CPU | IT | RR |")
        assert lines[2].startswith("| (i) | HOPM |")
        assert lines[3].startswith("|  | HOPMM-I (β=0.045) |")
        assert lines[4].startswith("| (iii) |")
        assert lines[4].endswith("| pass |")

    def test_text_parameters(self):
        row = BenchRow("iv", "geap", {"geap_hessian": "nonsym", "tau": 1e-6}, 14, 1e-11, 0.0, True, 1e-11,
                       expected_it=12, expected_rr=9.52e-11, enforced=True, passed=True)
        report = BenchReport("table1", [row])
        assert row.params_text() == "geap_hessian=nonsym;tau=1e-06"
        assert "| (iv) | GEAP (H=nonsym, τ=1e-06) |" in render_markdown(report)

    def test_failures(self):
        report = _toy_report()
        report.rows[0].passed = False
        assert [r.method for r in report.failures] == ["hopm"]
        assert not report.ok
        assert "| fail |" in render_markdown(report)

    def test_emit_and_format(self, tmp_path):
        path = emit(_toy_report(), format_for(tmp_path / "out.csv"), tmp_path / "out.csv")
        assert path.read_text().startswith(",".join(CSV_HEADER))
        assert format_for("r.md") == "md"
        assert format_for("r.json") == "json"
        md = emit(_toy_report(), "md-table", tmp_path / "out.md")
        assert md.read_text() == render_markdown(_toy_report())
        with pytest.raises(ValueError, match="unknown report format"):
            emit(_toy_report(), "xml", tmp_path / "out.xml")

    def test_emit_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError, match="cannot write report"):
            emit(_toy_report(), "json", blocker / "out.json")

    def test_manager_writes_all_formats(self, tmp_path):
        paths = ReportManager(tmp_path / "reports").save(_toy_report())
        assert sorted(p.name for p in paths.values()) == ["table1.csv", "table1.json", "table1.md"]


class TestSweepSummary:
    def test_small_sweep(self):
        report = run_pagerank_sweep(seeds=[0, 1], thetas=[0.7], methods=[Method.HOPM, Method.QEHOPM])
        assert len(report.rows) == 4
        assert report.rows[0].fixture == "seed0"
        assert report.rows[0].params == {"theta": 0.7}
        summary = report.summary()
        assert {(s["theta"], s["method"]) for s in summary} == {(0.7, "hopm"), (0.7, "qehopm")}
        assert all(s["converged"] == 2 for s in summary)
        assert report.reliability_flags() == []
        assert "mean IT" in render_markdown(report)

    def test_includes_fixtures(self):
        report = run_pagerank_sweep(seeds=[], thetas=[0.85], methods=[Method.HOPM], include_fixtures=True)
        assert [r.fixture for r in report.rows] == ["(i)", "(ii)", "(iii)", "(iv)"]

    def test_flags_failures_at_low_damping(self):
        rows = [BenchRow("seed0", "hopm", {"theta": 0.7}, 1000, 1e-3, 0.0, False, 1e-3, theta=0.7),
                BenchRow("seed0", "qehopm", {"theta": 0.7}, 5, 1e-12, 0.0, True, 1e-12, theta=0.7)]
        flags = BenchReport("pagerank", rows).reliability_flags()
        assert len(flags) == 1
        assert "hopm failed" in flags[0]

    def test_flags_qehopm_behind_rhopm(self):
        rows = [BenchRow(f"seed{s}", m, {"theta": 0.99}, it, 1e-12, 0.0, ok, 1e-12, theta=0.99, seed=s)
                for s in range(2)
                for m, it, ok in (("hopm", 1000, False),
                                  ("rhopm", 40, True),
                                  ("qehopm", 1000 if s else 9, not s))]
        flags = BenchReport("pagerank", rows).reliability_flags()
        assert flags == ["θ=0.99: QEHOPM converged 1×, RHOPM 2×"]

    def test_flags_instance_hopm_solved_but_qehopm_missed(self):
        rows = [
            BenchRow("seed0", "hopm", {"theta": 0.9}, 200, 1e-12, 0.0, True, 1e-12, theta=0.9, seed=0),
            BenchRow("seed0", "qehopm", {"theta": 0.9}, 1000, 1e-3, 0.0, False, 1e-3, theta=0.9, seed=0),
            BenchRow("seed1", "hopm", {"theta": 0.9}, 1000, 1e-3, 0.0, False, 1e-3, theta=0.9, seed=1),
            BenchRow("seed1", "qehopm", {"theta": 0.9}, 12, 1e-12, 0.0, True, 1e-12, theta=0.9, seed=1),
        ]
        flags = BenchReport("pagerank", rows).reliability_flags()
        assert flags == ["θ=0.9: QEHOPM failed on seed0 where HOPM converged"]

    def test_table_report_raises_no_flags(self):
        assert _toy_report().reliability_flags() == []
