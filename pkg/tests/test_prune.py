"""Branch-and-prune driver: configuration checks, certificate trees,
known verdicts on the committed candidate stream, report determinism."""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from tammes import graphs, prune, relax

FIXTURES = Path(__file__).parent / "fixtures"
STREAM = (FIXTURES / "n13_candidates.plc").read_bytes()

FAST = prune.PruneConfig(max_depth=0, max_rounds=1, node_budget=1)
ROOT_ONLY = prune.PruneConfig(max_depth=0)


@pytest.fixture(scope="module")
def candidates():
    return list(graphs.parse_planar_code(STREAM))


@pytest.fixture(scope="module")
def depth0_report():
    return prune.run_pipeline(STREAM, ROOT_ONLY)


class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"max_depth": -1},
        {"converge_tol": 0.0},
        {"max_rounds": 0},
        {"node_budget": 0},
        {"split_rule": "roundrobin"},
        {"d_window": (0.0, 1.0)},
        {"d_window": (1.1, 1.0)},
    ])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(ValueError):
            prune.PruneConfig(**kw)

    def test_defaults(self):
        cfg = prune.PruneConfig()
        assert cfg.d_window == relax.D_WINDOW_13
        assert cfg.split_rule == "widest"


class TestSplitNode:
    def test_leaves_traversal(self):
        leaf1 = prune.SplitNode(2, "infeasible", "lp")
        leaf2 = prune.SplitNode(2, "survived", "max depth")
        mid = prune.SplitNode(1, "split", "x[3]", (leaf1, leaf2))
        root = prune.SplitNode(0, "split", "x[0]", (mid, leaf1))
        assert [n.status for n in root.leaves()] == [
            "infeasible", "survived", "infeasible"]


class TestPruneGraph:
    def test_gamma0_survives_even_one_round(self, candidates):
        out = prune.prune_graph(candidates[0], FAST, "g0")
        assert out.status == prune.SURVIVED
        assert out.boxes and not out.level1
        assert all(n.status in ("survived", "infeasible")
                   for n in out.leaves())

    def test_all_gammas_survive(self, candidates):
        for i in (0, 2, 5, 7):
            out = prune.prune_graph(candidates[i], FAST, str(i))
            assert out.status == prune.SURVIVED, i

    def test_tetrahedron_dies_on_first_pass(self, candidates):
        out = prune.prune_graph(candidates[4], FAST, "tetra")
        assert out.status == prune.ELIMINATED
        assert out.level1
        assert all(n.status == "infeasible" for n in out.leaves())

    def test_missing_contact_variant_needs_later_rounds(self, candidates):
        out = prune.prune_graph(candidates[1], ROOT_ONLY, "g1")
        assert out.status == prune.ELIMINATED
        assert not out.level1
        assert out.iterations > 0
        assert all(n.status == "infeasible" for n in out.leaves())

    def test_survivor_boxes_stay_inside_window(self, candidates):
        cfg = prune.PruneConfig(max_depth=2, node_budget=9, max_rounds=1)
        out = prune.prune_graph(candidates[0], cfg, "g0")
        sys = relax.build_angle_system(candidates[0])
        lo_w, hi_w = cfg.d_window
        assert out.status == prune.SURVIVED
        for lo, hi in out.boxes:
            assert np.all(lo <= hi + 1e-12)
            assert lo[sys.d_index] >= lo_w - 1e-9
            assert hi[sys.d_index] <= hi_w + 1e-9
        assert out.max_depth_reached <= cfg.max_depth


class TestPipeline:
    def test_stage_counts(self, depth0_report):
        r = depth0_report
        assert (r.parsed, r.filtered) == (10, 1)
        assert (r.eliminated_level1, r.eliminated_later) == (1, 4)
        assert r.survived == 4

    def test_survivors_are_the_four_optimal_classes(self, depth0_report):
        assert depth0_report.survivors == (
            (0, "gamma13-0"), (2, "gamma13-1"),
            (5, "gamma13-2"), (7, "gamma13-3"))

    def test_row_verdicts_in_input_order(self, depth0_report):
        rows = depth0_report.rows
        assert rows[9]["status"] == "filtered"
        assert rows[4]["status"] == prune.ELIMINATED and rows[4]["level1"]
        for i in (1, 3, 6, 8):
            assert rows[i]["status"] == prune.ELIMINATED, i
            assert not rows[i]["level1"]

    def test_too_few_rounds_leave_variants_alive(self):
        rep = prune.run_pipeline(
            STREAM, prune.PruneConfig(max_depth=0, max_rounds=2))
        assert rep.survived > 4
        got = {i for i, _ in rep.survivors}
        assert got >= {0, 2, 5, 7}

    def test_header_only_stream(self):
        rep = prune.run_pipeline(b">>planar_code<<")
        assert (rep.parsed, rep.filtered, rep.survived) == (0, 0, 0)
        assert rep.rows == () and rep.survivors == ()

    def test_jobs_do_not_change_the_report(self, depth0_report):
        rep2 = prune.run_pipeline(STREAM, ROOT_ONLY, jobs=2)
        assert prune.report_jsonl(rep2) == prune.report_jsonl(depth0_report)

    def test_resume_skips_and_reproduces(self, depth0_report):
        text = prune.report_jsonl(depth0_report)
        done = prune.parse_report_jsonl(text)
        assert len(done) == 10
        rep2 = prune.run_pipeline(STREAM, ROOT_ONLY, skip_rows=done)
        assert prune.report_jsonl(rep2) == text
        assert all(o is None for o in rep2.outcomes)


class TestReports:
    def test_jsonl_deterministic(self, depth0_report):
        a = prune.report_jsonl(depth0_report)
        b = prune.report_jsonl(depth0_report)
        assert a == b
        last = json.loads(a.splitlines()[-1])
        assert last["summary"]["survived"] == 4

    def test_jsonl_times_flag(self, depth0_report):
        rows = [json.loads(l) for l in
                prune.report_jsonl(depth0_report, times=True).splitlines()]
        assert any("time" in r for r in rows)
        rows = [json.loads(l) for l in
                prune.report_jsonl(depth0_report).splitlines()]
        assert not any("time" in r for r in rows)

    def test_csv_shape(self, depth0_report):
        lines = prune.report_csv(depth0_report).splitlines()
        assert lines[0].startswith("graph,status,level1")
        assert len(lines) == 1 + depth0_report.parsed

    def test_parse_skips_summary_and_blank(self, depth0_report):
        text = prune.report_jsonl(depth0_report) + "\n\n"
        done = prune.parse_report_jsonl(text)
        assert set(done) == set(range(10))


class TestBracket:
    def test_input_validation(self, candidates):
        with pytest.raises(ValueError):
            prune.optimum_bracket([candidates[4]], 1.5, 1.5)
        with pytest.raises(ValueError):
            prune.optimum_bracket([], 1.0, 2.0)

    def test_tetrahedron_optimum(self, candidates):
        d4 = math.acos(-1.0 / 3.0)
        lo, hi, probes = prune.optimum_bracket(
            [candidates[4]], 1.8, 2.0, tol=1e-5)
        assert probes <= 40
        assert hi >= d4 - 1e-9
        assert hi - d4 < 1e-4


class TestFixtureIntegrity:
    def test_round_trip_matches_file(self, candidates):
        assert graphs.serialize_planar_code(candidates) == STREAM

    def test_expected_members(self, candidates):
        assert [g.n for g in candidates] == [13, 13, 13, 13, 4,
                                             13, 13, 13, 13, 13]
        fixtures = graphs.gamma13_fixtures()
        for k, i in enumerate((0, 2, 5, 7)):
            assert graphs.isomorphic(candidates[i], fixtures[k])
