"""Branch-and-prune driver over the linear relaxations.

Per graph: every first-level branch is tightened in rounds (LP box
tightening, then interval propagation and the geometric interior-fit
tests, which also refresh the envelope rows).  A branch whose region
empties is dead; a branch whose box stops moving is split on the widest
variable and both halves are retried.  A graph is eliminated only when
every leaf of every branch tree carries a verified infeasibility, so
budget or depth exhaustion can only ever err toward survival.

The three-way hexagon alternative is enumerated as separate first-level
branches, so within a branch only continuous variables remain to split.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import graphs, lp, relax

ELIMINATED = "eliminated"
SURVIVED = "survived"

_SPLIT_RULES = ("widest",)


@dataclass(frozen=True)
class PruneConfig:
    """Driver knobs.  converge_tol is the per-variable width change (rad)
    below which a tightening round counts as stalled; node_budget caps the
    total split-tree nodes per graph (exhaustion reports survival)."""

    max_depth: int = 40
    converge_tol: float = 1e-4
    max_rounds: int = 8
    node_budget: int = 64
    split_rule: str = "widest"
    d_window: tuple = relax.D_WINDOW_13

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if not self.converge_tol > 0:
            raise ValueError("converge_tol must be positive")
        if self.max_rounds < 1 or self.node_budget < 1:
            raise ValueError("round and node budgets must be >= 1")
        if self.split_rule not in _SPLIT_RULES:
            raise ValueError(f"unknown split rule {self.split_rule!r}")
        d_lo, d_hi = self.d_window
        if not 0.0 < d_lo <= d_hi:
            raise ValueError("bad distance window")


@dataclass(frozen=True)
class SplitNode:
    """One node of the certificate tree."""

    depth: int
    status: str          # "infeasible" | "survived" | "split"
    detail: str = ""     # proof source or stop reason
    children: tuple = ()

    def leaves(self):
        if not self.children:
            yield self
            return
        for ch in self.children:
            yield from ch.leaves()


@dataclass(frozen=True)
class PruneOutcome:
    graph_id: str
    status: str                    # ELIMINATED | SURVIVED
    branches: tuple                # one SplitNode root per first-level branch
    boxes: tuple                   # (lo, hi) arrays of surviving leaves
    nodes: int
    iterations: int                # total simplex iterations
    failures: int                  # numerically failed bound solves (kept loose)
    max_depth_reached: int
    level1: bool                   # eliminated by the first LP pass alone
    wall_time: float
    names: tuple = ()

    def leaves(self):
        for root in self.branches:
            yield from root.leaves()


class _Driver:
    """Mutable per-graph exploration state; the recursion accumulates here."""

    def __init__(self, sys, cfg):
        self.sys = sys
        self.cfg = cfg
        self.nodes = 0
        self.iterations = 0
        self.failures = 0
        self.max_depth = 0
        self.boxes = []
        self.used_level2 = False

    def run(self, r, depth, scale):
        self.nodes += 1
        self.max_depth = max(self.max_depth, depth)
        cfg = self.cfg
        if r.infeasible_box:
            return SplitNode(depth, "infeasible", r.note or "crossed box")
        for _ in range(cfg.max_rounds):
            width0 = r.hi - r.lo
            r, out = lp.tighten_box(r)
            self.iterations += out.iterations
            self.failures += out.failures
            if out.status == lp.INFEASIBLE:
                return SplitNode(depth, "infeasible",
                                 f"lp gap={out.certificate_gap:.6g}")
            self.used_level2 = True
            r = relax.level2_tighten(r, self.sys)
            if r.infeasible_box:
                return SplitNode(depth, "infeasible", r.note or "interval")
            if np.max(width0 - (r.hi - r.lo)) < cfg.converge_tol:
                break
        widths = r.hi - r.lo
        if (depth >= cfg.max_depth or self.nodes + 2 > cfg.node_budget
                or widths.max() <= 1e-9):
            self.boxes.append((r.lo.copy(), r.hi.copy()))
            reason = ("max depth" if depth >= cfg.max_depth else
                      "node budget" if self.nodes + 2 > cfg.node_budget
                      else "point box")
            return SplitNode(depth, "survived", reason)
        j = int(np.argmax(widths / scale))
        mid = 0.5 * (r.lo[j] + r.hi[j])
        hi_l = r.hi.copy()
        hi_l[j] = mid
        lo_r = r.lo.copy()
        lo_r[j] = mid
        kids = (self.run(r.with_box(r.lo, hi_l), depth + 1, scale),
                self.run(r.with_box(lo_r, r.hi), depth + 1, scale))
        return SplitNode(depth, "split", f"x{j}@{mid:.9g}", kids)


def prune_graph(g, cfg: PruneConfig = PruneConfig(), graph_id="") -> PruneOutcome:
    """Explore every first-level branch of g; eliminated only when all of
    them empty out under verified tests."""
    t0 = time.perf_counter()
    sys = relax.build_angle_system(g)
    bs = relax.level1_constraints(sys, cfg.d_window)
    drv = _Driver(sys, cfg)
    roots = []
    for branch in bs.branches:
        scale = np.maximum(branch.hi - branch.lo, 1e-9)
        roots.append(drv.run(branch, 0, scale))
    status = SURVIVED if drv.boxes else ELIMINATED
    return PruneOutcome(
        graph_id=graph_id,
        status=status,
        branches=tuple(roots),
        boxes=tuple(drv.boxes),
        nodes=drv.nodes,
        iterations=drv.iterations,
        failures=drv.failures,
        max_depth_reached=drv.max_depth,
        level1=status == ELIMINATED and not drv.used_level2,
        wall_time=time.perf_counter() - t0,
        names=sys.names,
    )


def optimum_bracket(gs, lo, hi, cfg: PruneConfig = PruneConfig(node_budget=48,
                                                               max_depth=14),
                    tol=1e-4, max_probes=40):
    """Bisect the best achievable minimum distance over a set of graphs.

    A probe at mid runs every graph at the window [mid, hi0]; if all are
    eliminated then no configuration with separation >= mid exists over
    these candidates and the upper bracket moves down.  Returns (lo, hi,
    probes) with the invariant: every graph is infeasible on [hi, hi0].
    Narrow windows keep the nonlinear envelopes tight, which is what makes
    the per-probe eliminations decisive.
    """
    if not 0.0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    gs = list(gs)
    if not gs:
        raise ValueError("no graphs to bracket")
    hi0 = hi
    probes = 0
    while hi - lo > tol and probes < max_probes:
        mid = 0.5 * (lo + hi)
        pcfg = replace(cfg, d_window=(mid, hi0))
        probes += 1
        alive = False
        for g in gs:
            if prune_graph(g, pcfg).status == SURVIVED:
                alive = True
                break
        if alive:
            lo = mid
        else:
            hi = mid
    return lo, hi, probes


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class PipelineReport:
    parsed: int
    filtered: int
    eliminated_level1: int
    eliminated_later: int
    survived: int
    rows: tuple        # JSON-ready dict per graph, input order
    outcomes: tuple    # PruneOutcome per pruned graph, None otherwise
    survivors: tuple   # (index, isomorphism label or None)


def _prune_job(args):
    i, g, cfg = args
    return i, prune_graph(g, cfg, graph_id=str(i))


def run_pipeline(stream, cfg: PruneConfig = PruneConfig(), jobs=1,
                 skip_rows=None, face_cap=6) -> PipelineReport:
    """Filter then prune every graph of a planar_code stream.

    skip_rows maps input index -> previously computed report row; those
    graphs are not re-pruned (resume support).  jobs > 1 spreads the prune
    work over processes; output is independent of jobs.  face_cap is the
    perimeter bound for the combinatorial filter (2pi over the distance
    lower bound, at most 6).
    """
    skip_rows = skip_rows or {}
    rows = []
    outcomes = []
    work = []
    for i, g in enumerate(graphs.parse_planar_code(stream)):
        if i in skip_rows:
            rows.append(dict(skip_rows[i]))
            outcomes.append(None)
            continue
        rep = graphs.candidate_filter(g, face_cap=face_cap)
        if not rep:
            rows.append({"graph": i, "status": "filtered",
                         "violations": list(rep.violations)})
            outcomes.append(None)
        else:
            rows.append(None)
            outcomes.append(None)
            work.append((i, g, cfg))

    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_prune_job, work))
    else:
        results = [_prune_job(item) for item in work]

    fixtures = None
    by_index = {i: g for i, g, _ in work}
    for i, out in results:
        row = {"graph": i, "status": out.status, "level1": out.level1,
               "branches": len(out.branches), "nodes": out.nodes,
               "depth": out.max_depth_reached, "iterations": out.iterations}
        if out.status == SURVIVED:
            if fixtures is None:
                fixtures = graphs.gamma13_fixtures()
            g = by_index[i]
            label = None
            for k, ref in enumerate(fixtures):
                if graphs.isomorphic(g, ref):
                    label = f"gamma13-{k}"
                    break
            row["iso"] = label
        rows[i] = row
        outcomes[i] = out

    filtered = sum(1 for r in rows if r["status"] == "filtered")
    lvl1 = sum(1 for r in rows
               if r["status"] == ELIMINATED and r.get("level1"))
    later = sum(1 for r in rows
                if r["status"] == ELIMINATED and not r.get("level1"))
    survivors = tuple((r["graph"], r.get("iso"))
                      for r in rows if r["status"] == SURVIVED)
    return PipelineReport(
        parsed=len(rows), filtered=filtered, eliminated_level1=lvl1,
        eliminated_later=later, survived=len(survivors),
        rows=tuple(rows), outcomes=tuple(outcomes), survivors=survivors)


# ---------------------------------------------------------------------------
# report serialization


def report_jsonl(report: PipelineReport, times=False) -> str:
    """One JSON object per graph plus a trailing summary object.

    Wall times are volatile, so they are off by default and the default
    output is byte-identical across runs of the same input and config.
    """
    lines = []
    for row, out in zip(report.rows, report.outcomes):
        row = dict(row)
        if times and out is not None:
            row["time"] = round(out.wall_time, 3)
        lines.append(json.dumps(row, sort_keys=True))
    summary = {"summary": {
        "parsed": report.parsed,
        "filtered": report.filtered,
        "eliminated_level1": report.eliminated_level1,
        "eliminated_later": report.eliminated_later,
        "survived": report.survived,
        "survivors": [{"graph": i, "iso": iso} for i, iso in report.survivors],
    }}
    lines.append(json.dumps(summary, sort_keys=True))
    return "\n".join(lines) + "\n"


def report_csv(report: PipelineReport) -> str:
    cols = ("graph", "status", "level1", "branches", "nodes", "depth",
            "iterations", "iso")
    out = [",".join(cols)]
    for row in report.rows:
        out.append(",".join("" if row.get(c) is None else str(row.get(c))
                            for c in cols))
    return "\n".join(out) + "\n"


def parse_report_jsonl(text: str) -> dict:
    """Per-graph rows of a (possibly partial) JSON-lines report, keyed by
    input index; summary lines are skipped.  Feed to run_pipeline(skip_rows=)."""
    done = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if "graph" in obj and "status" in obj:
            done[obj["graph"]] = obj
    return done
