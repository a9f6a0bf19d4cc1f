"""Command line front end for the pipeline.

Subcommands: filter (combinatorial screen of a planar_code stream),
prune (full filter + branch-and-prune with reports), solve (closed-form
optimum, coordinates, curve tables, case analyses), verify-small-n
(pipeline optimum vs a direct-optimization oracle for n in 4..9).

Exit codes: 0 completed, 1 usage error, 2 parse error, 3 numerical
failure.  Reports are deterministic for a given input and configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cases, geom, graphs, prune, relax

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NUMERIC = 3

_FORMATS = ("text", "json", "csv")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str = None
    output: str = None
    fmt: str = "text"
    depth: int = 40
    tol: float = 1e-7
    jobs: int = 1
    d_window: tuple = relax.D_WINDOW_13
    resume: str = None
    n: int = None
    case: str = None
    out_dir: str = "."
    curve_step: float = 1e-3
    times: bool = False


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_window(text):
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"bad d-window {text!r}, expected lo:hi")
    if not 0.0 < lo <= hi:
        raise UsageError(f"bad d-window {text!r}, need 0 < lo <= hi")
    return lo, hi


def load_config_file(path) -> dict:
    """Flat key-value file: one `key value` or `key = value` per line,
    # comments; keys mirror the long flag names."""
    out = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        else:
            key, _, val = line.partition(" ")
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise UsageError(f"config line {ln}: cannot parse {raw!r}")
        key = key.replace("-", "_")
        out["fmt" if key == "format" else key] = val
    return out


_CASTS = {"depth": int, "jobs": int, "n": int, "tol": float,
          "curve_step": float, "d_window": _parse_window,
          "times": lambda s: s.lower() in ("1", "true", "yes")}


def build_config(argv) -> RunConfig:
    top = _Parser(prog="tammes", description=__doc__.splitlines()[0])
    top.add_argument("--config", help="flat key-value defaults file")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, *names):
        if "input" in names:
            p.add_argument("--input", help="planar_code file")
        if "format" in names:
            p.add_argument("--format", dest="fmt", choices=_FORMATS)
        if "output" in names:
            p.add_argument("--output", help="report path (default stdout)")
        if "tol" in names:
            p.add_argument("--tol", type=float)

    p = sub.add_parser("filter", help="combinatorial candidate screen")
    common(p, "input", "format", "output")

    p = sub.add_parser("prune", help="filter + branch-and-prune a stream")
    common(p, "input", "format", "output")
    p.add_argument("--depth", type=int, help="max split depth")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--d-window", dest="d_window", type=_parse_window,
                   help="distance window lo:hi (radians)")
    p.add_argument("--resume", help="partial JSON-lines report to extend")
    p.add_argument("--times", action="store_true", default=None,
                   help="include wall times in the report")

    p = sub.add_parser("solve", help="closed-form optimum and coordinates")
    common(p, "format", "output")
    p.add_argument("--case", choices=("1", "2", "3", "all"),
                   help="also run the named final-analysis case (slow)")
    p.add_argument("--out-dir", dest="out_dir",
                   help="directory for coordinate/curve files (default .)")
    p.add_argument("--curve-step", dest="curve_step", type=float,
                   help="sampling step of the exported curve table")

    p = sub.add_parser("verify-small-n",
                       help="pipeline vs direct optimization for small n")
    common(p, "input", "format", "output", "tol")
    p.add_argument("--n", type=int, help="point count, 4..9")
    p.add_argument("--depth", type=int, help="max split depth per probe")

    ns = top.parse_args(argv)
    file_cfg = load_config_file(ns.config) if ns.config else {}
    merged = {}
    for f in RunConfig.__dataclass_fields__:
        if f == "command":
            continue
        flag = getattr(ns, f, None)
        if flag is not None:
            merged[f] = flag
        elif f in file_cfg:
            merged[f] = _CASTS.get(f, str)(file_cfg[f])
    return RunConfig(command=ns.command, **merged)


# ---------------------------------------------------------------------------
# small helpers


def _read_input(cfg) -> bytes:
    if not cfg.input:
        raise UsageError("--input is required")
    path = Path(cfg.input)
    if not path.exists():
        if cfg.command == "verify-small-n":
            raise UsageError(
                f"{path} not found; generate small-n planar graphs with "
                f"plantri, e.g.  plantri -p {cfg.n} > {path}  "
                f"(or use tools/gen_small_fixtures.py for n <= 7)")
        raise UsageError(f"{path} not found")
    return path.read_bytes()


def _emit(cfg, text):
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# filter


def cmd_filter(cfg) -> int:
    data = _read_input(cfg)
    passed = 0
    failed = 0
    hist = Counter()
    for g in graphs.parse_planar_code(data):
        rep = graphs.candidate_filter(g)
        if rep:
            passed += 1
        else:
            failed += 1
            hist.update(rep.violations)
    payload = {"passed": passed, "failed": failed,
               "violations": dict(sorted(hist.items()))}
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(payload, sort_keys=True) + "\n")
    elif cfg.fmt == "csv":
        lines = ["key,count", f"passed,{passed}", f"failed,{failed}"]
        lines += [f"violation:{k},{v}" for k, v in sorted(hist.items())]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        lines = [f"passed {passed}", f"failed {failed}"]
        lines += [f"  {k}: {v}" for k, v in sorted(hist.items())]
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# prune


def cmd_prune(cfg) -> int:
    data = _read_input(cfg)
    skip = None
    if cfg.resume:
        path = Path(cfg.resume)
        if not path.exists():
            raise UsageError(f"resume report {path} not found")
        skip = prune.parse_report_jsonl(path.read_text())
    pcfg = prune.PruneConfig(max_depth=cfg.depth, d_window=cfg.d_window)
    report = prune.run_pipeline(data, pcfg, jobs=cfg.jobs, skip_rows=skip)
    if cfg.fmt == "csv":
        _emit(cfg, prune.report_csv(report))
    elif cfg.fmt == "text":
        lines = [
            f"parsed {report.parsed}",
            f"filtered {report.filtered}",
            f"eliminated at first level {report.eliminated_level1}",
            f"eliminated later {report.eliminated_later}",
            f"survived {report.survived}",
        ]
        for i, iso in report.survivors:
            lines.append(f"  survivor graph {i}: {iso or 'unrecognized'}")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, prune.report_jsonl(report, times=cfg.times))
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _write_coordinates(out_dir: Path, pts):
    (out_dir / "p13_coordinates.txt").write_text(cases.coordinates_text(pts))
    (out_dir / "p13_spherical.txt").write_text(cases.spherical_text(pts))


def _write_curve(out_dir: Path, step):
    n = max(2, int(round((cases.D_HI - cases.D_LO) / step)) + 1)
    rows = ["d_rad,u18_rad"]
    rows += [f"{d:.9f},{u:.12f}" for d, u in cases.u18_curve(n)]
    (out_dir / "u18_curve.csv").write_text("\n".join(rows) + "\n")


def _case_verdicts(which):
    out = {}
    if which in ("1", "all"):
        out["case1"] = cases.case1_analysis()
    if which in ("2", "all"):
        out["case2"] = cases.case2_region_scan()
    if which in ("3", "all"):
        out["case3"] = cases.case3_analysis()
    return out


def cmd_solve(cfg) -> int:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pts = cases.build_P13()
    dmin = min(geom.angular_dist(pts[i], pts[j])
               for i in range(13) for j in range(i + 1, 13))
    g = graphs.contact_graph(pts)
    iso = graphs.isomorphic(g, graphs.gamma13_fixtures()[0])
    _write_coordinates(out_dir, pts)
    _write_curve(out_dir, cfg.curve_step)

    payload = {
        "delta13_deg": math.degrees(cases.D13),
        "delta13_rad": cases.D13,
        "a13_deg": math.degrees(cases.A13),
        "a13_rad": cases.A13,
        "p13_min_distance_rad": dmin,
        "contact_graph_matches": bool(iso),
        "files": ["p13_coordinates.txt", "p13_spherical.txt",
                  "u18_curve.csv"],
    }
    verdicts = _case_verdicts(cfg.case) if cfg.case else {}
    for name, v in verdicts.items():
        payload[name] = {"case": v.case_id, "conclusion": v.conclusion}
        table = out_dir / f"{name}_verdict.json"
        table.write_text(v.to_json() + "\n")
        payload[name]["verdict_file"] = table.name

    if cfg.fmt == "json":
        _emit(cfg, json.dumps(payload, sort_keys=True) + "\n")
    else:
        lines = [
            f"delta13 = {payload['delta13_deg']:.6f} deg"
            f" = {cases.D13:.12f} rad",
            f"a13     = {payload['a13_deg']:.6f} deg"
            f" = {cases.A13:.12f} rad",
            f"P13 minimum distance = {dmin:.12f} rad",
            "contact graph matches the optimal fixture: "
            + ("yes" if iso else "NO"),
            f"wrote {', '.join(payload['files'])} in {out_dir}",
        ]
        for name, v in verdicts.items():
            lines.append(f"{name}: {v.conclusion}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# small-n verification


def maximin_points(n, starts=40, seed=7):
    """Direct-optimization oracle: best of multistart SLSQP maximizing the
    minimum pairwise angular distance.  Returns (distance, points)."""
    from scipy.optimize import minimize

    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def unpack(z):
        th, ph = z[:n], z[n:2 * n]
        st = np.sin(th)
        return np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)],
                        axis=1)

    def cons(z):
        p = unpack(z)
        d = np.arccos(np.clip(p @ p.T, -1.0, 1.0))
        return np.array([d[i, j] - z[-1] for i, j in pairs])

    best = -1.0
    best_pts = None
    for _ in range(starts):
        th0 = np.arccos(rng.uniform(-1.0, 1.0, n))
        ph0 = rng.uniform(0.0, 2.0 * math.pi, n)
        z0 = np.concatenate([th0, ph0, [0.5]])
        res = minimize(lambda z: -z[-1], z0, method="SLSQP",
                       constraints=[{"type": "ineq", "fun": cons}],
                       options={"maxiter": 300, "ftol": 1e-12})
        if not res.success:
            continue
        p = unpack(res.x)
        d = np.arccos(np.clip(p @ p.T, -1.0, 1.0))
        np.fill_diagonal(d, np.inf)
        val = float(d.min())
        if val > best:
            best, best_pts = val, p
    if best_pts is None:
        raise RuntimeError("direct optimization produced no feasible point")
    return best, best_pts


def cmd_verify_small_n(cfg) -> int:
    if cfg.n is None or not 4 <= cfg.n <= 9:
        raise UsageError("--n must be given, in 4..9")
    data = _read_input(cfg)
    oracle_d, _ = maximin_points(cfg.n)
    lb = oracle_d - 2e-3
    face_cap = min(6, int(2.0 * math.pi / lb))
    gs = [g for g in graphs.parse_planar_code(data)
          if g.n == cfg.n and graphs.candidate_filter(g, face_cap=face_cap)]
    if not gs:
        raise RuntimeError("no candidate graphs pass the filter")
    pcfg = prune.PruneConfig(node_budget=48, max_depth=min(cfg.depth, 14))
    lo, hi, probes = prune.optimum_bracket(
        gs, lb, 2.0 * math.pi / 3 - 1e-6, cfg=pcfg, tol=cfg.tol)
    payload = {
        "n": cfg.n,
        "oracle_rad": oracle_d,
        "oracle_deg": math.degrees(oracle_d),
        "pipeline_upper_rad": hi,
        "bracket_lo_rad": lo,
        "probes": probes,
        "candidates": len(gs),
        "gap_rad": hi - oracle_d,
    }
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(payload, sort_keys=True) + "\n")
    else:
        _emit(cfg, (
            f"n={cfg.n}: oracle {oracle_d:.9f} rad"
            f" ({math.degrees(oracle_d):.5f} deg)\n"
            f"pipeline upper bound {hi:.9f} rad"
            f" (bracket [{lo:.9f}, {hi:.9f}], {probes} probes,"
            f" {len(gs)} candidates)\n"
            f"gap {hi - oracle_d:+.3e} rad\n"))
    return EXIT_OK


# ---------------------------------------------------------------------------


_DISPATCH = {
    "filter": cmd_filter,
    "prune": cmd_prune,
    "solve": cmd_solve,
    "verify-small-n": cmd_verify_small_n,
}


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _DISPATCH[cfg.command](cfg)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except graphs.ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (geom.GeomDomainError, np.linalg.LinAlgError,
            FloatingPointError, RuntimeError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
