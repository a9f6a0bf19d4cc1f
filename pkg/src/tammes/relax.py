"""Linear relaxations of the corner-angle system of a candidate graph.

A candidate configuration assigns an interior angle to every face corner
plus the common contact distance d.  This module builds the variable
indexing (one variable per corner, an `alpha` variable for the shared
triangle angle, and `d`), the first battery of linear constraints, and
the interval/envelope tightening pass that linearizes the nonlinear face
closure relations over the current box.

Everything emitted is an outer approximation: the exact angle vector of
any irreducible configuration with the given contact graph satisfies
every constraint.  Infeasibility of a relaxation therefore eliminates
the graph (or the branch).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import geom
from . import _polytopes as tables
from .graphs import PlanarEmbeddedGraph, StructureError

TWO_PI = 2.0 * math.pi
STRICT_EPS = 1e-9   # strict bounds shipped as closed bounds with this margin
PAD = 1e-9          # outward padding on computed envelope constants

D_WINDOW_13 = (0.9972, 1.021 - STRICT_EPS)

LE = "<="
EQ = "=="


# ---------------------------------------------------------------------------
# variable indexing


@dataclass(frozen=True, eq=False)
class AngleSystem:
    """Variable layout for one graph: corners face-major, then alpha, d."""

    graph: PlanarEmbeddedGraph
    names: tuple
    face_vars: tuple          # face index -> tuple of variable indices
    incidence: dict           # vertex -> tuple of corner variable indices
    alpha_index: int
    d_index: int

    @property
    def n_vars(self):
        return len(self.names)

    @property
    def corner_count(self):
        return self.alpha_index

    def faces_of_size(self, m):
        return tuple(fi for fi, f in enumerate(self.graph.faces) if len(f) == m)


def build_angle_system(g: PlanarEmbeddedGraph) -> AngleSystem:
    """Deterministic indexing: corners in face order, corner order along
    each face cycle, then alpha and d."""
    names = []
    face_vars = []
    incidence = {v: [] for v in range(g.n)}
    for fi, cyc in enumerate(g.faces):
        if not 3 <= len(cyc) <= 6:
            raise StructureError(f"face {fi} has size {len(cyc)}")
        idxs = []
        for k, v in enumerate(cyc):
            idxs.append(len(names))
            incidence[v].append(len(names))
            names.append(f"f{fi}c{k}")
        face_vars.append(tuple(idxs))
    alpha_index = len(names)
    names.append("alpha")
    d_index = len(names)
    names.append("d")
    return AngleSystem(
        graph=g,
        names=tuple(names),
        face_vars=tuple(face_vars),
        incidence={v: tuple(ix) for v, ix in incidence.items()},
        alpha_index=alpha_index,
        d_index=d_index,
    )


# ---------------------------------------------------------------------------
# relaxation container


@dataclass(frozen=True, eq=False)
class LinearRelaxation:
    """Ax = b, Cx <= e, lo <= x <= hi over the AngleSystem variables.

    `base_ub` marks how many inequality rows belong to the first battery;
    the tightening pass rebuilds everything after that marker instead of
    accumulating stale envelopes.  A crossed box (lo > hi anywhere) marks
    the relaxation infeasible; `note` records why when a tightening test
    crossed it on purpose.
    """

    names: tuple
    lo: np.ndarray
    hi: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    base_ub: int
    label: str = ""
    note: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def n_vars(self):
        return len(self.names)

    @property
    def infeasible_box(self):
        return bool(np.any(self.lo > self.hi))

    def equalities(self):
        for row, rhs in zip(self.a_eq, self.b_eq):
            yield row, EQ, rhs

    def inequalities(self):
        for row, rhs in zip(self.a_ub, self.b_ub):
            yield row, LE, rhs

    def with_box(self, lo, hi):
        return replace(self, lo=np.asarray(lo, float), hi=np.asarray(hi, float))

    def dump_text(self):
        """Objective-free constraint dump for audit."""
        out = [f"relaxation {self.label or '<unnamed>'}: {self.n_vars} vars, "
               f"{len(self.b_eq)} eq, {len(self.b_ub)} ub"]
        if self.note:
            out.append(f"note: {self.note}")

        def term(c, name):
            return f"{c:+.12g}*{name}"

        for kind, rows, rhs, rel in (("eq", self.a_eq, self.b_eq, "="),
                                     ("ub", self.a_ub, self.b_ub, "<=")):
            for row, b in zip(rows, rhs):
                nz = np.nonzero(row)[0]
                lhs = " ".join(term(row[j], self.names[j]) for j in nz)
                out.append(f"{kind}: {lhs} {rel} {b:.12g}")
        for j, name in enumerate(self.names):
            out.append(f"box: {self.lo[j]:.12g} <= {name} <= {self.hi[j]:.12g}")
        return "\n".join(out) + "\n"


@dataclass(frozen=True, eq=False)
class BranchSet:
    """Disjunction of relaxations over a shared variable space."""

    system: AngleSystem
    branches: tuple

    def __post_init__(self):
        if not self.branches:
            raise ValueError("empty branch set")

    def __len__(self):
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)


class _RowBuf:
    def __init__(self, n):
        self.n = n
        self.rows = []
        self.rhs = []

    def add(self, coefs, rhs):
        """coefs: dict var->coef."""
        row = np.zeros(self.n)
        for j, c in coefs.items():
            row[j] += c
        self.rows.append(row)
        self.rhs.append(float(rhs))

    def add_le(self, coefs, hi):
        self.add(coefs, hi)

    def add_ge(self, coefs, lo):
        self.add({j: -c for j, c in coefs.items()}, -lo)

    def add_window(self, coefs, lo, hi):
        self.add_le(coefs, hi)
        self.add_ge(coefs, lo)

    def arrays(self):
        if not self.rows:
            return np.zeros((0, self.n)), np.zeros(0)
        return np.array(self.rows), np.array(self.rhs)


# ---------------------------------------------------------------------------
# first battery


def _tables_apply(d_window):
    lo, hi = tables.TABLE_D_WINDOW
    return lo <= d_window[0] and d_window[1] <= hi


def level1_constraints(sys: AngleSystem, d_window=D_WINDOW_13) -> BranchSet:
    """Vertex sums, triangle/quadrilateral equalities, the box, and the
    face polytope cuts; one branch per hexagon alternative.

    For distance windows outside the calibrated table range only the
    window-independent constraints are emitted.
    """
    g = sys.graph
    n = sys.n_vars
    d_lo, d_hi = float(d_window[0]), float(d_window[1])
    use_tables = _tables_apply(d_window)

    a_lo = geom.alpha(d_lo) - PAD
    a_hi = geom.alpha(d_hi) + PAD

    lo = np.full(n, a_lo)
    hi = np.full(n, math.pi - STRICT_EPS)
    lo[sys.alpha_index], hi[sys.alpha_index] = a_lo, a_hi
    lo[sys.d_index], hi[sys.d_index] = d_lo, d_hi

    eq = _RowBuf(n)
    for v in sorted(sys.incidence):
        ix = sys.incidence[v]
        if ix:
            eq.add({j: 1.0 for j in ix}, TWO_PI)
    for fi in sys.faces_of_size(3):
        for j in sys.face_vars[fi]:
            eq.add({j: 1.0, sys.alpha_index: -1.0}, 0.0)
    for fi in sys.faces_of_size(4):
        c = sys.face_vars[fi]
        eq.add({c[2]: 1.0, c[0]: -1.0}, 0.0)
        eq.add({c[3]: 1.0, c[1]: -1.0}, 0.0)

    ub = _RowBuf(n)
    quads = sys.faces_of_size(4)
    if quads:
        # a proper quadrilateral face forces the side below a right angle
        hi[sys.d_index] = min(hi[sys.d_index], math.pi / 2 - STRICT_EPS)
        q_lo, q_hi = _quad_sum_window(d_lo, hi[sys.d_index])
        if use_tables:
            q_lo = max(q_lo, tables.QUAD_SUM[0])
            q_hi = min(q_hi, tables.QUAD_SUM[1])
        for fi in quads:
            c = sys.face_vars[fi]
            ub.add_window({c[0]: 1.0, c[1]: 1.0}, q_lo, q_hi)

    if use_tables:
        for fi in sys.faces_of_size(5):
            _pentagon_rows(ub, sys.face_vars[fi])

    hexes = sys.faces_of_size(6)
    isolated = sorted(g.isolated)
    a_eq, b_eq = eq.arrays()

    branches = []
    for hosting, kvec, tag in _hex_alternatives(
            hexes, isolated, split_empty=use_tables):
        bub = _RowBuf(n)
        bub.rows = [r.copy() for r in ub.rows]
        bub.rhs = list(ub.rhs)
        blo, bhi = lo.copy(), hi.copy()
        if use_tables:
            for fi in hexes:
                c = sys.face_vars[fi]
                if fi in hosting:
                    bub.add_ge({j: 1.0 for j in c}, tables.HEX_HOST_SUM_LO)
                else:
                    k = kvec[fi]
                    small = (c[k], c[k + 3])
                    for j in small:
                        blo[j] = max(blo[j], tables.HEX_PAIR[0])
                        bhi[j] = min(bhi[j], tables.HEX_PAIR[1])
                    for j in c:
                        if j not in small:
                            blo[j] = max(blo[j], tables.HEX_BIG_LO)
                    bub.add_window({j: 1.0 for j in c}, *tables.HEX_SUM)
        a_ub, b_ub = bub.arrays()
        branches.append(LinearRelaxation(
            names=sys.names, lo=blo, hi=bhi,
            a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub,
            base_ub=len(b_ub), label=tag,
            meta={"hosting": tuple(sorted(hosting)),
                  "d_window": (d_lo, d_hi),
                  "tables": use_tables},
        ))
    return BranchSet(system=sys, branches=tuple(branches))


def _quad_sum_window(d_lo, d_hi):
    """Adjacent-corner sum of an equilateral spherical rhombus with side in
    [d_lo, d_hi]: minimal at the triangle-degenerate ends (3*alpha), maximal
    at the equal-angle rhombus (twice the reflection fixed point)."""
    return (3.0 * geom.alpha(d_lo) - PAD,
            2.0 * geom.rho_fixed_point(d_hi) + PAD)


def _pentagon_rows(ub, c):
    labelings = []
    for r in range(5):
        rot = c[r:] + c[:r]
        labelings.append(rot)
        labelings.append(rot[::-1])
    for lab in labelings:
        ub.add_window({lab[0]: 1.0, lab[1]: 1.0, lab[3]: -0.63},
                      tables.PENT_QUOTED_LO, tables.PENT_QUOTED_HI)
        ub.add_le({lab[0]: 1.0, lab[2]: 1.0, lab[1]: 1.8},
                  tables.PENT_QUOTED2_HI)
    ub.add_window({j: 1.0 for j in c}, *tables.PENT_SUM)
    for k in range(5):
        ub.add_ge({c[k]: 1.0, c[(k + 1) % 5]: 1.0}, tables.PENT_ADJ_LO)
        ub.add_ge({c[k]: 1.0, c[(k + 2) % 5]: 1.0}, tables.PENT_SKIP_LO)


def _hex_alternatives(hexes, isolated, split_empty=True):
    """(hosting set, k-choice per empty hexagon, label) triples.

    Every isolated vertex lies strictly inside some hexagonal face, so we
    branch over all assignments; hexagons left empty get the three-way
    small-pair alternative.  The small-pair split only matters when the
    calibrated boxes apply, so it collapses when split_empty is off."""
    if not isolated:
        assignments = [()]
    elif not hexes:
        return  # caller guarantees candidates were filtered; nothing to emit
    else:
        assignments = sorted(set(
            tuple(sorted(set(m)))
            for m in itertools.product(hexes, repeat=len(isolated))))
    for hosting in assignments:
        empty = [fi for fi in hexes if fi not in hosting]
        choices = range(3) if split_empty else (0,)
        for ks in itertools.product(choices, repeat=len(empty)):
            kvec = dict(zip(empty, ks))
            bits = [f"host=f{fi}" for fi in hosting]
            if split_empty:
                bits += [f"k[f{fi}]={k}" for fi, k in kvec.items()]
            yield set(hosting), kvec, ";".join(bits) or "plain"


# ---------------------------------------------------------------------------
# tightening pass


def _rho_du(u, d):
    # derivative of rho(u, d) in u; rho = 2*atan2(1, tan(u/2) cos d)
    t = math.tan(u / 2)
    c = math.cos(d)
    return -c * (1 + t * t) / (1 + t * t * c * c)


def _shrink(lo, hi, j, new_lo, new_hi):
    lo[j] = max(lo[j], new_lo)
    hi[j] = min(hi[j], new_hi)


def level2_tighten(relax: LinearRelaxation, sys: AngleSystem) -> LinearRelaxation:
    """Interval propagation through the face closure relations plus linear
    envelopes of the rhombus relation, all valid on the current box.

    Output box is contained in the input box.  When a clearance or an
    interior-fit test proves the whole box impossible the returned
    relaxation has a crossed box and a note naming the test.
    """
    if relax.infeasible_box:
        return relax
    lo, hi = relax.lo.copy(), relax.hi.copy()
    ai, di = sys.alpha_index, sys.d_index
    rows = _RowBuf(relax.n_vars)

    # alpha <-> d link (alpha increasing in d, defined for d < 2pi/3)
    _shrink(lo, hi, ai, geom.alpha(lo[di]) - PAD, geom.alpha(hi[di]) + PAD)
    if lo[ai] <= hi[ai]:
        amin = geom.alpha(1e-6)
        amax = geom.alpha(2.0 * math.pi / 3 - 1e-6)
        al = min(max(lo[ai], amin), amax)
        ah = min(max(hi[ai], amin), amax)
        _shrink(lo, hi, di,
                geom.alpha_inv(al) - PAD, geom.alpha_inv(ah) + PAD)
    for fi in sys.faces_of_size(3):
        for j in sys.face_vars[fi]:
            _shrink(lo, hi, j, lo[ai], hi[ai])
            _shrink(lo, hi, ai, lo[j], hi[j])

    use_envelopes = hi[di] < math.pi / 2  # rho monotone/concave range
    if use_envelopes and lo[di] < hi[di]:
        _alpha_d_rows(rows, ai, di, lo, hi)
    for fi in sys.faces_of_size(4):
        c = sys.face_vars[fi]
        for a, b in ((c[0], c[2]), (c[1], c[3])):  # opposite corners equal
            _shrink(lo, hi, a, lo[b], hi[b])
            _shrink(lo, hi, b, lo[a], hi[a])
        if not use_envelopes:
            continue
        for a, b in ((c[0], c[1]), (c[1], c[0])):
            # partner interval: rho decreasing in u, increasing in d
            if lo[a] <= hi[a]:
                _shrink(lo, hi, b,
                        geom.rho(hi[a], lo[di]) - PAD,
                        geom.rho(lo[a], hi[di]) + PAD)
            _quad_envelope_rows(rows, a, b, lo, hi, di)
        _quad_d_interval(lo, hi, c, di)
        q_lo, q_hi = _quad_sum_window(lo[di], hi[di])
        rows.add_window({c[0]: 1.0, c[1]: 1.0}, q_lo, q_hi)
        if lo[di] < hi[di]:
            _quad_sum_d_rows(rows, c, di, lo, hi)

    calibrated = relax.meta.get("tables", False) and not np.any(lo > hi)
    note = ""
    if calibrated:
        hosting = set(relax.meta.get("hosting", ()))
        for fi in sys.faces_of_size(5):
            note = _complete_propagate(sys, fi, lo, hi, di,
                                       tables.LIP_PENT_COMPLETE)
            if note:
                break
            note = _flip_test(sys, fi, lo, hi, di)
            if note:
                break
        if not note:
            for fi in sys.faces_of_size(6):
                note = _complete_propagate(sys, fi, lo, hi, di,
                                           tables.LIP_HEX_COMPLETE)
                if note:
                    break
                if fi in hosting:
                    note = _lambda_test(sys, fi, lo, hi, di)
                else:
                    note = _flip_test(sys, fi, lo, hi, di)
                if note:
                    break
    if note:
        lo[di], hi[di] = 1.0, 0.0

    a_tail, b_tail = rows.arrays()
    return replace(
        relax,
        lo=lo, hi=hi,
        a_ub=np.vstack([relax.a_ub[:relax.base_ub], a_tail]),
        b_ub=np.concatenate([relax.b_ub[:relax.base_ub], b_tail]),
        note=note or relax.note,
    )


def _tangent_under(rows, coefs, f, dm, di, scale=1.0):
    """coefs-weighted sum >= scale*f(d), f convex: tangent at dm is below."""
    h = 1e-6
    fp = scale * (f(dm + h) - f(dm - h)) / (2 * h)
    terms = dict(coefs)
    terms[di] = terms.get(di, 0.0) - fp
    rows.add_ge(terms, scale * f(dm) - fp * dm - PAD)


def _secant_over(rows, coefs, f, dl, dh, di, scale=1.0):
    """coefs-weighted sum <= scale*f(d), f convex: secant over [dl,dh] is
    above."""
    ms = scale * (f(dh) - f(dl)) / (dh - dl)
    terms = dict(coefs)
    terms[di] = terms.get(di, 0.0) - ms
    rows.add_le(terms, scale * f(dl) - ms * dl + PAD)


def _alpha_d_rows(rows, ai, di, lo, hi):
    """alpha = alpha(d), convex in d below pi/2: tangent and secant rows."""
    dm = 0.5 * (lo[di] + hi[di])
    _tangent_under(rows, {ai: 1.0}, geom.alpha, dm, di)
    _secant_over(rows, {ai: 1.0}, geom.alpha, lo[di], hi[di], di)


def _quad_sum_d_rows(rows, c, di, lo, hi):
    """3*alpha(d) <= c0 + c1 <= 2*rho_fixed_point(d); both outer functions
    are convex in d on the window."""
    dm = 0.5 * (lo[di] + hi[di])
    pair = {c[0]: 1.0, c[1]: 1.0}
    _tangent_under(rows, pair, geom.alpha, dm, di, scale=3.0)
    _secant_over(rows, pair, geom.rho_fixed_point, lo[di], hi[di], di,
                 scale=2.0)


def _quad_envelope_rows(rows, a, b, lo, hi, di):
    """u_b = rho(u_a, d): chord below (rho concave in u, increasing in d,
    so the chord at d_lo is a lower bound), tangent at d_hi an upper."""
    la, ha = lo[a], hi[a]
    if not la <= ha:
        return
    r_lo = geom.rho(la, lo[di])
    if ha - la > 1e-12:
        m = (geom.rho(ha, lo[di]) - r_lo) / (ha - la)
        rows.add_ge({b: 1.0, a: -m}, r_lo - m * la - PAD)
    um = 0.5 * (la + ha)
    mt = _rho_du(um, hi[di])
    rows.add_le({b: 1.0, a: -mt}, geom.rho(um, hi[di]) - mt * um + PAD)


def _quad_d_interval(lo, hi, c, di):
    """cos d = cot(u0/2) cot(u1/2) for the rhombus, decreasing in each
    corner below pi."""
    def cot_half(u):
        return 1.0 / math.tan(u / 2)
    cd_hi = cot_half(lo[c[0]]) * cot_half(lo[c[1]]) + PAD
    cd_lo = cot_half(hi[c[0]]) * cot_half(hi[c[1]]) - PAD
    if cd_lo > 1.0:
        lo[di], hi[di] = 1.0, 0.0
        return
    _shrink(lo, hi, di,
            math.acos(min(1.0, cd_hi)),
            math.acos(max(-1.0, cd_lo)))


def _box_corners(bounds):
    return itertools.product(*[(l, h) for l, h in bounds])


def _complete_propagate(sys, fi, lo, hi, di, lip):
    """Tighten the free corners of face fi from the closure map evaluated
    at the box corners of each anchor run, with a Lipschitz margin.

    Returns a note string when an intersection crosses (face cannot close
    anywhere over the box), else ''."""
    c = sys.face_vars[fi]
    m = len(c)
    n_in = m - 3
    complete = geom.pentagon_complete if m == 5 else geom.hexagon_complete
    labelings = []
    for r in range(m):
        rot = c[r:] + c[:r]
        labelings.append(rot)
        labelings.append((rot[0],) + tuple(reversed(rot[1:])))
    for lab in labelings:
        anchors = lab[:n_in]
        width = sum(hi[j] - lo[j] for j in anchors) + hi[di] - lo[di]
        if width > 2 * tables.GATE_COMPLETION or any(lo[j] > hi[j] for j in lab):
            continue
        margin = lip * width / 2 + PAD
        evals = []
        pts = list(_box_corners([(lo[j], hi[j]) for j in anchors]
                                + [(lo[di], hi[di])]))
        pts.append(tuple(0.5 * (lo[j] + hi[j]) for j in anchors)
                   + (0.5 * (lo[di] + hi[di]),))
        for p in pts:
            try:
                evals.append(complete(*p).angles[n_in:])
            except geom.InfeasibleGeometryError:
                pass
        if len(evals) < len(pts):
            # partial closure domain: the nearest-corner distance bound
            # needs every corner evaluated, so draw no conclusion
            continue
        arr = np.array(evals)
        for k, j in enumerate(lab[n_in:]):
            _shrink(lo, hi, j, arr[:, k].min() - margin, arr[:, k].max() + margin)
            if lo[j] > hi[j]:
                return f"closure[f{fi}]"
    return ""


def _clearance_stats(sys, fi, lo, hi, di, fn):
    """Evaluate fn over closure solutions at box corners; returns
    (list of per-eval values, margin width) or None when gated off."""
    c = sys.face_vars[fi]
    m = len(c)
    n_in = m - 3
    anchors = c[:n_in]
    width = sum(hi[j] - lo[j] for j in anchors) + hi[di] - lo[di]
    if width > 2 * tables.GATE_CLEARANCE or any(lo[j] > hi[j] for j in c):
        return None
    complete = geom.pentagon_complete if m == 5 else geom.hexagon_complete
    pts = list(_box_corners([(lo[j], hi[j]) for j in anchors]
                            + [(lo[di], hi[di])]))
    pts.append(tuple(0.5 * (lo[j] + hi[j]) for j in anchors)
               + (0.5 * (lo[di] + hi[di]),))
    vals = []
    for p in pts:
        try:
            vals.append(fn(complete(*p)))
        except geom.InfeasibleGeometryError:
            pass
    if len(vals) < len(pts):  # partial domain: no sound conclusion
        return None
    return vals, width


def _flip_test(sys, fi, lo, hi, di):
    """A face of an irreducible configuration has every corner flip land
    within d of a non-adjacent corner.  If some corner's flip clearance
    provably exceeds d over the whole box, the branch dies."""
    m = len(sys.face_vars[fi])

    def worst_clearance(sol):
        pts = sol.points
        best = -1.0
        for i in range(m):
            img = geom.flip_image(pts[i], pts[(i - 1) % m], pts[(i + 1) % m])
            nn = min(geom.angular_dist(img, pts[j]) for j in range(m)
                     if j not in ((i - 1) % m, i, (i + 1) % m))
            best = max(best, nn)
        return best

    got = _clearance_stats(sys, fi, lo, hi, di, worst_clearance)
    if got is None:
        return ""
    vals, width = got
    margin = tables.LIP_FLIP * width / 2
    if min(vals) - margin > hi[di] + PAD:
        return f"flip[f{fi}]"
    return ""


def _lambda_test(sys, fi, lo, hi, di):
    """A hexagon hosting an interior vertex must fit a point at distance
    >= d from all six corners; lambda is the best such radius."""
    got = _clearance_stats(sys, fi, lo, hi, di, geom.hexagon_lambda)
    if got is None:
        return ""
    vals, width = got
    margin = tables.LIP_LAMBDA * width / 2
    if max(vals) + margin < lo[di] - PAD:
        return f"lambda[f{fi}]"
    return ""
