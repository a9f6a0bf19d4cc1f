"""Final analysis: the closed-form optimum, the angle-chain evaluator for
the two-square family, monotonicity eliminations of the three pruning
survivors, and construction of the optimal 13-point configuration."""

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import geom
from .geom import TWO_PI, alpha, rho

HALF_PI = math.pi / 2.0

# separation window: everything of interest lives in [delta13 - eps, 1.021]
D_LO = 0.9972
D_HI = 1.021


class ChainDomainError(ValueError):
    """An intermediate chain angle left (0, pi)."""

    def __init__(self, name, value):
        self.name = name
        self.value = value
        super().__init__(f"{name} = {value} outside (0, pi)")


def _bisect(f, lo, hi, tol=1e-13, maxit=200):
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise ValueError(f"root not bracketed on [{lo}, {hi}]")
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if (flo < 0.0) != (fm < 0.0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _bracket_bisect(f, lo, hi, n=48, tol=1e-13, hint=None):
    """Root of f on [lo, hi]: scan for a sign change, then bisect.

    Samples where f raises a domain error are skipped. With several sign
    changes the one nearest `hint` wins.
    """
    xs = np.linspace(lo, hi, n + 1)
    best = None
    prev = None
    for x in xs:
        try:
            fx = f(x)
        except (ChainDomainError, ValueError):
            prev = None
            continue
        if fx == 0.0:
            return float(x)
        if prev is not None and (fx < 0.0) != (prev[1] < 0.0):
            cand = (prev[0], float(x))
            if best is None:
                best = cand
            elif hint is not None:
                if abs(0.5 * (cand[0] + cand[1]) - hint) < abs(0.5 * (best[0] + best[1]) - hint):
                    best = cand
        prev = (float(x), fx)
    if best is None:
        raise ValueError(f"no sign change of {getattr(f, '__name__', 'f')} on [{lo}, {hi}]")
    return _bisect(f, best[0], best[1], tol=tol)


def solve_delta13():
    """The optimal separation for 13 points and its triangle angle.

    a solves 2 tan(3pi/8 - a/4) = (1 - 2 cos a)/cos^2 a on [60, 80] degrees;
    d then satisfies cos d = cos a / (1 - cos a).
    """

    def eq(a):
        ca = math.cos(a)
        return 2.0 * math.tan(3.0 * math.pi / 8.0 - a / 4.0) - (1.0 - 2.0 * ca) / (ca * ca)

    a13 = _bisect(eq, math.radians(60.0), math.radians(80.0), tol=1e-12)
    d13 = math.acos(math.cos(a13) / (1.0 - math.cos(a13)))
    return a13, d13


A13, D13 = solve_delta13()


# ---------------------------------------------------------------------------
# angle chain

_CHAIN_SIZE = 19


@dataclass(frozen=True)
class AngleChain:
    u: tuple  # u[0] .. u[18]
    d: float

    def __getitem__(self, i):
        return self.u[i]

    def __getattr__(self, name):
        if name.startswith("u") and name[1:].isdigit():
            return self.u[int(name[1:])]
        raise AttributeError(name)


def angle_chain(u1: float, u2: float, d: float) -> AngleChain:
    """All face-corner angles of the two-square family as functions of
    (u1, u2, d).

    Derivation order follows the rhombus relation and the vertex sums; the
    rhombus partner of u14 is read as rho(u14, d), matching every other
    rhombus row. u17 and u18 are the corners the two triangles would need
    at the over-determined vertices; they equal u0 exactly on the rigid
    configuration.
    """
    u = [0.0] * _CHAIN_SIZE

    def put(i, val):
        if not 0.0 < val < math.pi:
            raise ChainDomainError(f"u{i}", val)
        u[i] = val

    put(0, alpha(d))
    put(1, u1)
    put(2, u2)
    put(5, rho(u[1], d))
    put(6, rho(u[2], d))
    put(9, TWO_PI - u[5] - u[6])
    put(13, rho(u[9], d))
    put(14, TWO_PI - u[0] - u[13] - u[2])
    put(10, rho(u[14], d))
    put(7, TWO_PI - u[6] - u[10])
    put(3, rho(u[7], d))
    put(4, TWO_PI - u[1] - u[2] - u[3])
    put(8, rho(u[4], d))
    put(11, TWO_PI - u[7] - u[8])
    put(12, TWO_PI - u[8] - u[5])
    put(15, rho(u[11], d))
    put(16, rho(u[12], d))
    put(17, TWO_PI - u[1] - u[13] - u[16])
    put(18, TWO_PI - u[14] - u[3] - u[15])
    return AngleChain(tuple(u), d)


def closure_residual(u1: float, u2: float, d: float) -> float:
    """Angle-sum defect at the one vertex the chain does not close by
    construction: u0 + u15 + u4 + u16 - 2pi."""
    ch = angle_chain(u1, u2, d)
    return ch[0] + ch[15] + ch[4] + ch[16] - TWO_PI


def corner_defect(u1: float, u2: float, d: float) -> float:
    """Defect of the second over-determined vertex: u0 - u17. Zero exactly
    when the triangle at that vertex closes (u1 + u13 + u0 + u16 = 2pi)."""
    ch = angle_chain(u1, u2, d)
    return ch[0] - ch[17]


# vectorized chain for region scans: no exceptions, validity mask instead

def _rho_v(u, d):
    return 2.0 * np.arctan2(1.0, np.tan(0.5 * u) * np.cos(d))


def _chain_arrays(u1, u2, d):
    cd = np.cos(d)
    u = [None] * _CHAIN_SIZE
    u[0] = np.arccos(cd / (1.0 + cd))
    u[1] = u1 + 0.0 * u[0]
    u[2] = u2 + 0.0 * u[0]
    u[5] = _rho_v(u[1], d)
    u[6] = _rho_v(u[2], d)
    u[9] = TWO_PI - u[5] - u[6]
    u[13] = _rho_v(u[9], d)
    u[14] = TWO_PI - u[0] - u[13] - u[2]
    u[10] = _rho_v(u[14], d)
    u[7] = TWO_PI - u[6] - u[10]
    u[3] = _rho_v(u[7], d)
    u[4] = TWO_PI - u[1] - u[2] - u[3]
    u[8] = _rho_v(u[4], d)
    u[11] = TWO_PI - u[7] - u[8]
    u[12] = TWO_PI - u[8] - u[5]
    u[15] = _rho_v(u[11], d)
    u[16] = _rho_v(u[12], d)
    u[17] = TWO_PI - u[1] - u[13] - u[16]
    u[18] = TWO_PI - u[14] - u[3] - u[15]
    ok = np.ones(np.broadcast(u1, u2, d).shape, dtype=bool)
    for ui in u:
        ok &= (ui > 0.0) & (ui < math.pi)
    return u, ok


def _closure_arrays(u1, u2, d):
    u, ok = _chain_arrays(u1, u2, d)
    r = u[0] + u[15] + u[4] + u[16] - TWO_PI
    return np.where(ok, r, np.nan)


def _solve_closure_d(u1, u2, lo=0.95, hi=1.08, iters=60):
    """Per-point bisection of the closure residual in d, vectorized.

    Returns (d, ok); points without a bracketed sign change come back with
    ok False.
    """
    shape = np.broadcast(u1, u2).shape
    lo_a = np.full(shape, float(lo))
    hi_a = np.full(shape, float(hi))
    rlo = _closure_arrays(u1, u2, lo_a)
    rhi = _closure_arrays(u1, u2, hi_a)
    ok = np.isfinite(rlo) & np.isfinite(rhi) & ((rlo < 0.0) != (rhi < 0.0))
    for _ in range(iters):
        mid = 0.5 * (lo_a + hi_a)
        rm = _closure_arrays(u1, u2, mid)
        same = np.isfinite(rm) & ((rm < 0.0) == (rlo < 0.0))
        lo_a = np.where(same, mid, lo_a)
        rlo = np.where(same, rm, rlo)
        hi_a = np.where(same, hi_a, mid)
    return 0.5 * (lo_a + hi_a), ok


# ---------------------------------------------------------------------------
# face layout of the optimal contact graph
#
# Face cycles and the assignment of chain angles to face corners; vertex 2
# is the center of the four rhombi. Frozen after a one-time numerical
# reconciliation: at (90deg, 90deg, D13) every corner below matches the
# measured corner angle of the realized configuration to 5e-15.

FACES13 = {
    0: (12, 1, 0, 2),
    1: (3, 4, 1, 12),
    2: (4, 3, 6),
    3: (3, 7, 5, 6),
    4: (4, 6, 8, 11),
    5: (9, 2, 0, 10),
    6: (5, 7, 2, 9),
    7: (10, 0, 1, 11),
    8: (8, 6, 5),
    9: (11, 8, 10),
    10: (3, 12, 2, 7),
    11: (5, 9, 10, 8),
    12: (4, 11, 1),
}

# the vertex the isolated-vertex variant frees, with its four contacts
FREE_VERTEX = 11
FREE_CONTACTS = (1, 4, 8, 10)


def corner_table(ch: AngleChain) -> dict:
    """(face, vertex) -> interior angle, covering every corner of the
    13-vertex layout. Rhombus corners alternate between a chain angle and
    its partner along the cycle; triangle corners all equal u0; the square
    corners absorb what the surrounding rhombi and triangles leave."""
    u = ch.u
    t = {}

    def quad(face, x, y):
        vs = FACES13[face]
        t[(face, vs[0])] = x
        t[(face, vs[1])] = y
        t[(face, vs[2])] = x
        t[(face, vs[3])] = y

    quad(0, u[8], u[4])
    quad(1, u[16], u[12])
    quad(3, u[13], u[9])
    quad(5, u[7], u[3])
    quad(6, u[2], u[6])
    quad(7, u[15], u[11])
    quad(10, u[1], u[5])
    quad(11, u[14], u[10])
    t[(4, 4)] = TWO_PI - u[12] - 2 * u[0]
    t[(4, 6)] = TWO_PI - u[9] - 2 * u[0]
    t[(4, 8)] = TWO_PI - u[10] - 2 * u[0]
    t[(4, 11)] = TWO_PI - u[11] - 2 * u[0]
    for face, vs in FACES13.items():
        if len(vs) == 3:
            for v in vs:
                t[(face, v)] = u[0]
    return t


def realize_faces(faces: dict, corner: dict, d: float, start) -> dict:
    """Coordinates from a face-gluing walk.

    faces: face id -> vertex cycle; corner: (face, vertex) -> interior
    angle; start: a directed edge (a, b) placed at the north pole pointing
    along x. Positions follow by walking edges of length d and rotating
    tangents around vertices by corner angles. Every vertex needs a full
    rotation, so boundary-less face sets must include their hole as a face.
    Returns vertex -> unit vector.
    """
    nxt = {}
    for fi, cyc in faces.items():
        m = len(cyc)
        for k in range(m):
            a, v, c = cyc[(k - 1) % m], cyc[k], cyc[(k + 1) % m]
            nxt[(v, a)] = (c, corner[(fi, v)])

    pos = {}
    tan = {}
    v0, w0 = start
    pos[v0] = np.array([0.0, 0.0, 1.0])
    tan[(v0, w0)] = np.array([1.0, 0.0, 0.0])

    def fill_around(v, a):
        p = pos[v]
        cur = a
        while True:
            c, ang = nxt[(v, cur)]
            if (v, c) in tan:
                break
            t = tan[(v, cur)]
            tan[(v, c)] = t * math.cos(ang) + np.cross(p, t) * math.sin(ang)
            cur = c

    fill_around(v0, w0)
    queue = deque([v0])
    while queue:
        a = queue.popleft()
        for (x, b) in list(tan):
            if x != a or b in pos:
                continue
            pa = pos[a]
            t = tan[(a, b)]
            pos[b] = pa * math.cos(d) + t * math.sin(d)
            tan[(b, a)] = pa * math.sin(d) - t * math.cos(d)
            fill_around(b, a)
            queue.append(b)
    return pos


def _check_edges(faces, pos, d, tol=1e-8):
    for cyc in faces.values():
        m = len(cyc)
        for k in range(m):
            a, b = cyc[k], cyc[(k + 1) % m]
            err = geom.angular_dist(pos[a], pos[b]) - d
            if abs(err) > tol:
                raise RuntimeError(f"edge ({a},{b}) off by {err:.3e}")


def build_P13():
    """The optimal 13-point configuration as unit vectors."""
    ch = angle_chain(HALF_PI, HALF_PI, D13)
    pos = realize_faces(FACES13, corner_table(ch), D13, start=(2, 0))
    _check_edges(FACES13, pos, D13)
    return [pos[i] for i in range(13)]


# ---------------------------------------------------------------------------
# case analyses


@dataclass
class CaseVerdict:
    case_id: str
    conclusion: str  # "eliminated" | "optimal" | "inconclusive"
    evidence: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(
            {"case": self.case_id, "conclusion": self.conclusion, "evidence": self.evidence},
            indent=2, sort_keys=True)


_U_LO = 1.1
_U_HI = 2.1


def _case1_point(d):
    """(u1, u2) of the one-missing-contact family: the closure residual and
    the corner defect both vanish at this separation."""

    def u2_of(u1):
        return _bracket_bisect(lambda x: closure_residual(u1, x, d),
                               _U_LO, _U_HI, hint=HALF_PI)

    u1 = _bracket_bisect(lambda x: corner_defect(x, u2_of(x), d),
                         _U_LO, _U_HI, hint=HALF_PI)
    return u1, u2_of(u1)


def _case1_point_seeded(d, seed):
    """Newton step of the joint system from a nearby solution; falls back
    to the scanning solver when it leaves the branch."""
    from scipy.optimize import root

    def system(z):
        try:
            return [closure_residual(z[0], z[1], d),
                    corner_defect(z[0], z[1], d)]
        except (ChainDomainError, ValueError):
            return [1.0, 1.0]

    res = root(system, seed, method="hybr", tol=1e-13)
    u1, u2 = (float(v) for v in res.x)
    if (res.success and _U_LO <= u1 <= _U_HI and _U_LO <= u2 <= _U_HI
            and abs(closure_residual(u1, u2, d)) < 1e-11
            and abs(corner_defect(u1, u2, d)) < 1e-11):
        return u1, u2
    return _case1_point(d)


def _u18_tracker():
    """u18(d) evaluator that reuses the previous (u1, u2) as a seed; the
    family is a smooth branch so continuation stays on it."""
    state = {"seed": None}

    def f(d):
        seed = state["seed"]
        u1, u2 = _case1_point(d) if seed is None else _case1_point_seeded(d, seed)
        state["seed"] = (u1, u2)
        return float(angle_chain(u1, u2, d)[18])

    return f


def case1_u18(d: float) -> float:
    """Apex angle of the pentagon created by one missing contact, as a
    function of d alone."""
    if not D_LO - 1e-12 <= d <= D_HI + 1e-12:
        raise ValueError(f"d = {d} outside [{D_LO}, {D_HI}]")
    u1, u2 = _case1_point(d)
    if abs(closure_residual(u1, u2, d)) > 1e-10 or abs(corner_defect(u1, u2, d)) > 1e-10:
        raise ValueError(f"joint solve stalled at d = {d}")
    return angle_chain(u1, u2, d)[18]


def case1_analysis(step: float = 1e-4) -> CaseVerdict:
    """The one-missing-contact family cannot reach any separation above the
    optimum: its apex angle u18(d) decreases in d, so the missing contact
    (which needs u18 >= alpha(d)) forces d below the crossing point, and
    the crossing point is the optimum itself."""
    ds = np.arange(D_LO, D_HI + step / 2, step)
    ds = ds[ds <= D_HI + 1e-12]
    track = _u18_tracker()
    vals = [track(d) for d in ds]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    crossing = _bisect(lambda d: track(d) - alpha(d), D_LO, 1.001, tol=1e-12)
    return CaseVerdict(
        "one-edge-removed",
        "eliminated",
        {
            "step": float(step),
            "d_lo": float(ds[0]),
            "d_hi": float(ds[-1]),
            "samples": len(vals),
            "monotone_decreasing": bool(decreasing),
            "u18_at_ends": [float(vals[0]), float(vals[-1])],
            "u18_equals_alpha_at": float(crossing),
            "distance_to_d13": float(abs(crossing - D13)),
        },
    )


def case2_region_scan(resolution: float = 0.001, halfwidth=math.radians(20.0)) -> CaseVerdict:
    """Scan the (u1, u2) plane of the two-missing-contact family.

    For each grid point d solves the closure equation. Admissible points
    need both triangle corners at least u0 (the two missing contacts) and
    alpha(d) at least the optimal triangle angle. The admissible set
    collapses onto the single point (90deg, 90deg) as the grid refines.
    """
    c = HALF_PI
    k = int(round(halfwidth / resolution))
    grid = c + resolution * np.arange(-k, k + 1)
    U1 = grid[:, None]
    U2 = grid[None, :]
    d, ok = _solve_closure_d(U1, U2)
    u, valid = _chain_arrays(U1, U2, d)
    tol = 1e-9
    in_d1 = (u[17] >= u[0] - tol) & (u[18] >= u[0] - tol)
    in_d2 = u[0] >= A13 - tol
    members = ok & valid & in_d1 & in_d2
    i1, i2 = np.nonzero(members)
    pts = [(float(grid[a]), float(grid[b]), float(d[a, b])) for a, b in zip(i1, i2)]
    if pts:
        ext1 = grid[i1].max() - grid[i1].min()
        ext2 = grid[i2].max() - grid[i2].min()
        diameter = float(max(ext1, ext2))
        dev = max(max(abs(p[0] - c), abs(p[1] - c)) for p in pts)
    else:
        diameter = math.inf
        dev = math.inf
    contains_center = bool(members[k, k])
    okverdict = contains_center and diameter <= 3.0 * resolution
    return CaseVerdict(
        "two-edges-removed",
        "optimal" if okverdict else "inconclusive",
        {
            "resolution": float(resolution),
            "halfwidth": float(halfwidth),
            "grid_points": int(members.size),
            "solve_failures": int(np.count_nonzero(~ok)),
            "members": len(pts),
            "diameter": diameter,
            "max_deviation_from_right_angle": float(dev),
            "contains_right_angle_point": contains_center,
            "d_at_center": float(d[k, k]),
            "witness": pts[:8],
        },
    )


# --- isolated-vertex variant -----------------------------------------------

_HOLE = -1
_HOLE_CYCLE = (4, 6, 8, 10, 0, 1)


def _hole_frame(ch: AngleChain):
    """Faces and corners of the 12-vertex frame left after removing the
    free vertex. The hexagonal hole joins as a face whose corners absorb
    the leftover rotation at each boundary vertex, so every rotation is
    complete and the gluing walk goes through."""
    u = ch.u
    faces = {fi: cyc for fi, cyc in FACES13.items() if FREE_VERTEX not in cyc}
    corner = {k: v for k, v in corner_table(ch).items() if k[0] in faces}
    faces[_HOLE] = _HOLE_CYCLE
    corner[(_HOLE, 4)] = TWO_PI - u[12] - u[0]
    corner[(_HOLE, 6)] = TWO_PI - u[9] - 2 * u[0]
    corner[(_HOLE, 8)] = TWO_PI - u[10] - u[0]
    corner[(_HOLE, 10)] = TWO_PI - u[3] - u[14]
    corner[(_HOLE, 0)] = u[11]
    corner[(_HOLE, 1)] = TWO_PI - u[4] - u[16]
    return faces, corner


def _case3_frame(u1, d):
    """Realize the 12-vertex frame at (u1, d), with u2 solved from the
    corner defect (the triangle at the over-determined vertex must close;
    the closure residual is no longer a constraint because the hole's
    corner there is free)."""
    u2 = _bracket_bisect(lambda x: corner_defect(u1, x, d), _U_LO, _U_HI, hint=HALF_PI)
    ch = angle_chain(u1, u2, d)
    faces, corner = _hole_frame(ch)
    pos = realize_faces(faces, corner, d, start=(2, 0))
    _check_edges(faces, pos, d)
    return pos


def _place_free_vertex(pos, d):
    """The free vertex sits in the hole at distance d from two of its
    contacts; of the two circle intersections, the one clear of the frame
    is the hole side."""
    cands = geom.circle_intersections(pos[4], pos[8], d)
    if not cands:
        raise ValueError("free-vertex contact circles do not meet")
    return max(cands, key=lambda p: min(geom.angular_dist(p, q) for q in pos.values()))


def _case3_contact_residual(u1, d):
    pos = _case3_frame(u1, d)
    x = _place_free_vertex(pos, d)
    return geom.angular_dist(x, pos[10]) - d


def case3_u19(d: float) -> float:
    """Pentagon corner angle for the isolated-vertex variant, second
    arrangement of the loose contact.

    The free vertex keeps three contacts; pinning it to two and closing the
    third fixes the frame's last degree of freedom, and u19 is the angle at
    the shared neighbor between the free vertex and the loose one. The
    loose contact needs u19 >= alpha(d)."""
    if not D_LO - 1e-12 <= d <= D_HI + 1e-12:
        raise ValueError(f"d = {d} outside [{D_LO}, {D_HI}]")
    u1 = _bracket_bisect(lambda x: _case3_contact_residual(x, d),
                         _U_LO, _U_HI, hint=HALF_PI)
    pos = _case3_frame(u1, d)
    x = _place_free_vertex(pos, d)
    return _vertex_angle(pos[4], x, pos[1])


def _vertex_angle(p, q1, q2):
    a = q1 - (q1 @ p) * p
    b = q2 - (q2 @ p) * p
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return math.acos(max(-1.0, min(1.0, float(a @ b))))


def _u19_tracker():
    """u19(d) evaluator reusing the previous contact root as a seed.

    Roots of the contact residual are isolated at the 0.02 scale, so a
    sign change within 5e-3 of the last root is its continuation; on any
    miss we fall back to the full scan."""
    from scipy.optimize import brentq

    state = {"seed": None}

    def solve(d):
        seed = state["seed"]
        if seed is not None:
            lo, hi = seed - 5e-3, seed + 5e-3
            try:
                if (_case3_contact_residual(lo, d) < 0.0) != (
                        _case3_contact_residual(hi, d) < 0.0):
                    return float(brentq(
                        lambda x: _case3_contact_residual(x, d),
                        lo, hi, xtol=1e-14))
            except (ChainDomainError, ValueError):
                pass
        return _bracket_bisect(lambda x: _case3_contact_residual(x, d),
                               _U_LO, _U_HI, hint=HALF_PI)

    def f(d):
        u1 = solve(d)
        state["seed"] = u1
        pos = _case3_frame(u1, d)
        x = _place_free_vertex(pos, d)
        return _vertex_angle(pos[4], x, pos[1])

    return f


def case3_analysis(step: float = 1e-4) -> CaseVerdict:
    """Isolated-vertex variant: both arrangements of the loose contact.

    At a best placement the free vertex pins against three of its four
    potential contacts. Up to symmetry of the layout that leaves two
    arrangements; the first is the one-missing-contact family, the second
    is handled here: u19(d) decreases and equals the triangle angle only
    at the optimum, so no separation above it is possible."""
    first = case1_analysis(step)
    ds = np.arange(D_LO, D_HI + step / 2, step)
    ds = ds[ds <= D_HI + 1e-12]
    track = _u19_tracker()
    vals = [track(d) for d in ds]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    crossing = _bisect(lambda d: track(d) - alpha(d), D_LO, 1.001, tol=1e-12)
    above = max(v - A13 for v, d in zip(vals, ds) if d >= D13 + 1e-9)
    return CaseVerdict(
        "isolated-vertex",
        "eliminated",
        {
            "subcase1": first.evidence,
            "step": float(step),
            "samples": len(vals),
            "u19_monotone_decreasing": bool(decreasing),
            "u19_at_ends": [float(vals[0]), float(vals[-1])],
            "u19_equals_alpha_at": float(crossing),
            "distance_to_d13": float(abs(crossing - D13)),
            "u19_minus_a13_max_above_optimum": float(above),
        },
    )


# ---------------------------------------------------------------------------
# exports

def coordinates_text(points) -> str:
    lines = []
    for p in points:
        lines.append(" ".join(f"{x:.17g}" for x in p))
    return "\n".join(lines) + "\n"


def spherical_text(points) -> str:
    """Latitude/longitude form, degrees."""
    lines = []
    for p in points:
        lat = math.degrees(math.asin(max(-1.0, min(1.0, float(p[2])))))
        lon = math.degrees(math.atan2(float(p[1]), float(p[0])))
        lines.append(f"{lat:.12f} {lon:.12f}")
    return "\n".join(lines) + "\n"


def u18_curve(n=50):
    """Plot-ready table of the pentagon apex angle against d."""
    ds = np.linspace(D_LO, D_HI, n)
    track = _u18_tracker()
    return [(float(d), track(d)) for d in ds]
