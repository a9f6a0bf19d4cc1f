"""Spherical trigonometry kernels for contact-graph faces.

Everything works in radians on the unit sphere. The polygon builders
construct convex equilateral spherical polygons by explicit coordinate
walks, so closure, flip clearances and the isolated-vertex function all
share one code path.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi

UNIT_TOL = 1e-6


class GeomDomainError(ValueError):
    """Input outside the documented domain of a kernel."""


class InfeasibleGeometryError(ValueError):
    """No convex equilateral polygon exists for the requested data."""

    def __init__(self, condition, detail=""):
        self.condition = condition
        super().__init__(f"{condition}: {detail}" if detail else condition)


def _check_unit(p, name="point"):
    n = float(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])
    if abs(n - 1.0) > 2.0 * UNIT_TOL:
        raise GeomDomainError(f"{name} is not a unit vector (|v|^2 = {n})")


def angular_dist(p, q) -> float:
    """Angle between two unit vectors, stable near 0 and pi."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    _check_unit(p, "p")
    _check_unit(q, "q")
    c = np.cross(p, q)
    return math.atan2(float(np.linalg.norm(c)), float(p @ q))


def alpha(d: float) -> float:
    """Corner angle of the equilateral spherical triangle with side d."""
    if not 0.0 < d < TWO_PI / 3.0:
        raise GeomDomainError(f"alpha: d = {d} outside (0, 2pi/3)")
    cd = math.cos(d)
    return math.acos(cd / (1.0 + cd))


def alpha_inv(a: float) -> float:
    """Side of the equilateral triangle with corner angle a (inverse of alpha)."""
    if not 0.0 < a < math.pi:
        raise GeomDomainError(f"alpha_inv: a = {a} outside (0, pi)")
    ca = math.cos(a)
    # cos d = cos a / (1 - cos a); argument leaves [-1, 1] for tiny a
    den = 1.0 - ca
    if den <= 0.0 or not -1.0 <= ca / den <= 1.0:
        raise GeomDomainError(f"alpha_inv: no triangle with corner angle {a}")
    return math.acos(ca / den)


def rho(u: float, d: float) -> float:
    """Opposite angle of the equilateral spherical rhombus with side d.

    Defined by cot(u/2) cot(rho/2) = cos d; an involution in u, strictly
    decreasing in u and increasing in d.
    """
    if not 0.0 < u < math.pi:
        raise GeomDomainError(f"rho: u = {u} outside (0, pi)")
    if not 0.0 < d < math.pi / 2.0:
        raise GeomDomainError(f"rho: d = {d} outside (0, pi/2)")
    return 2.0 * math.atan2(1.0, math.tan(u / 2.0) * math.cos(d))


def rho_fixed_point(d: float) -> float:
    """Angle of the equilateral rhombus with all four angles equal (u = rho(u,d))."""
    if not 0.0 < d < math.pi / 2.0:
        raise GeomDomainError(f"rho_fixed_point: d = {d} outside (0, pi/2)")
    # cot(u/2)^2 = cos d  =>  tan(u/2) = 1/sqrt(cos d)
    return 2.0 * math.atan2(1.0, math.sqrt(math.cos(d)))


def flip_image(x, y, z):
    """Mirror image of x across the great circle through y and z."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    n = np.cross(y, z)
    nn = float(np.linalg.norm(n))
    if nn < 1e-9:
        raise GeomDomainError("flip_image: y and z span no great circle")
    n = n / nn
    return x - 2.0 * float(x @ n) * n


# ---------------------------------------------------------------------------
# polygon construction

def _rotate_tangent(p, t, ang):
    # ccw rotation of tangent t at point p
    return t * math.cos(ang) + np.cross(p, t) * math.sin(ang)


def _walk_edge(p, t, d):
    # move distance d along geodesic from p in direction t;
    # returns (endpoint, unit tangent at endpoint pointing back to p)
    return p * math.cos(d) + t * math.sin(d), p * math.sin(d) - t * math.cos(d)


def _interior_angle(pts, i):
    """Interior angle at vertex i; rotating the direction-to-next ccw by the
    interior angle gives the direction-to-prev."""
    m = len(pts)
    p = pts[i]
    ta = pts[(i - 1) % m] - (pts[(i - 1) % m] @ p) * p
    tb = pts[(i + 1) % m] - (pts[(i + 1) % m] @ p) * p
    na, nb = np.linalg.norm(ta), np.linalg.norm(tb)
    if na < 1e-12 or nb < 1e-12:
        raise InfeasibleGeometryError("degenerate-edge", f"vertex {i}")
    ang = math.atan2(float(np.cross(tb / nb, ta / na) @ p), float((tb / nb) @ (ta / na)))
    return ang if ang >= 0.0 else ang + TWO_PI


def circle_intersections(p, q, d):
    """Both intersection points of the radius-d circles about p and q.

    Empty list when the circles do not meet or the centers are (anti)parallel.
    """
    cd = math.cos(d)
    pq = float(p @ q)
    den = 1.0 + pq
    if den < 1e-12:
        return []
    a = cd / den
    n2 = 1.0 - 2.0 * a * a * den
    if n2 < 0.0:
        return []
    axis = np.cross(p, q)
    na = float(np.linalg.norm(axis))
    if na < 1e-12:
        return []
    g = math.sqrt(n2) / na
    base = a * (p + q)
    return [base + g * axis, base - g * axis]


def _build_polygon(m, known, d):
    """Convex equilateral spherical m-gon with side d and interior angles
    known[0..m-4] at consecutive vertices; returns (points, angles)."""
    if not 0.0 < d < math.pi:
        raise GeomDomainError(f"polygon: d = {d} outside (0, pi)")
    for i, u in known.items():
        if not 0.0 < u < math.pi:
            raise InfeasibleGeometryError("angle-range", f"u{i + 1} = {u} not in (0, pi)")
    pts = [None] * m
    pts[0] = np.array([0.0, 0.0, 1.0])
    t01 = np.array([1.0, 0.0, 0.0])
    pts[1], back1 = _walk_edge(pts[0], t01, d)
    t12 = _rotate_tangent(pts[1], back1, -known[1])
    pts[2], back2 = _walk_edge(pts[1], t12, d)
    last = 2
    if m == 6:
        t23 = _rotate_tangent(pts[2], back2, -known[2])
        pts[3], _ = _walk_edge(pts[2], t23, d)
        last = 3
    t0m = _rotate_tangent(pts[0], t01, +known[0])
    pts[m - 1], _ = _walk_edge(pts[0], t0m, d)
    # close the remaining vertex: distance d from both open ends
    meet = circle_intersections(pts[last], pts[m - 1], d)
    if not meet:
        raise InfeasibleGeometryError("no-closure", "closing circles do not intersect")
    for x in meet:
        cand = list(pts)
        cand[last + 1] = x
        try:
            angs = [_interior_angle(cand, i) for i in range(m)]
        except InfeasibleGeometryError:
            continue
        if any(abs(angular_dist(cand[i], cand[(i + 1) % m]) - d) > 1e-9 for i in range(m)):
            continue
        if any(abs(angs[i] - known[i]) > 1e-7 for i in known):
            continue
        if not all(0.0 < a < math.pi - 1e-9 for a in angs):
            continue
        # positive spherical excess rules out backwards/self-crossing walks
        if sum(angs) <= (m - 2) * math.pi + 1e-9:
            continue
        if _globally_convex(cand):
            return [np.asarray(v) for v in cand], angs
    raise InfeasibleGeometryError("non-convex", "no convex completion closes the polygon")


def _globally_convex(pts):
    # every vertex strictly on the interior side of every edge's great circle
    m = len(pts)
    ctr = np.sum(pts, axis=0)
    nc = float(np.linalg.norm(ctr))
    if nc < 1e-9:
        return False
    ctr = ctr / nc
    for i in range(m):
        n = np.cross(pts[i], pts[(i + 1) % m])
        if float(n @ ctr) < 0.0:
            n = -n
        for j in range(m):
            if j in (i, (i + 1) % m):
                continue
            if float(n @ pts[j]) < -1e-9:
                return False
    return True


class _PolygonSolution:
    """Angles and coordinates of a solved convex equilateral polygon."""

    def __init__(self, angles, d, points):
        self.angles = tuple(float(a) for a in angles)
        self.d = float(d)
        self.points = [np.asarray(p, dtype=float) for p in points]

    def __len__(self):
        return len(self.angles)

    def __repr__(self):
        names = ", ".join(f"u{i + 1}={a:.6f}" for i, a in enumerate(self.angles))
        return f"{type(self).__name__}({names}, d={self.d:.6f})"


class PentagonSolution(_PolygonSolution):
    @property
    def u1(self):
        return self.angles[0]

    @property
    def u2(self):
        return self.angles[1]

    @property
    def u3(self):
        return self.angles[2]

    @property
    def u4(self):
        return self.angles[3]

    @property
    def u5(self):
        return self.angles[4]


class HexagonSolution(_PolygonSolution):
    @property
    def u1(self):
        return self.angles[0]

    @property
    def u2(self):
        return self.angles[1]

    @property
    def u3(self):
        return self.angles[2]

    @property
    def u4(self):
        return self.angles[3]

    @property
    def u5(self):
        return self.angles[4]

    @property
    def u6(self):
        return self.angles[5]


def pentagon_complete(u1: float, u2: float, d: float) -> PentagonSolution:
    """Unique convex equilateral pentagon with side d and consecutive
    interior angles u1, u2 at its first two vertices."""
    pts, angs = _build_polygon(5, {0: u1, 1: u2}, d)
    return PentagonSolution(angs, d, pts)


def hexagon_complete(u1: float, u2: float, u3: float, d: float) -> HexagonSolution:
    """Unique convex equilateral hexagon with side d and consecutive
    interior angles u1, u2, u3."""
    pts, angs = _build_polygon(6, {0: u1, 1: u2, 2: u3}, d)
    return HexagonSolution(angs, d, pts)


def regular_polygon_angle(m: int, d: float) -> float:
    """Interior angle of the regular spherical m-gon with side d.

    From the circumradius relation cos d = cos^2 R + sin^2 R cos(2pi/m):
    half the interior angle satisfies sin(half) = cos(R)/cos(d/2) ... solved
    here by direct construction to stay on the single code path.
    """
    cd = math.cos(d)
    c2 = (cd - math.cos(TWO_PI / m)) / (1.0 - math.cos(TWO_PI / m))
    if c2 <= 0.0 or c2 >= 1.0:
        raise GeomDomainError(f"no regular {m}-gon with side {d}")
    r = math.acos(math.sqrt(c2))  # circumradius
    # interior angle from the isoceles triangle (center, v_i, v_i+1)
    cos_half = (math.cos(r) - math.cos(r) * cd) / (math.sin(r) * math.sin(d))
    if not -1.0 <= cos_half <= 1.0:
        raise GeomDomainError(f"no regular {m}-gon with side {d}")
    return 2.0 * math.acos(cos_half)


def _flip_clearance(sol, i):
    """d minus nothing: raw minimum distance from the flipped vertex i
    (0-based) to the other polygon vertices, neighbors included."""
    pts = sol.points
    m = len(pts)
    img = flip_image(pts[i], pts[(i - 1) % m], pts[(i + 1) % m])
    return min(angular_dist(img, pts[j]) for j in range(m) if j != i)


def pentagon_flip_clearance(i: int, sol: PentagonSolution) -> float:
    """Minimum distance from the flip image of vertex i (1-based) to the
    other pentagon vertices. Always <= d; < d means the flip is blocked."""
    if not 1 <= i <= 5:
        raise GeomDomainError(f"pentagon vertex index {i}")
    return _flip_clearance(sol, i - 1)


def hexagon_flip_clearance(i: int, sol: HexagonSolution) -> float:
    if not 1 <= i <= 6:
        raise GeomDomainError(f"hexagon vertex index {i}")
    return _flip_clearance(sol, i - 1)


def _interior_sign_test(pts):
    """Returns a predicate testing membership in the convex polygon."""
    m = len(pts)
    ctr = np.sum(pts, axis=0)
    ctr = ctr / np.linalg.norm(ctr)
    normals = []
    for i in range(m):
        n = np.cross(pts[i], pts[(i + 1) % m])
        s = float(n @ ctr)
        normals.append(n if s >= 0.0 else -n)

    def inside(x, tol=1e-9):
        return all(float(n @ x) >= -tol for n in normals)

    return inside


def hexagon_lambda(sol: HexagonSolution) -> float:
    """Best achievable clearance for a point inside the hexagon at distance
    exactly d from some vertex pair: max over such points of the minimum
    distance to the remaining four vertices. -inf when no interior point
    lies at distance d from two vertices."""
    pts = sol.points
    d = sol.d
    inside = _interior_sign_test(pts)
    best = -math.inf
    for i in range(6):
        for j in range(i + 1, 6):
            for x in circle_intersections(pts[i], pts[j], d):
                if not inside(x):
                    continue
                rest = min(angular_dist(x, pts[k]) for k in range(6) if k not in (i, j))
                best = max(best, rest)
    return best


def hexagon_lambda_points(sol: HexagonSolution):
    """The candidate point set behind hexagon_lambda, for diagnostics."""
    pts = sol.points
    d = sol.d
    inside = _interior_sign_test(pts)
    out = []
    for i in range(6):
        for j in range(i + 1, 6):
            for x in circle_intersections(pts[i], pts[j], d):
                if inside(x):
                    out.append(((i, j), x))
    return out


# ---------------------------------------------------------------------------
# admissible-region samplers
#
# The admissible shapes (faces that can occur in a jammed contact graph) are
# thin slivers: every vertex flip must land strictly within d of some
# non-adjacent polygon vertex. Rejection sampling from scratch essentially
# never hits them, so we random-walk outward from known admissible seeds.

def seed_pentagon(d: float):
    """Equal-angle rhombus with a triangle glued on one edge."""
    s = rho_fixed_point(d)
    a = alpha(d)
    return (s, s, s + a, a, s + a)

def seed_hexagon(d: float):
    """Equal-angle rhombus with triangles glued on opposite edges."""
    s = rho_fixed_point(d)
    a = alpha(d)
    return (s + a, a, s + a, s + a, a, s + a)


def _blocked(sol) -> bool:
    """All vertex flips land strictly within d of a non-adjacent vertex."""
    pts = sol.points
    m = len(pts)
    d = sol.d
    for i in range(m):
        img = flip_image(pts[i], pts[(i - 1) % m], pts[(i + 1) % m])
        nn = min(angular_dist(img, pts[j])
                 for j in range(m) if j not in ((i - 1) % m, i, (i + 1) % m))
        if not nn < d:
            return False
    return True


def _sample_walk(m, seed_fn, accept, count, rng, d_lo, d_hi, sigma=0.03):
    mid = 0.5 * (d_lo + d_hi)
    pool = [(*seed_fn(mid)[: m - 3], mid)]
    out = []
    attempts = 0
    cap = 4000 * count
    while len(out) < count and attempts < cap:
        attempts += 1
        base = pool[int(rng.integers(len(pool)))]
        frees = [base[k] + rng.normal(0.0, sigma) for k in range(m - 3)]
        d = float(min(max(base[-1] + rng.normal(0.0, 0.2 * sigma), d_lo), d_hi))
        try:
            if m == 5:
                sol = pentagon_complete(frees[0], frees[1], d)
            else:
                sol = hexagon_complete(frees[0], frees[1], frees[2], d)
        except (InfeasibleGeometryError, GeomDomainError):
            continue
        if min(sol.angles) < alpha(d) - 1e-9:
            continue
        if not accept(sol):
            continue
        out.append(sol)
        pool.append((*frees, d))
        if len(pool) > 50 * count:
            pool = pool[-50 * count:]
    return out


def sample_admissible_pentagons(count, rng, d_lo=0.9972, d_hi=1.021, sigma=0.03):
    """Random admissible pentagons: convex, equilateral, every angle >= alpha(d),
    every flip blocked."""
    return _sample_walk(5, seed_pentagon, _blocked, count, rng, d_lo, d_hi, sigma)


def sample_admissible_hexagons(count, rng, d_lo=0.9972, d_hi=1.021, sigma=0.03):
    """Random admissible empty hexagons (all flips blocked)."""
    return _sample_walk(6, seed_hexagon, _blocked, count, rng, d_lo, d_hi, sigma)


def sample_hosting_hexagons(count, rng, d_lo=0.9972, d_hi=1.021, sigma=0.05):
    """Random hexagons able to host an interior point at distance >= d from
    all six vertices (lambda >= d)."""

    def seed(d):
        u = regular_polygon_angle(6, d)
        return (u,) * 6

    def accept(sol):
        return hexagon_lambda(sol) >= sol.d

    return _sample_walk(6, seed, accept, count, rng, d_lo, d_hi, sigma)
