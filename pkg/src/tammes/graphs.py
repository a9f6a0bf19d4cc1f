"""Planar embedded graphs: plantri planar_code I/O, face traversal,
candidate filtering, contact-graph construction and isomorphism tests."""

import io
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import geom

PLANAR_CODE_HEADER = b">>planar_code<<"


class ParseError(ValueError):
    def __init__(self, msg, offset):
        self.offset = offset
        super().__init__(f"{msg} (byte offset {offset})")


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class PlanarEmbeddedGraph:
    """Vertices 0..n-1 with a clockwise rotation system.

    Faces are orbits of the face-traversal map on directed edges; isolated
    vertices take no part in the traversal.
    """

    n: int
    rotation: tuple  # tuple of tuples of neighbor indices, clockwise
    _faces: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        seen = set()
        for v, nbrs in enumerate(self.rotation):
            for w in nbrs:
                if not 0 <= w < self.n or w == v:
                    raise StructureError(f"bad neighbor {w} at vertex {v}")
                if (v, w) in seen:
                    raise StructureError(f"duplicate dart ({v},{w})")
                seen.add((v, w))
        for v, w in seen:
            if (w, v) not in seen:
                raise StructureError(f"dart ({v},{w}) has no reverse")
        object.__setattr__(self, "_faces", derive_faces(self))

    @property
    def isolated(self):
        return frozenset(v for v in range(self.n) if not self.rotation[v])

    @property
    def faces(self):
        return self._faces

    def degree(self, v):
        return len(self.rotation[v])

    @property
    def edge_count(self):
        return sum(len(nbrs) for nbrs in self.rotation) // 2

    def edges(self):
        return sorted({(min(v, w), max(v, w))
                       for v, nbrs in enumerate(self.rotation) for w in nbrs})

    def delete_edges(self, pairs):
        """New graph with the given undirected edges removed, rotation order
        otherwise preserved."""
        drop = {(min(a, b), max(a, b)) for a, b in pairs}
        missing = drop - set(self.edges())
        if missing:
            raise StructureError(f"cannot delete absent edges {sorted(missing)}")
        rot = tuple(
            tuple(w for w in nbrs if (min(v, w), max(v, w)) not in drop)
            for v, nbrs in enumerate(self.rotation)
        )
        return PlanarEmbeddedGraph(self.n, rot)

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g


def derive_faces(g) -> tuple:
    """Face cycles of the embedding.

    Next dart after (u -> v): the neighbor following u in clockwise order
    at v. Every directed edge is used exactly once over all faces.
    """
    nxt = {}
    for v, nbrs in enumerate(g.rotation):
        k = len(nbrs)
        for i, u in enumerate(nbrs):
            nxt[(u, v)] = (v, nbrs[(i + 1) % k])
    faces = []
    used = set()
    for dart in sorted(nxt):
        if dart in used:
            continue
        cycle = []
        cur = dart
        while cur not in used:
            used.add(cur)
            cycle.append(cur[0])
            cur = nxt[cur]
        if cur != dart:
            raise StructureError("face traversal does not close")
        faces.append(tuple(cycle))
    non_isolated = sum(1 for v in range(g.n) if g.rotation[v])
    edges = sum(len(nbrs) for nbrs in g.rotation) // 2
    if non_isolated and non_isolated - edges + len(faces) != 2:
        raise StructureError(
            f"Euler relation fails: V={non_isolated} E={edges} F={len(faces)}"
        )
    return tuple(faces)


# ---------------------------------------------------------------------------
# planar_code

def parse_planar_code(stream):
    """Lazily yield graphs from plantri planar_code bytes.

    Accepts a bytes object or a binary file object. Format: ASCII header,
    then per graph one byte n followed by n zero-terminated clockwise
    neighbor lists (1-based bytes).
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    head = stream.read(len(PLANAR_CODE_HEADER))
    if head != PLANAR_CODE_HEADER:
        raise ParseError("missing >>planar_code<< header", 0)
    offset = len(head)

    while True:
        b = stream.read(1)
        if b == b"":
            return
        n = b[0]
        offset += 1
        if n == 0:
            raise ParseError("graph with zero vertices", offset - 1)
        rot = []
        for v in range(n):
            nbrs = []
            while True:
                c = stream.read(1)
                if c == b"":
                    raise ParseError(f"truncated record (vertex {v + 1})", offset)
                offset += 1
                k = c[0]
                if k == 0:
                    break
                if k > n:
                    raise ParseError(f"neighbor index {k} out of range", offset - 1)
                nbrs.append(k - 1)
            rot.append(tuple(nbrs))
        yield PlanarEmbeddedGraph(n, tuple(rot))


def serialize_planar_code(graphs) -> bytes:
    out = bytearray(PLANAR_CODE_HEADER)
    for g in graphs:
        if g.n > 255:
            raise StructureError("planar_code limited to 255 vertices")
        out.append(g.n)
        for nbrs in g.rotation:
            out.extend(w + 1 for w in nbrs)
            out.append(0)
    return bytes(out)


def to_adjacency_text(g) -> str:
    """One vertex per line: clockwise neighbors, space separated (debug aid)."""
    return "\n".join(" ".join(str(w) for w in nbrs) for nbrs in g.rotation) + "\n"


def parse_adjacency_text(text) -> PlanarEmbeddedGraph:
    rows = text.splitlines()
    rot = tuple(tuple(int(w) for w in line.split()) for line in rows)
    return PlanarEmbeddedGraph(len(rot), rot)


# ---------------------------------------------------------------------------
# candidate filtering

@dataclass(frozen=True)
class CandidateReport:
    passed: bool
    violations: tuple

    def __bool__(self):
        return self.passed


def candidate_filter(g, degree_cap=5, face_cap=6) -> CandidateReport:
    """Combinatorial necessary conditions for a jammed contact graph.

    Non-isolated vertices need degree 3..degree_cap (a lower-degree vertex
    could shift); faces are convex polygons of 3..face_cap vertices; every
    isolated vertex needs its own face big enough to keep distance d from
    all face vertices, which forces a distinct hexagon when face_cap is 6.
    """
    violations = []
    for v in range(g.n):
        deg = g.degree(v)
        if deg != 0 and not 3 <= deg <= degree_cap:
            violations.append("degree")
            break
    for f in g.faces:
        if not 3 <= len(f) <= face_cap:
            violations.append("face-size")
            break
    n_isolated = len(g.isolated)
    if n_isolated:
        hexes = sum(1 for f in g.faces if len(f) == 6)
        if face_cap < 6 or n_isolated > hexes:
            violations.append("isolated-vertex")
    return CandidateReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# contact graphs

def contact_graph(points, tol=1e-9) -> PlanarEmbeddedGraph:
    """Graph joining point pairs at the minimum pairwise distance.

    Rotation system read off the sphere: neighbors ordered by bearing
    around each vertex.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    n = len(pts)
    if n < 2:
        raise StructureError("need at least two points")
    dmin = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            dist = geom.angular_dist(pts[i], pts[j])
            if dist < 1e-9:
                raise StructureError(f"points {i} and {j} coincide")
            dmin = min(dmin, dist)
    rot = []
    for i in range(n):
        nbrs = [j for j in range(n) if j != i
                and geom.angular_dist(pts[i], pts[j]) <= dmin + tol]
        # bearing sort; clockwise system means descending angle
        p = pts[i]
        ref = pts[nbrs[0]] if nbrs else None
        if nbrs:
            e1 = ref - (ref @ p) * p
            e1 = e1 / np.linalg.norm(e1)
            e2 = np.cross(p, e1)

            def bearing(j):
                w = pts[j] - (pts[j] @ p) * p
                return -math.atan2(float(w @ e2), float(w @ e1))

            nbrs.sort(key=bearing)
        rot.append(tuple(nbrs))
    return PlanarEmbeddedGraph(n, tuple(rot))


def isomorphic(g1, g2) -> bool:
    """Abstract graph isomorphism (embedding ignored)."""
    if g1.n != g2.n or g1.edge_count != g2.edge_count:
        return False
    if sorted(map(len, g1.rotation)) != sorted(map(len, g2.rotation)):
        return False
    return nx.is_isomorphic(g1.to_networkx(), g2.to_networkx())


# edge deletions producing the three near-optimal variants, in build_P13
# vertex numbering; reconciled once against the degenerate configurations
# each variant contracts back to (see cases.angle_chain tests)
GAMMA_DELETIONS = {
    1: ((8, 11),),
    2: ((4, 6), (8, 11)),
    3: ((11, 1), (11, 4), (11, 8), (11, 10)),
}


def gamma13_fixtures():
    """The optimal contact graph and its three pruning survivors.

    Built on demand: the base graph from the optimal coordinates, the
    variants by recorded edge deletions.
    """
    from . import cases

    g0 = contact_graph(cases.build_P13())
    out = [g0]
    for i in (1, 2, 3):
        out.append(g0.delete_edges(GAMMA_DELETIONS[i]))
    return out
