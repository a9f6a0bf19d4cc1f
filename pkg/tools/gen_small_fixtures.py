"""Generate the planar_code fixture files under tests/fixtures/.

Small-N streams: every connected planar graph on n vertices (one
isomorphism class each, from the networkx atlas) with an embedding from
the planarity test.  The 13-vertex candidate file: the four known
survivor graphs plus eliminated variants (single contact deletions that
create a pentagonal face) plus small stage exercisers.

Run from the repository root:  python tools/gen_small_fixtures.py
"""
import sys
from pathlib import Path

import networkx as nx

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tammes import cases, graphs  # noqa: E402

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def _embed(G):
    ok, emb = nx.check_planarity(G)
    if not ok:
        return None
    data = emb.get_data()
    rot = tuple(tuple(data[v]) for v in sorted(G.nodes))
    return graphs.PlanarEmbeddedGraph(G.number_of_nodes(), rot)


def small_planar_graphs(n):
    """One embedded representative per connected planar graph on n vertices."""
    out = []
    for G in nx.graph_atlas_g():
        if G.number_of_nodes() != n or not nx.is_connected(G):
            continue
        g = _embed(nx.convert_node_labels_to_integers(G))
        if g is not None:
            out.append(g)
    return out


# single deletions that merge a triangle into a neighboring quadrilateral;
# the resulting pentagon cannot be completed at the 13-point window, so
# the pipeline eliminates these (deletions into the (4,6,8,11) face give
# graphs isomorphic to the first survivor variant instead)
ELIMINATED_DELETIONS = (((4, 3),), ((3, 6),), ((6, 5),), ((8, 10),))


def n13_candidates():
    fixtures = graphs.gamma13_fixtures()
    g0 = fixtures[0]
    tetra = graphs.PlanarEmbeddedGraph(
        4, ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)))
    out = [
        fixtures[0],
        g0.delete_edges(ELIMINATED_DELETIONS[0]),
        fixtures[1],
        g0.delete_edges(ELIMINATED_DELETIONS[1]),
        tetra,                                   # killed by the first LP pass
        fixtures[2],
        g0.delete_edges(ELIMINATED_DELETIONS[2]),
        fixtures[3],
        g0.delete_edges(ELIMINATED_DELETIONS[3]),
        g0.delete_edges(((0, 1),)),              # degree-2 vertex: filtered
    ]
    return out


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for n in (4, 5, 6, 7):
        gs = small_planar_graphs(n)
        if n == 7:
            triangulations = [g for g in gs
                              if all(len(f) == 3 for f in g.faces)]
            assert len(triangulations) == 5, len(triangulations)
        path = FIXTURES / f"planar_n{n}.plc"
        path.write_bytes(graphs.serialize_planar_code(gs))
        print(f"{path.name}: {len(gs)} graphs")
    path = FIXTURES / "n13_candidates.plc"
    path.write_bytes(graphs.serialize_planar_code(n13_candidates()))
    print(f"{path.name}: {len(n13_candidates())} graphs")


if __name__ == "__main__":
    main()
