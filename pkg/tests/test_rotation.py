import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import graphs
from pemb import rotation
from pemb.errors import DisconnectedGraphError, ValidationError
from pemb.rotation import RotationSystem, dumps_pg, loads_pg


def test_fig1_loads(fig1_graph):
    g = fig1_graph
    assert (g.n, g.m, g.root) == (8, 14, 0)
    assert g.degrees.tolist() == [6, 4, 2, 2, 3, 3, 4, 4]
    # edge 14 is the self-loop at vertex 1, listed twice in a row
    assert g.rotation(0).tolist() == [0, 1, 6, 10, 13, 13]
    assert g.is_planar_embedding()
    assert g.face_count() == 8


def test_pg_roundtrip(fig1_graph):
    text = dumps_pg(fig1_graph)
    g = loads_pg(text)
    assert dumps_pg(g) == text
    np.testing.assert_array_equal(g.mate, fig1_graph.mate)


def test_pg_file_roundtrip(tmp_path):
    g = rotation.decorate(rotation.grid(4, 5), multi=3, loops=2, seed=1)
    p = tmp_path / "g.pg1"
    rotation.save_pg(g, p)
    h = rotation.load_pg(p)
    assert h.rotations() == g.rotations()
    assert h.edges.tolist() == g.edges.tolist()


@pytest.mark.parametrize("text, msg", [
    ("PG2 1 0 1\n0\n", "header"),
    ("PG1 2 1 1\n1 2\n1 1\n", "truncated"),
    ("PG1 2 1 3\n1 2\n1 1\n1 1\n", "invalid"),
    ("PG1 2 1 1\n1 2\n1 1\n1 2\n", "dangling"),
    ("PG1 3 1 1\n1 2\n1 1\n1 1\n0\n", "components"),
    ("PG1 2 1 1\n1 x\n1 1\n1 1\n", "non-integer"),
    ("PG1 2 1 1\n1 2\n2 1 1\n0\n", "endpoints"),
    ("PG1 2 1 1\n1 2\n1 1\n1 1\n5\n", "trailing"),
])
def test_malformed_pg_rejected(text, msg):
    with pytest.raises(ValidationError, match=msg):
        loads_pg(text)


def test_disconnected_is_specific_error():
    with pytest.raises(DisconnectedGraphError):
        loads_pg("PG1 3 1 1\n1 2\n1 1\n1 1\n0\n")


def test_single_vertex():
    g = loads_pg("PG1 1 0 1\n0\n")
    assert (g.n, g.m) == (1, 0)
    assert g.face_count() == 1
    t = rotation.spanning_tree_dfs(g)
    assert len(t.edge_ids) == 0


@pytest.mark.parametrize("rows, cols", [(1, 1), (1, 5), (2, 2), (3, 7), (10, 10)])
def test_grid_counts(rows, cols):
    g = rotation.grid(rows, cols)
    assert g.n == rows * cols
    assert g.m == rows * (cols - 1) + cols * (rows - 1)
    assert g.is_planar_embedding()
    assert g.face_count() == (rows - 1) * (cols - 1) + 1


@pytest.mark.parametrize("k", [0, 1, 5, 200])
def test_stacked_triangulation(k):
    g = rotation.stacked_triangulation(k, seed=k)
    assert (g.n, g.m) == (3 + k, 3 * (3 + k) - 6)
    assert g.is_planar_embedding()
    assert all(len(f) == 3 for f in g.faces())


def test_cycle_and_path():
    c = rotation.cycle(7)
    assert (c.n, c.m, c.face_count()) == (7, 7, 2)
    p = rotation.path(5)
    assert (p.n, p.m, p.face_count()) == (5, 4, 1)
    assert rotation.cycle(1).m == 1  # a single loop


def test_decorate_and_thin_keep_planarity():
    rng = np.random.default_rng(0)
    for i in range(30):
        g = rotation.stacked_triangulation(int(rng.integers(1, 60)), seed=i)
        d = rotation.decorate(g, multi=int(rng.integers(0, 6)), loops=int(rng.integers(0, 6)), seed=i)
        assert d.is_planar_embedding()
        th = rotation.thin(d, 0.5, seed=i)
        assert th.is_planar_embedding()
        th.check_connected()


def test_mirror_keeps_faces_count_and_reverses(fig1_graph):
    mg = fig1_graph.mirror()
    assert mg.face_count() == fig1_graph.face_count()
    for v in range(mg.n):
        assert mg.rotation(v).tolist() == fig1_graph.rotation(v).tolist()[::-1]


def test_rotated_start_is_same_embedding(fig1_graph):
    g = fig1_graph.rotated_start(0, 2)
    assert sorted(map(len, g.faces())) == sorted(map(len, fig1_graph.faces()))


def _tree_ok(g, t):
    assert len(t.edge_ids) == g.n - 1
    assert t.parent_edge[g.root] == -1
    # every vertex reaches the root by following parents
    depth = np.full(g.n, -1)
    depth[g.root] = 0
    par = t.parents
    for v in range(g.n):
        path = []
        u = v
        while depth[u] < 0:
            path.append(u)
            u = par[u]
            assert len(path) <= g.n
        for w in reversed(path):
            depth[w] = depth[par[w]] + 1
    ids = set(t.edge_ids.tolist())
    assert sorted(t.tree_mask.nonzero()[0].tolist()) == sorted(
        h for h in range(2 * g.m) if int(g.edge_id[h]) in ids)
    assert int(np.sum(t.C)) + t.lead == 2 * g.m - 2 * (g.n - 1)
    np.testing.assert_array_equal(t.order[t.position], np.arange(2 * g.m))


def test_spanning_trees_are_trees():
    for _, g, _ in graphs.corpus(80, seed=3):
        _tree_ok(g, rotation.spanning_tree_dfs(g))
        for p in (1, 2, 4):
            _tree_ok(g, rotation.spanning_tree_parallel(g, p))
        _tree_ok(g, graphs.random_tree(g, np.random.default_rng(g.m)))


def test_parallel_tree_large_grid():
    g = rotation.grid(300, 300)
    for p in (1, 2, 4, 8):
        _tree_ok(g, rotation.spanning_tree_parallel(g, p))


def test_parallel_tree_on_long_path():
    g = rotation.path(200_000)
    for p in (1, 4):
        t = rotation.spanning_tree_parallel(g, p)
        assert len(t.edge_ids) == g.n - 1


def test_dfs_tree_is_depth_first(fig1_graph):
    t = rotation.spanning_tree_dfs(fig1_graph)
    _tree_ok(fig1_graph, t)
    # every non-tree edge of a DFS tree joins an ancestor and a descendant
    par = t.parents

    def ancestors(v):
        out = set()
        while v >= 0:
            out.add(v)
            v = par[v]
        return out

    for e, (u, w) in enumerate(fig1_graph.edges.tolist()):
        if e not in set(t.edge_ids.tolist()):
            assert u in ancestors(w) or w in ancestors(u)


def test_tree_from_edges_rejects_bad_sets(fig1_graph):
    with pytest.raises(ValidationError):
        rotation.spanning_tree_from_edges(fig1_graph, [0, 1])
    with pytest.raises(ValidationError):
        # contains the cycle 1-3-2-1 (edge ids 1, 2, 3) so misses a vertex
        rotation.spanning_tree_from_edges(fig1_graph, [0, 1, 2, 3, 4, 5, 6])
    with pytest.raises(ValidationError):
        rotation.spanning_tree_from_edges(fig1_graph, [0, 1, 2, 3, 4, 5, 99])


def test_from_rotations_detects_wrong_endpoint():
    with pytest.raises(ValidationError, match="endpoints"):
        RotationSystem.from_rotations([(0, 1), (1, 2)], [[0, 1], [0], [1]])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_graphs_satisfy_euler(seed):
    rng = np.random.default_rng(seed)
    _, g = graphs.make_graph(seed, rng, max_n=80)
    assert g.is_planar_embedding()
    assert g.mirror().is_planar_embedding()
    assert len(g.faces()) == g.face_count() or g.m == 0
