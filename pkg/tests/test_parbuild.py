import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import graphs
from pemb import rotation
from pemb.core import build_sequential
from pemb.errors import StructureError, ValidationError
from pemb.parbuild import list_ranking, list_ranking_sequential, par_build, prefix_sum


def random_chain(N, rng):
    perm = rng.permutation(N)
    succ = np.full(N, -1, dtype=np.int64)
    succ[perm[:-1]] = perm[1:]
    return succ, int(perm[0])


# ---- list ranking

@pytest.mark.parametrize("threads", [1, 2, 3, 8])
def test_list_ranking_matches_pointer_chase(threads):
    rng = np.random.default_rng(threads)
    for N in (1, 2, 7, 64, 1000, 50_000):
        succ, head = random_chain(N, rng)
        w1 = rng.integers(0, 5, N)
        w2 = rng.integers(1, 3, N)
        r1, r2 = list_ranking(succ, head, w1, w2, threads)
        np.testing.assert_array_equal(r1, list_ranking_sequential(succ, head, w1))
        np.testing.assert_array_equal(r2, list_ranking_sequential(succ, head, w2))


def test_list_ranking_identity_chain_is_cumsum():
    N = 10_000
    succ = np.arange(1, N + 1, dtype=np.int64)
    succ[-1] = -1
    w = np.arange(N)
    r1, r2 = list_ranking(succ, 0, w, threads=4)
    np.testing.assert_array_equal(r1, np.cumsum(w))
    np.testing.assert_array_equal(r2, np.arange(1, N + 1))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 400), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_list_ranking_property(N, threads, seed):
    rng = np.random.default_rng(seed)
    succ, head = random_chain(N, rng)
    w = rng.integers(0, 10, N)
    r1, r2 = list_ranking(succ, head, w, threads=threads)
    np.testing.assert_array_equal(r1, list_ranking_sequential(succ, head, w))
    # unit ranks along a chain are a permutation of 1..N
    assert sorted(r2.tolist()) == list(range(1, N + 1))


@pytest.mark.parametrize("threads", [1, 4])
def test_list_ranking_rejects_broken_chains(threads):
    rng = np.random.default_rng(0)
    succ, head = random_chain(500, rng)
    cyc = succ.copy()
    tail = int(np.flatnonzero(cyc == -1)[0])
    cyc[tail] = head
    with pytest.raises(StructureError):
        list_ranking(cyc, head, np.ones(500), threads=threads)
    short = succ.copy()
    short[head] = -1
    with pytest.raises(StructureError):
        list_ranking(short, head, np.ones(500), threads=threads)
    bad = succ.copy()
    bad[head] = 10**6
    with pytest.raises(StructureError):
        list_ranking(bad, head, np.ones(500), threads=threads)
    with pytest.raises(StructureError):
        list_ranking_sequential(cyc, head, np.ones(500))


def test_list_ranking_empty():
    r1, r2 = list_ranking(np.zeros(0, np.int64), 0, np.zeros(0))
    assert len(r1) == len(r2) == 0


# ---- prefix sums

@pytest.mark.parametrize("threads", [1, 2, 5, 8])
def test_prefix_sum(threads):
    rng = np.random.default_rng(threads)
    for n in (0, 1, 3, 17, 1000, 123_457):
        x = rng.integers(0, 1000, n)
        np.testing.assert_array_equal(prefix_sum(x, threads), np.cumsum(x))
        ex = prefix_sum(x, threads, inclusive=False)
        np.testing.assert_array_equal(ex, np.cumsum(x) - x)
    np.testing.assert_array_equal(prefix_sum(np.array([True, False, True]), threads), [1, 1, 2])
    with pytest.raises(TypeError):
        prefix_sum(np.array([0.5, 1.0]), threads)


# ---- parallel construction

def test_fig1_parallel_equals_sequential(fig1_graph, fig1_tree):
    want = build_sequential(fig1_graph, fig1_tree).to_bytes()
    for p in (1, 2, 3, 4, 8):
        assert par_build(fig1_graph, fig1_tree, p).to_bytes() == want


def test_corpus_parallel_equals_sequential():
    for _, g, t in graphs.corpus(200, seed=31):
        want = build_sequential(g, t).to_bytes()
        for p in (1, 2, 4, 8):
            assert par_build(g, t, p).to_bytes() == want


def test_trivial_graphs():
    for g in (rotation.loads_pg("PG1 1 0 1\n0\n"), rotation.cycle(1), rotation.path(2),
              rotation.decorate(rotation.path(1), loops=3)):
        t = rotation.spanning_tree_dfs(g)
        for p in (1, 4):
            assert par_build(g, t, p).to_bytes() == build_sequential(g, t).to_bytes()


def test_large_graph_deterministic():
    g = rotation.decorate(rotation.stacked_triangulation(100_000, seed=6), multi=1000, loops=500, seed=6)
    t = rotation.spanning_tree_parallel(g, 4)
    want = build_sequential(g, t).to_bytes()
    for p in (1, 2, 4, 8):
        assert par_build(g, t, p).to_bytes() == want


def test_deep_tree():
    # a long path: the Euler tour is one long descent and ascent
    g = rotation.path(100_000)
    t = rotation.spanning_tree_dfs(g)
    assert par_build(g, t, 4).to_bytes() == build_sequential(g, t).to_bytes()


def test_work_and_memory_linear():
    # touches and auxiliary words per edge stay bounded as m grows
    ratios = []
    for k in (1000, 10_000, 100_000):
        g = rotation.stacked_triangulation(k, seed=1)
        t = rotation.spanning_tree_dfs(g)
        for p in (1, 4):
            ctr = {}
            par_build(g, t, p, counters=ctr)
            touches = sum(v for key, v in ctr.items() if key.endswith("_touches"))
            ratios.append((touches / g.m, ctr["aux_words"] / g.m))
    assert max(r for r, _ in ratios) <= 12
    assert max(a for _, a in ratios) <= 12


def test_rejects_foreign_tree(fig1_graph):
    other = rotation.spanning_tree_dfs(rotation.grid(3, 3))
    with pytest.raises(ValidationError):
        par_build(fig1_graph, other, 2)
