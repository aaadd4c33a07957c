"""Deterministic corpus of small embedded graphs for cross-checking."""
from __future__ import annotations

import numpy as np

from pemb import rotation


def random_tree(g, rng) -> rotation.SpanningTree:
    """Uniformly shuffled Kruskal over non-loop edges."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for e in rng.permutation(g.m).tolist():
        u, v = g.edges[e]
        ru, rv = find(int(u)), find(int(v))
        if ru != rv:
            parent[ru] = rv
            chosen.append(e)
    return rotation.spanning_tree_from_edges(g, chosen)


def reroot(g, rng):
    """Same embedding read from another corner: any face can play the outer face."""
    r = int(rng.integers(g.n))
    g = g.with_root(r)
    d = int(g.degrees[r])
    return g.rotated_start(r, int(rng.integers(d))) if d else g


def make_graph(i: int, rng, max_n: int = 200):
    kind = i % 7
    if kind == 0:
        rows = int(rng.integers(1, 15))
        cols = int(rng.integers(1, max_n // rows + 1))
        g, name = rotation.grid(rows, cols), f"grid{rows}x{cols}"
    elif kind == 1:
        k = int(rng.integers(0, max_n - 3))
        g, name = rotation.stacked_triangulation(k, int(rng.integers(1 << 30))), f"stacked{k}"
    elif kind == 2:
        k = int(rng.integers(1, max_n))
        g, name = rotation.cycle(k), f"cycle{k}"
    elif kind == 3:
        k = int(rng.integers(0, max_n - 3))
        frac = float(rng.random())
        g = rotation.thin(rotation.stacked_triangulation(k, int(rng.integers(1 << 30))), frac, int(rng.integers(1 << 30)))
        name = f"thinned{k}"
    elif kind == 4:
        k = int(rng.integers(0, max_n - 3))
        g = rotation.thin(rotation.stacked_triangulation(k, int(rng.integers(1 << 30))), 1.0, int(rng.integers(1 << 30)))
        name = f"tree{k}"
    elif kind == 5:
        k = int(rng.integers(0, 60))
        base = rotation.stacked_triangulation(k, int(rng.integers(1 << 30)))
        g = rotation.decorate(base, int(rng.integers(0, 10)), int(rng.integers(0, 10)), int(rng.integers(1 << 30)))
        name = f"decorated-stacked{k}"
    else:
        rows = int(rng.integers(1, 8))
        cols = int(rng.integers(1, 8))
        g = rotation.decorate(rotation.grid(rows, cols), int(rng.integers(0, 8)), int(rng.integers(0, 8)),
                              int(rng.integers(1 << 30)))
        name = f"decorated-grid{rows}x{cols}"
    if rng.random() < 0.5:
        g = reroot(g, rng)
    return name, g


def pick_tree(g, i: int, rng):
    kind = i % 3
    if kind == 0:
        return "dfs", rotation.spanning_tree_dfs(g)
    if kind == 1:
        p = int(rng.integers(1, 5))
        return f"parallel{p}", rotation.spanning_tree_parallel(g, p)
    return "random", random_tree(g, rng)


def corpus(count: int, seed: int = 0, max_n: int = 200):
    rng = np.random.default_rng(seed)
    for i in range(count):
        name, g = make_graph(i, rng, max_n)
        tname, t = pick_tree(g, i // 7, rng)
        yield f"{name}/{tname}", g, t
