"""Exhaustive small embeddings and an explicit dual-graph check."""
from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from pemb.rotation import RotationSystem, tree_from_parents


def _face_count(rot):
    # rot[v] lists neighbours ccw; a face step goes (a, b) -> (b, successor of a at b)
    pos = [{w: i for i, w in enumerate(r)} for r in rot]
    seen = set()
    faces = 0
    for u, r in enumerate(rot):
        for v in r:
            if (u, v) in seen:
                continue
            faces += 1
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                rb = rot[b]
                a, b = b, rb[(pos[b][a] + 1) % len(rb)]
    return faces


def planar_embeddings(max_n: int = 6):
    """Every rotation system of every connected planar simple graph with at most
    ``max_n`` vertices that satisfies Euler's formula (mirror images included)."""
    for G in nx.graph_atlas_g():
        n = G.number_of_nodes()
        if n == 0 or n > max_n or not nx.is_connected(G) or not nx.check_planarity(G)[0]:
            continue
        m = G.number_of_edges()
        nbrs = [sorted(G[v]) for v in range(n)]
        # fix each vertex's first neighbour so cyclic shifts are not repeated
        options = [[[nb[0], *p] for p in itertools.permutations(nb[1:])] if nb else [[]] for nb in nbrs]
        edge_id = {}
        edges = []
        for u, v in sorted(G.edges()):
            edge_id[(u, v)] = edge_id[(v, u)] = len(edges)
            edges.append((u, v))
        for rot in itertools.product(*options):
            f = _face_count(rot) if m else 1
            if n - m + f != 2:
                continue
            rotations = [[edge_id[(v, w)] for w in r] for v, r in enumerate(rot)]
            yield RotationSystem.from_rotations(np.array(edges, dtype=np.int64).reshape(-1, 2), rotations, 0)


def spanning_trees(g: RotationSystem):
    """Every spanning tree as a list of edge ids (simple graphs only)."""
    n = g.n
    for ids in itertools.combinations(range(g.m), n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for e in ids:
            a, b = find(int(g.edges[e, 0])), find(int(g.edges[e, 1]))
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            yield list(ids)


def tree_for_edges(g: RotationSystem, ids):
    in_tree = np.zeros(g.m, dtype=bool)
    in_tree[list(ids)] = True
    parent = np.full(g.n, -1, dtype=np.int64)
    seen = {g.root}
    stack = [g.root]
    while stack:
        v = stack.pop()
        for h in range(g.offsets[v], g.offsets[v + 1]):
            w = int(g.tgt[h])
            if in_tree[g.edge_id[h]] and w not in seen:
                seen.add(w)
                parent[w] = h
                stack.append(w)
    return tree_from_parents(g, parent)


def dual_tree_check(s, g: RotationSystem, r, tree_ids) -> str | None:
    """Return None if the non-tree sequence encodes a spanning tree of the dual,
    otherwise a description of the first violation.

    ``r`` is the oracle replay (position -> half-edge). The dual is built from
    the face orbits of the rotation system, independently of the structure.
    """
    face_of = np.empty(2 * g.m, dtype=np.int64)
    faces = g.faces() if g.m else []
    for k, cyc in enumerate(faces):
        face_of[cyc] = k
    f = max(len(faces), 1)
    tree = set(tree_ids)
    non_tree = [e for e in range(g.m) if e not in tree]
    if len(non_tree) != f - 1:
        return f"{len(non_tree)} non-tree edges but {f} faces"
    # dual edges of the non-tree edges must connect all faces without a cycle
    half = {int(g.edge_id[h]): h for h in range(2 * g.m)}
    dual = nx.MultiGraph()
    dual.add_nodes_from(range(f))
    for e in non_tree:
        h = half[e]
        dual.add_edge(int(face_of[h]), int(face_of[g.mate[h]]), key=e)
    if not nx.is_tree(dual):
        return "non-tree edges do not form a spanning tree of the dual"
    # B* must be a balanced sequence whose i-th opening is the i-th non-tree edge met
    bstar = s.Bstar.bv.to_array()
    exc = np.cumsum(1 - 2 * bstar.astype(np.int64))
    if len(exc) and (exc.min() < 0 or exc[-1] != 0):
        return "B* is not balanced"
    k = len(non_tree)
    if k == 0:
        return None
    node_edge = np.empty(k + 1, dtype=np.int64)
    for node in range(1, k + 1):
        q = s.Bstar.bv.select0(node)
        p = s.A.select0(q)
        node_edge[node] = int(g.edge_id[r.half[p - 1]])
    forest_parent = s.Bstar.parent_many(np.arange(1, k + 1))
    # the forest must be the dual tree, edges as nodes, rooted at the face of the
    # first half-edge processed
    root_face = int(face_of[r.half[0]])
    pred = nx.predecessor(dual, root_face)
    child = {}
    for u, v, e in dual.edges(keys=True):
        child[e] = v if pred.get(v) == [u] else u
    parent_edge_of_face = {child[e]: e for e in child}
    for node in range(1, k + 1):
        face = child[int(node_edge[node])]
        up = pred[face][0]
        want = 0 if up == root_face else parent_edge_of_face[up]
        got = 0 if forest_parent[node - 1] == 0 else int(node_edge[forest_parent[node - 1]])
        if want != got:
            return f"B* node {node} has parent edge {got}, dual tree says {want}"
    return None
