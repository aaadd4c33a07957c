"""Rotation systems: the uncompressed planar-embedding model.

Internally everything is 0-based. Half-edges of vertex ``v`` occupy
``offsets[v]:offsets[v+1]`` in counter-clockwise order; ``mate[h]`` is the
other half of the same undirected edge and ``edge_id[h]`` its edge number.
The root's rotation starts at a corner of the outer face.

PG1 text files are 1-based::

    PG1 <n> <m> <root>
    <u> <v>                 (m lines, edge ids 1..m)
    <d> <e1> ... <ed>       (n lines, ccw rotation of edge ids per vertex)
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ._forkjoin import resolve_threads
from .errors import DisconnectedGraphError, ValidationError


@dataclass(eq=False)
class RotationSystem:
    n: int
    m: int
    root: int
    offsets: np.ndarray   # (n + 1,)
    edge_id: np.ndarray   # (2m,) undirected edge of each half-edge
    src: np.ndarray       # (2m,)
    tgt: np.ndarray       # (2m,)
    mate: np.ndarray      # (2m,)
    edges: np.ndarray     # (m, 2) endpoints of each edge id

    @classmethod
    def from_csr(cls, edges, offsets, rotation, root: int = 0, check_connected: bool = True) -> "RotationSystem":
        """Build from edge endpoints, CSR offsets and the flat ccw list of edge ids per vertex."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        offsets = np.asarray(offsets, dtype=np.int64)
        rotation = np.asarray(rotation, dtype=np.int64)
        n = len(offsets) - 1
        m = len(edges)
        if n < 1:
            raise ValidationError("a rotation system needs at least one vertex")
        if offsets[0] != 0 or offsets[-1] != len(rotation) or np.any(np.diff(offsets) < 0):
            raise ValidationError("malformed rotation offsets")
        if len(rotation) != 2 * m:
            raise ValidationError(f"rotations list {len(rotation)} incidences, expected 2m = {2 * m}")
        if not 0 <= root < n:
            raise ValidationError(f"root {root} out of range")
        if m and (edges.min() < 0 or edges.max() >= n):
            raise ValidationError("edge endpoint out of range")
        if m and (rotation.min() < 0 or rotation.max() >= m):
            raise ValidationError("dangling edge id in rotation")
        if np.any(np.bincount(rotation, minlength=m) != 2):
            bad = int(np.flatnonzero(np.bincount(rotation, minlength=m) != 2)[0])
            raise ValidationError(f"edge id {bad + 1} does not appear exactly twice")
        src = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
        occ = np.argsort(rotation, kind="stable").reshape(-1, 2) if m else np.zeros((0, 2), np.int64)
        mate = np.empty(2 * m, dtype=np.int64)
        mate[occ[:, 0]] = occ[:, 1]
        mate[occ[:, 1]] = occ[:, 0]
        got = np.sort(src[occ], axis=1)
        want = np.sort(edges, axis=1)
        if not np.array_equal(got, want):
            bad = int(np.flatnonzero(np.any(got != want, axis=1))[0])
            raise ValidationError(f"edge id {bad + 1} appears at vertices {tuple(got[bad] + 1)}, "
                                  f"endpoints are {tuple(want[bad] + 1)}")
        g = cls(n, m, int(root), offsets, rotation, src, src[mate], mate, edges)
        if check_connected:
            g.check_connected()
        return g

    @classmethod
    def from_rotations(cls, edges, rotations, root: int = 0) -> "RotationSystem":
        """``rotations[v]`` is the ccw list of (0-based) edge ids at ``v``."""
        lens = [len(r) for r in rotations]
        offsets = np.zeros(len(rotations) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum(lens)
        flat = np.fromiter((e for r in rotations for e in r), dtype=np.int64, count=int(offsets[-1]))
        return cls.from_csr(edges, offsets, flat, root)

    def check_connected(self) -> None:
        if self.n == 1:
            return
        adj = coo_matrix((np.ones(self.m), (self.edges[:, 0], self.edges[:, 1])), shape=(self.n, self.n))
        k, _ = connected_components(adj, directed=False)
        if k != 1:
            raise DisconnectedGraphError(f"graph has {k} connected components")

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def rotation(self, v: int) -> np.ndarray:
        """Edge ids around ``v`` (0-based), counter-clockwise."""
        return self.edge_id[self.offsets[v]:self.offsets[v + 1]]

    def neighbours(self, v: int) -> np.ndarray:
        return self.tgt[self.offsets[v]:self.offsets[v + 1]]

    def rotations(self) -> list[list[int]]:
        return [self.rotation(v).tolist() for v in range(self.n)]

    def with_root(self, root: int) -> "RotationSystem":
        return RotationSystem(self.n, self.m, int(root), self.offsets, self.edge_id, self.src, self.tgt,
                              self.mate, self.edges)

    def rotated_start(self, v: int, k: int) -> "RotationSystem":
        """Same embedding with vertex ``v``'s rotation listed from its ``k``-th incidence."""
        rot = self.edge_id.copy()
        lo, hi = self.offsets[v], self.offsets[v + 1]
        rot[lo:hi] = np.roll(rot[lo:hi], -k)
        return RotationSystem.from_csr(self.edges, self.offsets, rot, self.root, check_connected=False)

    def mirror(self) -> "RotationSystem":
        """The reflected embedding (every rotation reversed)."""
        rot = self.edge_id.copy()
        for v in range(self.n):
            lo, hi = self.offsets[v], self.offsets[v + 1]
            rot[lo:hi] = rot[lo:hi][::-1]
        return RotationSystem.from_csr(self.edges, self.offsets, rot, self.root, check_connected=False)

    def faces(self) -> list[list[int]]:
        """Face boundaries as half-edge cycles (orbits of h -> ccw successor of mate(h))."""
        nxt = self._ccw_successor()
        seen = np.zeros(2 * self.m, dtype=bool)
        out = []
        for h0 in range(2 * self.m):
            if seen[h0]:
                continue
            cyc = []
            h = h0
            while not seen[h]:
                seen[h] = True
                cyc.append(h)
                h = int(nxt[self.mate[h]])
            out.append(cyc)
        return out

    def _ccw_successor(self) -> np.ndarray:
        h = np.arange(2 * self.m, dtype=np.int64)
        end = self.offsets[self.src + 1]
        return np.where(h + 1 < end, h + 1, self.offsets[self.src])

    def face_count(self) -> int:
        return len(self.faces()) if self.m else 1

    def is_planar_embedding(self) -> bool:
        return self.n - self.m + self.face_count() == 2


# --------------------------------------------------------------------------
# PG1 text format

@njit(cache=True)
def _parse_rotations(tok, pos, n, m):
    offsets = np.zeros(n + 1, dtype=np.int64)
    rot = np.empty(2 * m, dtype=np.int64)
    k = 0
    for v in range(n):
        if pos >= len(tok):
            return offsets, rot, -1
        d = tok[pos]
        pos += 1
        if d < 0 or k + d > 2 * m or pos + d > len(tok):
            return offsets, rot, -2 - v
        for j in range(d):
            rot[k] = tok[pos + j] - 1
            k += 1
        pos += d
        offsets[v + 1] = k
    return offsets, rot, pos


def loads_pg(text: str | bytes) -> RotationSystem:
    if isinstance(text, str):
        text = text.encode("utf-8")
    head, _, body = text.partition(b"\n")
    parts = head.split()
    if len(parts) != 4 or parts[0] != b"PG1":
        raise ValidationError("malformed PG1 header, expected 'PG1 <n> <m> <root>'")
    try:
        n, m, root = (int(x) for x in parts[1:])
    except ValueError:
        raise ValidationError("malformed PG1 header, counts must be integers") from None
    if n < 1 or m < 0 or not 1 <= root <= n:
        raise ValidationError(f"invalid PG1 header values n={n} m={m} root={root}")
    words = body.split()
    try:
        tok = np.array(words, dtype=np.int64) if words else np.zeros(0, np.int64)
    except ValueError:
        raise ValidationError("non-integer token in PG1 body") from None
    if len(tok) < 2 * m:
        raise ValidationError("PG1 edge list truncated")
    edges = tok[: 2 * m].reshape(m, 2) - 1
    offsets, rot, end = _parse_rotations(tok, 2 * m, n, m)
    if end == -1:
        raise ValidationError("PG1 rotation lines truncated")
    if end < -1:
        raise ValidationError(f"malformed rotation line for vertex {-end - 1}")
    if end != len(tok):
        raise ValidationError("trailing tokens after PG1 rotation lines")
    if offsets[-1] != 2 * m:
        raise ValidationError(f"rotations list {offsets[-1]} incidences, expected 2m = {2 * m}")
    return RotationSystem.from_csr(edges, offsets, rot, root - 1)


def dumps_pg(g: RotationSystem) -> str:
    lines = [f"PG1 {g.n} {g.m} {g.root + 1}"]
    e1 = g.edges + 1
    lines.extend(f"{u} {v}" for u, v in e1.tolist())
    rot = (g.edge_id + 1).tolist()
    off = g.offsets.tolist()
    for v in range(g.n):
        seg = rot[off[v]:off[v + 1]]
        lines.append(" ".join([str(len(seg))] + [str(x) for x in seg]))
    return "\n".join(lines) + "\n"


def load_pg(path) -> RotationSystem:
    with open(path, "rb") as fh:
        return loads_pg(fh.read())


def save_pg(g: RotationSystem, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_pg(g))


# --------------------------------------------------------------------------
# generators

def grid(rows: int, cols: int) -> RotationSystem:
    """``rows x cols`` grid; vertex ``i*cols + j``; root at the corner 0."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    n = rows * cols
    vid = np.arange(n, dtype=np.int64).reshape(rows, cols)
    horiz = np.stack([vid[:, :-1].ravel(), vid[:, 1:].ravel()], axis=1)
    vert = np.stack([vid[:-1, :].ravel(), vid[1:, :].ravel()], axis=1)
    edges = np.concatenate([horiz, vert]).astype(np.int64)
    nh = len(horiz)
    hid = np.full((rows, cols + 1), -1, dtype=np.int64)   # edge left of (i, j) is hid[i, j]
    hid[:, 1:cols] = np.arange(nh).reshape(rows, cols - 1) if cols > 1 else hid[:, 1:cols]
    vid_e = np.full((rows + 1, cols), -1, dtype=np.int64)  # edge below (i, j) is vid_e[i, j]
    if rows > 1:
        vid_e[1:rows, :] = nh + np.arange(len(vert)).reshape(rows - 1, cols)
    # counter-clockwise: east, north, west, south (row index grows northwards)
    east = hid[:, 1:]
    north = vid_e[1:, :]
    west = hid[:, :-1]
    south = vid_e[:-1, :]
    cand = np.stack([east, north, west, south], axis=2).reshape(n, 4)
    mask = cand >= 0
    offsets = np.zeros(n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(mask.sum(axis=1))
    return RotationSystem.from_csr(edges, offsets, cand[mask], 0)


def cycle(k: int) -> RotationSystem:
    """Cycle on ``k`` vertices (``k = 1`` is a self-loop, ``k = 2`` a double edge)."""
    if k < 1:
        raise ValueError("cycle length must be positive")
    v = np.arange(k, dtype=np.int64)
    edges = np.stack([v, (v + 1) % k], axis=1)
    rot = np.stack([v, (v - 1) % k], axis=1).ravel()
    offsets = np.arange(0, 2 * k + 1, 2, dtype=np.int64)
    return RotationSystem.from_csr(edges, offsets, rot, 0)


def path(k: int) -> RotationSystem:
    if k < 1:
        raise ValueError("path length must be positive")
    edges = np.stack([np.arange(k - 1), np.arange(1, k)], axis=1)
    rots = [[]] if k == 1 else [[0]] + [[i - 1, i] for i in range(1, k - 1)] + [[k - 2]]
    return RotationSystem.from_rotations(edges, rots, 0)


@njit(cache=True)
def _stacked_kernel(k, seed):
    np.random.seed(seed)
    n = 3 + k
    m = 3 + 3 * k
    tgt = np.empty(2 * m, dtype=np.int64)
    rnext = np.empty(2 * m, dtype=np.int64)   # ccw successor around the source vertex
    first = np.empty(n, dtype=np.int64)
    # half-edges 2e and 2e + 1 are mates; the source of h is tgt[h ^ 1]
    tgt[0], tgt[1] = 1, 0
    tgt[2], tgt[3] = 2, 1
    tgt[4], tgt[5] = 0, 2
    rnext[0], rnext[5] = 5, 0
    rnext[2], rnext[1] = 1, 2
    rnext[4], rnext[3] = 3, 4
    first[0], first[1], first[2] = 0, 2, 4
    faces = np.empty((1 + 2 * k, 3), dtype=np.int64)
    faces[0, 0], faces[0, 1], faces[0, 2] = 0, 2, 4
    nf = 1
    ne = 3
    for x in range(3, n):
        f = np.random.randint(0, nf)
        ab, bc, ca = faces[f, 0], faces[f, 1], faces[f, 2]
        a, b, c = tgt[ca], tgt[ab], tgt[bc]
        ax, bx, cx = 2 * ne, 2 * ne + 2, 2 * ne + 4
        ne += 3
        tgt[ax], tgt[ax + 1] = x, a
        tgt[bx], tgt[bx + 1] = x, b
        tgt[cx], tgt[cx + 1] = x, c
        # spokes go right after the face's edge at each corner
        rnext[ax] = rnext[ab]
        rnext[ab] = ax
        rnext[bx] = rnext[bc]
        rnext[bc] = bx
        rnext[cx] = rnext[ca]
        rnext[ca] = cx
        # around x: xa, xb, xc
        rnext[ax + 1] = bx + 1
        rnext[bx + 1] = cx + 1
        rnext[cx + 1] = ax + 1
        first[x] = ax + 1
        faces[f, 0], faces[f, 1], faces[f, 2] = ab, bx, ax + 1
        faces[nf, 0], faces[nf, 1], faces[nf, 2] = bc, cx, bx + 1
        faces[nf + 1, 0], faces[nf + 1, 1], faces[nf + 1, 2] = ca, ax, cx + 1
        nf += 2
    # flatten rotations
    deg = np.zeros(n, dtype=np.int64)
    for h in range(2 * m):
        deg[tgt[h ^ 1]] += 1
    offsets = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        offsets[v + 1] = offsets[v] + deg[v]
    rot = np.empty(2 * m, dtype=np.int64)
    for v in range(n):
        h = first[v]
        for j in range(deg[v]):
            rot[offsets[v] + j] = h >> 1
            h = rnext[h]
    edges = np.empty((m, 2), dtype=np.int64)
    for e in range(m):
        edges[e, 0] = tgt[2 * e + 1]
        edges[e, 1] = tgt[2 * e]
    return edges, offsets, rot


def stacked_triangulation(k: int, seed: int = 0) -> RotationSystem:
    """Random stacked (Apollonian) triangulation: a triangle plus ``k`` vertices, each
    inserted into a uniformly chosen inner face. ``n = 3 + k``, ``m = 3 + 3k``."""
    if k < 0:
        raise ValueError("insert count must be non-negative")
    edges, offsets, rot = _stacked_kernel(int(k), int(seed) % (2**32))
    return RotationSystem.from_csr(edges, offsets, rot, 0, check_connected=False)


def decorate(g: RotationSystem, multi: int = 0, loops: int = 0, seed: int = 0) -> RotationSystem:
    """Add ``multi`` parallel copies of random edges and ``loops`` self-loops.

    A copy of ``u-v`` sits right after the original at ``u`` and right before it at
    ``v``, so it bounds a new 2-face; a self-loop is two adjacent incidences.
    """
    rng = np.random.default_rng(seed)
    rots = g.rotations()
    edges = g.edges.tolist()
    for _ in range(multi):
        if not edges:
            break
        e = int(rng.integers(len(edges)))
        u, v = edges[e]
        new = len(edges)
        edges.append([u, v])
        if u == v:
            # copy of a self-loop: nest inside it
            i = rots[u].index(e)
            rots[u][i + 1:i + 1] = [new, new]
            edges[new] = [u, u]
            continue
        ru, rv = rots[u], rots[v]
        iu = ru.index(e)
        ru.insert(iu + 1, new)
        iv = rv.index(e)
        rv.insert(iv, new)
    for _ in range(loops):
        v = int(rng.integers(g.n))
        new = len(edges)
        edges.append([v, v])
        i = int(rng.integers(len(rots[v]) + 1))
        rots[v][i:i] = [new, new]
    return RotationSystem.from_rotations(np.array(edges, dtype=np.int64).reshape(-1, 2), rots, g.root)


def thin(g: RotationSystem, fraction: float, seed: int = 0) -> RotationSystem:
    """Delete a random ``fraction`` of the edges outside a BFS spanning tree."""
    rng = np.random.default_rng(seed)
    tree_edges = set(bfs_tree_edges(g).tolist())
    others = np.array([e for e in range(g.m) if e not in tree_edges], dtype=np.int64)
    drop = set(rng.choice(others, size=int(round(fraction * len(others))), replace=False).tolist()) if len(others) else set()
    keep = np.array([e for e in range(g.m) if e not in drop], dtype=np.int64)
    relabel = np.full(g.m, -1, dtype=np.int64)
    relabel[keep] = np.arange(len(keep))
    mask = relabel[g.edge_id] >= 0
    deg = np.bincount(g.src[mask], minlength=g.n)
    offsets = np.zeros(g.n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(deg)
    return RotationSystem.from_csr(g.edges[keep], offsets, relabel[g.edge_id[mask]], g.root)


def bfs_tree_edges(g: RotationSystem) -> np.ndarray:
    parent = np.full(g.n, -1, dtype=np.int64)
    seen = np.zeros(g.n, dtype=bool)
    seen[g.root] = True
    frontier = [g.root]
    out = []
    while frontier:
        nxt = []
        for v in frontier:
            for h in range(g.offsets[v], g.offsets[v + 1]):
                w = int(g.tgt[h])
                if not seen[w]:
                    seen[w] = True
                    parent[w] = h
                    out.append(int(g.edge_id[h]))
                    nxt.append(w)
        frontier = nxt
    return np.array(out, dtype=np.int64)


# --------------------------------------------------------------------------
# spanning trees

@dataclass(eq=False)
class SpanningTree:
    """A rooted spanning tree plus the per-vertex processing order it induces.

    ``order`` lists half-edges vertex by vertex; a non-root vertex's segment starts
    with its parent half-edge, the root's with its first incidence. ``et_*`` arrays
    describe the tree half-edges in that order (the tree's adjacency lists);
    ``C[k]`` counts the non-tree half-edges that follow tree half-edge ``k`` inside
    its segment and ``lead`` the root's non-tree half-edges before its first tree one.
    """

    root: int
    parent_edge: np.ndarray   # (n,) half-edge at the parent pointing to v; -1 for the root
    tree_mask: np.ndarray     # (2m,) bool
    order: np.ndarray         # (2m,) half-edges in processing-segment order
    position: np.ndarray      # (2m,) inverse of order
    et_ref: np.ndarray        # (2(n-1),) positions in order of tree half-edges
    vt_first: np.ndarray      # (n,) first E_T index of v (inclusive)
    vt_last: np.ndarray       # (n,) last E_T index of v (inclusive)
    et_src: np.ndarray
    et_tgt: np.ndarray
    et_mat: np.ndarray
    C: np.ndarray             # (2(n-1),)
    lead: int

    @property
    def edge_ids(self) -> np.ndarray:
        """Undirected tree edge ids (0-based), one per non-root vertex."""
        return np.sort(self._edge_ids)

    @property
    def parents(self) -> np.ndarray:
        """Parent vertex of every vertex, -1 for the root."""
        return self._parents


def tree_from_parents(g: RotationSystem, parent_edge: np.ndarray) -> SpanningTree:
    """Derive the processing order, E_T lists and C counts from parent half-edges."""
    parent_edge = np.asarray(parent_edge, dtype=np.int64)
    n, m = g.n, g.m
    nonroot = np.flatnonzero(parent_edge >= 0)
    if len(nonroot) != n - 1 or parent_edge[g.root] != -1:
        raise ValidationError("parent array does not describe a tree rooted at the root")
    if np.any(g.tgt[parent_edge[nonroot]] != nonroot):
        raise ValidationError("parent half-edge does not point to its child")
    tree_mask = np.zeros(2 * m, dtype=bool)
    tree_mask[parent_edge[nonroot]] = True
    tree_mask[g.mate[parent_edge[nonroot]]] = True
    if int(tree_mask.sum()) != 2 * (n - 1):
        raise ValidationError("parent half-edges repeat an edge")
    _check_acyclic(parent_edge, g.src, g.root)

    deg = g.degrees
    start = np.zeros(n, dtype=np.int64)
    start[nonroot] = g.mate[parent_edge[nonroot]] - g.offsets[nonroot]
    h = np.arange(2 * m, dtype=np.int64)
    local = h - g.offsets[g.src]
    order = g.offsets[g.src] + (start[g.src] + local) % np.maximum(deg[g.src], 1)
    position = np.empty(2 * m, dtype=np.int64)
    position[order] = h

    et_ref = np.flatnonzero(tree_mask[order])
    et_h = order[et_ref]
    ne = len(et_ref)
    tdeg = np.bincount(g.src[et_h], minlength=n) if ne else np.zeros(n, np.int64)
    vt_first = np.zeros(n, dtype=np.int64)
    vt_first[1:] = np.cumsum(tdeg)[:-1]
    vt_last = vt_first + tdeg - 1
    etidx = np.full(2 * m, -1, dtype=np.int64)
    etidx[et_h] = np.arange(ne)
    et_src = g.src[et_h]
    et_tgt = g.tgt[et_h]
    et_mat = etidx[g.mate[et_h]]
    nxt = np.empty(ne, dtype=np.int64)
    if ne:
        nxt[:-1] = et_ref[1:]
        same = np.zeros(ne, dtype=bool)
        same[:-1] = et_src[1:] == et_src[:-1]
        nxt = np.where(same, nxt, g.offsets[et_src + 1])
    C = nxt - et_ref - 1
    if tdeg[g.root]:
        lead = int(et_ref[vt_first[g.root]] - g.offsets[g.root])
    else:
        lead = int(deg[g.root])
    t = SpanningTree(g.root, parent_edge, tree_mask, order, position, et_ref, vt_first, vt_last,
                     et_src, et_tgt, et_mat, C, lead)
    t._edge_ids = g.edge_id[parent_edge[nonroot]]
    parents = np.full(n, -1, dtype=np.int64)
    parents[nonroot] = g.src[parent_edge[nonroot]]
    t._parents = parents
    return t


@njit(cache=True)
def _acyclic(parent_edge, src, root):
    n = len(parent_edge)
    state = np.zeros(n, dtype=np.int8)   # 0 unknown, 1 on current chain, 2 reaches root
    state[root] = 2
    chain = np.empty(n, dtype=np.int64)
    for v0 in range(n):
        k = 0
        v = v0
        while state[v] == 0:
            state[v] = 1
            chain[k] = v
            k += 1
            v = src[parent_edge[v]]
        if state[v] == 1:
            return False
        for j in range(k):
            state[chain[j]] = 2
    return True


def _check_acyclic(parent_edge, src, root):
    if not _acyclic(parent_edge, src, root):
        raise ValidationError("parent references contain a cycle")


@njit(cache=True)
def _dfs_parents(offsets, tgt, mate, root):
    n = len(offsets) - 1
    parent = np.full(n, -1, dtype=np.int64)
    seen = np.zeros(n, dtype=np.uint8)
    seen[root] = 1
    stack_v = np.empty(n, dtype=np.int64)
    stack_j = np.empty(n, dtype=np.int64)
    start = np.zeros(n, dtype=np.int64)
    stack_v[0] = root
    stack_j[0] = 0
    top = 1
    count = 1
    while top:
        v = stack_v[top - 1]
        j = stack_j[top - 1]
        deg = offsets[v + 1] - offsets[v]
        if j >= deg:
            top -= 1
            continue
        stack_j[top - 1] = j + 1
        h = offsets[v] + (start[v] + j) % deg
        w = tgt[h]
        if seen[w]:
            continue
        seen[w] = 1
        count += 1
        parent[w] = h
        dw = offsets[w + 1] - offsets[w]
        start[w] = (mate[h] - offsets[w] + 1) % dw
        stack_v[top] = w
        stack_j[top] = 0
        top += 1
    return parent, count


def spanning_tree_dfs(g: RotationSystem) -> SpanningTree:
    """DFS tree from the root; each vertex scans its rotation ccw starting right after
    the edge it was reached by (the root from its first incidence)."""
    parent, count = _dfs_parents(g.offsets, g.tgt, g.mate, g.root)
    if count != g.n:
        raise DisconnectedGraphError(f"only {count} of {g.n} vertices reachable from the root")
    return tree_from_parents(g, parent)


def spanning_tree_from_edges(g: RotationSystem, edge_ids) -> SpanningTree:
    """Orient a given set of ``n - 1`` undirected edge ids (0-based) away from the root."""
    edge_ids = np.unique(np.asarray(edge_ids, dtype=np.int64))
    if len(edge_ids) != g.n - 1:
        raise ValidationError(f"a spanning tree needs {g.n - 1} edges, got {len(edge_ids)}")
    if len(edge_ids) and (edge_ids.min() < 0 or edge_ids.max() >= g.m):
        raise ValidationError("tree edge id out of range")
    in_tree = np.zeros(g.m, dtype=bool)
    in_tree[edge_ids] = True
    parent = np.full(g.n, -1, dtype=np.int64)
    seen = np.zeros(g.n, dtype=bool)
    seen[g.root] = True
    frontier = [g.root]
    while frontier:
        nxt = []
        for v in frontier:
            for h in range(g.offsets[v], g.offsets[v + 1]):
                if not in_tree[g.edge_id[h]]:
                    continue
                w = int(g.tgt[h])
                if seen[w]:
                    continue
                seen[w] = True
                parent[w] = h
                nxt.append(w)
        frontier = nxt
    # n - 1 edges reaching every vertex form a tree
    if not seen.all():
        raise ValidationError("tree edges do not span the graph")
    return tree_from_parents(g, parent)


# -------- parallel stub-tree construction with work stealing

@njit(cache=True, nogil=True)
def _dfs_chunk(offsets, tgt, visited, parent, stack, top, budget):
    """Pop up to ``budget`` vertices and push their unvisited neighbours.

    Returns the new stack top, or ``-(top + 1)`` if the stack ran out of room
    before a vertex was fully expanded (nothing is lost: the vertex is pushed back).
    """
    cap = len(stack)
    done = 0
    while top > 0 and done < budget:
        v = stack[top - 1]
        room = cap - top + 1
        if offsets[v + 1] - offsets[v] > room:
            return -(top + 1)
        top -= 1
        for h in range(offsets[v], offsets[v + 1]):
            w = tgt[h]
            if visited[w] == 0:
                visited[w] = 1
                parent[w] = h
                stack[top] = w
                top += 1
        done += 1
    return top


class _Worker:
    __slots__ = ("stack", "top", "lock", "idle")

    def __init__(self, cap: int):
        self.stack = np.empty(max(cap, 16), dtype=np.int64)
        self.top = 0
        self.lock = threading.Lock()
        self.idle = False


def _parallel_parents(g: RotationSystem, threads: int, budget: int = 4096) -> np.ndarray:
    n = g.n
    visited = np.zeros(n, dtype=np.uint8)
    parent = np.full(n, -1, dtype=np.int64)
    visited[g.root] = 1
    if threads == 1:
        w = _Worker(n)
        w.stack[0] = g.root
        top = 1
        while top > 0:
            top = _dfs_chunk(g.offsets, g.tgt, visited, parent, w.stack, top, n + 1)
            if top < 0:
                top = -top - 1
                w.stack = np.concatenate([w.stack, np.empty(len(w.stack), np.int64)])
        return parent
    # stub tree: breadth-first until the frontier can feed every worker
    frontier = np.array([g.root], dtype=np.int64)
    while 0 < len(frontier) < 4 * threads:
        nxt = []
        for v in frontier.tolist():
            for h in range(g.offsets[v], g.offsets[v + 1]):
                x = int(g.tgt[h])
                if not visited[x]:
                    visited[x] = 1
                    parent[x] = h
                    nxt.append(x)
        frontier = np.array(nxt, dtype=np.int64)
    workers = [_Worker(n // threads + 64) for _ in range(threads)]
    for i, v in enumerate(frontier.tolist()):
        w = workers[i % threads]
        if w.top == len(w.stack):
            w.stack = np.concatenate([w.stack, np.empty(len(w.stack), np.int64)])
        w.stack[w.top] = v
        w.top += 1
    state = threading.Lock()
    # a victim must hold at least this many entries before half of them are taken
    steal_min = 2

    def steal(me: _Worker) -> bool:
        victim = max(workers, key=lambda w: w.top)
        if victim is me or victim.top < steal_min:
            return False
        with victim.lock:
            k = victim.top // 2
            if victim.top < steal_min or k == 0:
                return False
            taken = victim.stack[:k].copy()
            victim.stack[: victim.top - k] = victim.stack[k: victim.top]
            victim.top -= k
        with me.lock:
            if len(me.stack) < me.top + k:
                me.stack = np.concatenate([me.stack[: me.top], np.empty(me.top + 2 * k, np.int64)])
            me.stack[me.top: me.top + k] = taken
            me.top += k
        return True

    def run(me: _Worker):
        while True:
            if me.top > 0:
                with me.lock:
                    top = _dfs_chunk(g.offsets, g.tgt, visited, parent, me.stack, me.top, budget)
                    if top < 0:
                        top = -top - 1
                        me.stack = np.concatenate([me.stack, np.empty(len(me.stack) + 64, np.int64)])
                    me.top = top
                continue
            if steal(me):
                continue
            with state:
                me.idle = True
                if all(w.idle for w in workers) and all(w.top == 0 for w in workers):
                    return
            # someone is still working; spin politely and retry
            threading.Event().wait(0.0002)
            with state:
                me.idle = False

    ts = [threading.Thread(target=run, args=(w,)) for w in workers]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    return parent


def spanning_tree_parallel(g: RotationSystem, threads: int | None = None) -> SpanningTree:
    """Spanning tree from a breadth-first stub followed by work-stealing DFS workers.

    Concurrent workers may both claim a vertex; the last parent written wins, which
    still yields a tree because a parent is always claimed before its child.
    """
    threads = resolve_threads(threads)
    parent = _parallel_parents(g, threads)
    missing = int(np.count_nonzero(parent < 0)) - 1
    if missing:
        raise DisconnectedGraphError(f"{missing} vertices unreachable from the root")
    return tree_from_parents(g, parent)
