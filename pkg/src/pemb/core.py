"""The compact planar-embedding structure.

Three bit sequences describe a connected planar embedding with ``n`` vertices
and ``m`` edges, given a spanning tree ``T`` rooted on the outer face:

* ``A[1..2m]`` lists the processed half-edges of a ccw traversal of ``T``
  (1 = tree edge, 0 = non-tree edge);
* ``B`` is ``T`` as balanced parentheses (without the root's pair);
* ``Bstar`` is the tree formed by the non-tree edges, which spans the dual.

Vertices are identified by their preorder rank in ``T`` (the root is 1) and
half-edges by their processing position in ``A``. All query arguments and
results are 1-based; ``0`` means "none".
"""
from __future__ import annotations

import io
import math
import struct

import numpy as np
from numba import njit

from .errors import RangeError, ValidationError
from .parens import ParenSeq, ps_match, ps_parent
from .rotation import RotationSystem, SpanningTree, spanning_tree_from_edges
from .succinct import (
    BitVector,
    SparseBitVector,
    p_access,
    p_rank0,
    p_rank1,
    p_select0,
    p_select1,
    sp_access,
    sp_rank1,
    sp_select,
)

MAGIC = b"PEMB"
VERSION = 1
FLAG_DEGREE = 1
FLAG_NEIGHBOUR = 2


# --------------------------------------------------------------------------
# sequential construction

@njit(cache=True, nogil=True)
def _traverse(offsets, tgt, mate, tree_mask, parent_edge, root):
    """Emit A, B, B* by walking T from the root, ccw, each vertex starting after its parent edge."""
    n = len(offsets) - 1
    m2 = len(tgt)
    a = np.zeros(m2, dtype=np.uint8)
    b = np.zeros(2 * (n - 1), dtype=np.uint8)
    bs = np.zeros(m2 - 2 * (n - 1), dtype=np.uint8)
    seen = np.zeros(m2, dtype=np.uint8)
    start = np.zeros(n, dtype=np.int64)
    for v in range(n):
        if v != root:
            d = offsets[v + 1] - offsets[v]
            start[v] = (mate[parent_edge[v]] - offsets[v] + 1) % d
    stack_v = np.empty(n, dtype=np.int64)
    stack_j = np.empty(n, dtype=np.int64)
    stack_v[0] = root
    stack_j[0] = 0
    top = 1
    ia = 0
    ib = 0
    ibs = 0
    while top:
        v = stack_v[top - 1]
        j = stack_j[top - 1]
        d = offsets[v + 1] - offsets[v]
        if j >= d:
            top -= 1
            continue
        stack_j[top - 1] = j + 1
        h = offsets[v] + (start[v] + j) % d
        bit = seen[mate[h]]
        seen[h] = 1
        if tree_mask[h]:
            a[ia] = 1
            b[ib] = bit
            ib += 1
            if bit == 0:
                if h != parent_edge[tgt[h]]:
                    return a, b, bs, -1
                stack_v[top] = tgt[h]
                stack_j[top] = 0
                top += 1
        else:
            bs[ibs] = bit
            ibs += 1
        ia += 1
    return a, b, bs, ia


def build_sequential(g: RotationSystem, t: SpanningTree) -> "PembStructure":
    """Encode ``g`` by a single sequential traversal of ``t``."""
    if len(t.parent_edge) != g.n or len(t.tree_mask) != 2 * g.m or t.root != g.root:
        raise ValidationError("spanning tree does not belong to this graph")
    a, b, bs, count = _traverse(g.offsets, g.tgt, g.mate, t.tree_mask, t.parent_edge, g.root)
    if count != 2 * g.m:
        raise ValidationError("spanning tree is inconsistent with the graph")
    return PembStructure.from_bits(a, b, bs)


# --------------------------------------------------------------------------
# queries; ``q`` is the tuple (A pack, B pack, B* pack, 2m). Kernels that do not
# allocate are compiled with _nrt=False, see the note in succinct.py.

@njit(cache=True, nogil=True, _nrt=False)
def q_mate(q, i):
    A, B, S = q[0], q[1], q[2]
    if p_access(A, i) == 0:
        return p_select0(A, ps_match(S, p_rank0(A, i)))
    return p_select1(A, ps_match(B, p_rank1(A, i)))


@njit(cache=True, nogil=True, _nrt=False)
def q_first(q, v):
    if q[3] == 0:
        return 0
    return p_select1(q[0], p_select0(q[1], v - 1)) + 1


@njit(cache=True, nogil=True, _nrt=False)
def q_last(q, v):
    if q[3] == 0:
        return 0
    if v == 1:
        # the root's last incidence is the final position unless the walk ends
        # by returning from a child, in which case it is that child's descent
        if p_access(q[0], q[3]) == 0:
            return q[3]
        return q_mate(q, q[3])
    B = q[1]
    return p_select1(q[0], ps_match(B, p_select0(B, v - 1)))


@njit(cache=True, nogil=True, _nrt=False)
def q_next(q, i):
    A, B = q[0], q[1]
    if i < q[3]:
        if p_access(A, i) == 0:
            return i + 1
        if p_access(B, p_rank1(A, i)) == 0:
            j = q_mate(q, i)
            # returning from the root's last child ends the walk
            return j + 1 if j < q[3] else 0
    return 0


@njit(cache=True, nogil=True, _nrt=False)
def q_prev(q, i):
    A, B = q[0], q[1]
    if i > 1:
        if p_access(A, i - 1) == 0:
            return i - 1
        if p_access(B, p_rank1(A, i - 1)) == 1:
            return q_mate(q, i - 1)
    return 0


@njit(cache=True, nogil=True, _nrt=False)
def q_vertex(q, i):
    A, B = q[0], q[1]
    r = p_rank1(A, i)
    if p_access(A, i) == 0:
        if r == 0 or p_access(B, r) == 0:
            return p_rank0(B, r) + 1
        return ps_parent(B, p_rank0(B, ps_match(B, r))) + 1
    if p_access(B, r) == 0:
        return ps_parent(B, p_rank0(B, r)) + 1
    return p_rank0(B, ps_match(B, r)) + 1


@njit(cache=True, nogil=True, _nrt=False)
def q_degree(q, v):
    d = 0
    e = q_first(q, v)
    while e != 0:
        e = q_next(q, e)
        d += 1
    return d


@njit(cache=True, nogil=True)
def _push(buf, k, x):
    if k == len(buf):
        nb = np.empty(2 * len(buf), dtype=np.int64)
        nb[:k] = buf
        buf = nb
    buf[k] = x
    return buf


@njit(cache=True, nogil=True)
def q_listing(q, v, ccw):
    buf = np.empty(16, dtype=np.int64)
    k = 0
    e = q_first(q, v) if ccw else q_last(q, v)
    while e != 0:
        buf = _push(buf, k, q_vertex(q, q_mate(q, e)))
        k += 1
        e = q_next(q, e) if ccw else q_prev(q, e)
    return buf[:k].copy()


@njit(cache=True, nogil=True)
def q_face(q, e, cw):
    """Vertices around a face containing position ``e``, stepping mate then
    next (or prev), wrapping around each vertex's rotation."""
    buf = np.empty(16, dtype=np.int64)
    k = 0
    edg = e
    while True:
        mt = q_mate(q, edg)
        w = q_vertex(q, mt)
        buf = _push(buf, k, w)
        k += 1
        if cw:
            edg = q_next(q, mt)
            if edg == 0:
                edg = q_first(q, w)
        else:
            edg = q_prev(q, mt)
            if edg == 0:
                edg = q_last(q, w)
        if edg == e:
            break
    return buf[:k].copy()


@njit(cache=True, nogil=True)
def q_face_edges(q, e, cw):
    """Positions visited by the face walk from ``e`` (each ``edg`` before stepping)."""
    buf = np.empty(16, dtype=np.int64)
    k = 0
    edg = e
    while True:
        buf = _push(buf, k, edg)
        k += 1
        mt = q_mate(q, edg)
        if cw:
            edg = q_next(q, mt)
            if edg == 0:
                edg = q_first(q, q_vertex(q, mt))
        else:
            edg = q_prev(q, mt)
            if edg == 0:
                edg = q_last(q, q_vertex(q, mt))
        if edg == e:
            break
    return buf[:k].copy()


@njit(cache=True, nogil=True, _nrt=False)
def q_neighbour_scan(q, u, v):
    """Interleaved listing of u and v; stops as soon as either reveals the other."""
    if u == v:
        e = q_first(q, u)
        while e != 0:
            if q_vertex(q, q_mate(q, e)) == u:
                return True
            e = q_next(q, e)
        return False
    eu = q_first(q, u)
    ev = q_first(q, v)
    while eu != 0 and ev != 0:
        if q_vertex(q, q_mate(q, eu)) == v:
            return True
        if q_vertex(q, q_mate(q, ev)) == u:
            return True
        eu = q_next(q, eu)
        ev = q_next(q, ev)
    return False


@njit(cache=True, nogil=True, _nrt=False)
def q_list_contains(q, u, v):
    e = q_first(q, u)
    while e != 0:
        if q_vertex(q, q_mate(q, e)) == v:
            return True
        e = q_next(q, e)
    return False


@njit(cache=True, nogil=True)
def q_dfs(q, start, n):
    visited = np.zeros(n + 1, dtype=np.uint8)
    out = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    visited[start] = 1
    out[0] = start
    k = 1
    stack[0] = q_first(q, start)
    top = 1
    while top:
        e = stack[top - 1]
        if e == 0:
            top -= 1
            continue
        stack[top - 1] = q_next(q, e)
        w = q_vertex(q, q_mate(q, e))
        if visited[w] == 0:
            visited[w] = 1
            out[k] = w
            k += 1
            stack[top] = q_first(q, w)
            top += 1
    return out[:k].copy()


@njit(cache=True, nogil=True, _nrt=False)
def _apply(q, op, args, out):
    for k in range(len(args)):
        x = args[k]
        if op == 0:
            out[k] = q_first(q, x)
        elif op == 1:
            out[k] = q_last(q, x)
        elif op == 2:
            out[k] = q_next(q, x)
        elif op == 3:
            out[k] = q_prev(q, x)
        elif op == 4:
            out[k] = q_mate(q, x)
        elif op == 5:
            out[k] = q_vertex(q, x)
        else:
            out[k] = q_degree(q, x)


_OPS = {"first": 0, "last": 1, "next": 2, "prev": 3, "mate": 4, "vertex": 5, "degree": 6}
_VERTEX_OPS = {"first", "last", "degree"}


# --------------------------------------------------------------------------
# indexed degree / neighbour

@njit(cache=True, nogil=True, _nrt=False)
def _indexed_degree(q, dpack, epack, v):
    if sp_access(dpack, v):
        r = sp_rank1(dpack, v)
        return sp_select(epack, 1, r) - sp_select(epack, 1, r - 1)
    return q_degree(q, v)


@njit(cache=True, nogil=True, _nrt=False)
def _indexed_degree_many(q, dpack, epack, vs, out):
    for k in range(len(vs)):
        out[k] = _indexed_degree(q, dpack, epack, vs[k])


@njit(cache=True, nogil=True, _nrt=False)
def _indexed_neighbour(q, dpack, goff, gtgt, u, v):
    if u == v:
        return q_neighbour_scan(q, u, u)
    mu = sp_access(dpack, u)
    mv = sp_access(dpack, v)
    if mu and mv:
        ru = sp_rank1(dpack, u)
        rv = sp_rank1(dpack, v)
        lo = goff[ru - 1]
        hi = goff[ru]
        while lo < hi:
            mid = (lo + hi) >> 1
            if gtgt[mid] < rv:
                lo = mid + 1
            else:
                hi = mid
        return lo < goff[ru] and gtgt[lo] == rv
    if not mu:
        return q_list_contains(q, u, v)
    return q_list_contains(q, v, u)


@njit(cache=True, nogil=True, _nrt=False)
def _scan_neighbour_many(q, us, vs, out):
    for k in range(len(us)):
        out[k] = q_neighbour_scan(q, us[k], vs[k])


@njit(cache=True, nogil=True, _nrt=False)
def _indexed_neighbour_many(q, dpack, goff, gtgt, us, vs, out):
    for k in range(len(us)):
        out[k] = _indexed_neighbour(q, dpack, goff, gtgt, us[k], vs[k])


def default_degree_threshold(m: int) -> int:
    return max(1, math.ceil(math.log2(m))) if m > 1 else 1


def default_neighbour_threshold(m: int) -> int:
    if m <= 2:
        return 1
    lg = math.ceil(math.log2(m))
    return max(1, lg * math.ceil(math.log2(lg))) if lg > 1 else 1


class DegreeIndex:
    """Degrees of the vertices with degree >= f, stored in unary."""

    def __init__(self, f: int, D: SparseBitVector, E: SparseBitVector):
        self.f = int(f)
        self.D = D
        self.E = E

    @classmethod
    def build(cls, degrees: np.ndarray, f: int) -> "DegreeIndex":
        """``degrees[v - 1]`` is the degree of vertex ``v``."""
        if f < 1:
            raise ValidationError("degree threshold must be >= 1")
        marked = degrees >= f
        dm = degrees[marked]
        ends = np.cumsum(dm) - 1
        e_bits = np.zeros(int(dm.sum()), dtype=np.uint8)
        e_bits[ends] = 1
        return cls(f, SparseBitVector(marked.astype(np.uint8)), SparseBitVector(e_bits))

    def size_in_bits(self) -> int:
        return self.D.size_in_bits() + self.E.size_in_bits()

    def to_bytes(self) -> bytes:
        return struct.pack("<Q", self.f) + self.D.to_bytes() + self.E.to_bytes()

    @classmethod
    def read_from(cls, buf, offset: int):
        (f,) = struct.unpack_from("<Q", buf, offset)
        D, offset = SparseBitVector.read_from(buf, offset + 8)
        E, offset = SparseBitVector.read_from(buf, offset)
        return cls(f, D, E), offset


class NeighbourIndex:
    """Simple graph among vertices of degree >= f' as sorted adjacency lists.

    Vertices are renumbered by their rank among the marked ones (1-based).
    """

    def __init__(self, f: int, D: SparseBitVector, offsets: np.ndarray, targets: np.ndarray):
        self.f = int(f)
        self.D = D
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.targets = np.ascontiguousarray(targets, dtype=np.int64)

    @classmethod
    def build(cls, degrees: np.ndarray, vertex_seq: np.ndarray, mate_pos: np.ndarray, f: int) -> "NeighbourIndex":
        if f < 1:
            raise ValidationError("neighbour threshold must be >= 1")
        marked = degrees >= f
        rank = np.cumsum(marked)           # rank[v - 1] = rank of vertex v among marked
        u = vertex_seq
        w = vertex_seq[mate_pos]
        keep = marked[u - 1] & marked[w - 1] & (u != w)
        ru = rank[u[keep] - 1]
        rw = rank[w[keep] - 1]
        k = int(marked.sum())
        pairs = np.unique(np.stack([ru, rw], axis=1), axis=0) if len(ru) else np.zeros((0, 2), np.int64)
        offsets = np.zeros(k + 1, dtype=np.int64)
        if len(pairs):
            offsets[1:] = np.cumsum(np.bincount(pairs[:, 0] - 1, minlength=k))
        return cls(f, SparseBitVector(marked.astype(np.uint8)), offsets, pairs[:, 1].copy())

    @property
    def vertices(self) -> int:
        return len(self.offsets) - 1

    def adjacency(self, r: int) -> np.ndarray:
        return self.targets[self.offsets[r - 1]:self.offsets[r]]

    def size_in_bits(self) -> int:
        k = self.vertices
        width = max(1, int(k).bit_length())
        ptr_width = max(1, int(len(self.targets)).bit_length())
        return self.D.size_in_bits() + len(self.targets) * width + (k + 1) * ptr_width

    def to_bytes(self) -> bytes:
        return (struct.pack("<Q", self.f) + self.D.to_bytes()
                + struct.pack("<QQ", self.vertices, len(self.targets))
                + self.offsets.astype("<u8").tobytes() + self.targets.astype("<u8").tobytes())

    @classmethod
    def read_from(cls, buf, offset: int):
        (f,) = struct.unpack_from("<Q", buf, offset)
        D, offset = SparseBitVector.read_from(buf, offset + 8)
        k, e = struct.unpack_from("<QQ", buf, offset)
        offset += 16
        offsets = np.frombuffer(buf, dtype="<u8", count=k + 1, offset=offset).astype(np.int64)
        offset += 8 * (k + 1)
        targets = np.frombuffer(buf, dtype="<u8", count=e, offset=offset).astype(np.int64)
        offset += 8 * e
        return cls(f, D, offsets, targets), offset


# --------------------------------------------------------------------------
# replay: vertex and mate of every position in one linear pass

@njit(cache=True, nogil=True)
def _replay(a, b, bs, n):
    m2 = len(a)
    vseq = np.empty(m2, dtype=np.int64)
    mate = np.empty(m2, dtype=np.int64)
    vstack = np.empty(max(n, 1), dtype=np.int64)
    tstack = np.empty(max(len(b) // 2, 1), dtype=np.int64)
    nstack = np.empty(max(len(bs) // 2, 1), dtype=np.int64)
    vt = 0
    tt = 0
    nt = 0
    cur = 1
    cnt = 1
    ib = 0
    ibs = 0
    for i in range(m2):
        vseq[i] = cur
        if a[i]:
            if b[ib] == 0:
                tstack[tt] = i
                tt += 1
                vstack[vt] = cur
                vt += 1
                cnt += 1
                cur = cnt
            else:
                tt -= 1
                j = tstack[tt]
                mate[i] = j
                mate[j] = i
                vt -= 1
                cur = vstack[vt]
            ib += 1
        else:
            if bs[ibs] == 0:
                nstack[nt] = i
                nt += 1
            else:
                nt -= 1
                j = nstack[nt]
                mate[i] = j
                mate[j] = i
            ibs += 1
    return vseq, mate


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


SYMBOLS = "()[]"


class PembStructure:
    """A, B and B* with their query directories, plus optional indexes."""

    def __init__(self, A: BitVector, B: ParenSeq, Bstar: ParenSeq, degree_index: DegreeIndex | None = None,
                 neighbour_index: NeighbourIndex | None = None):
        if A.length % 2:
            raise ValidationError("A must have even length")
        if A.ones != B.bv.length or A.length - A.ones != Bstar.bv.length:
            raise ValidationError("A's popcounts do not match the lengths of B and B*")
        self.A = A
        self.B = B
        self.Bstar = Bstar
        self.m = A.length // 2
        self.n = B.bv.length // 2 + 1
        self.degree_index = degree_index
        self.neighbour_index = neighbour_index
        self._q = (A.pack, B.pack, Bstar.pack, A.length)
        self._replay_cache = None

    @classmethod
    def from_bits(cls, a, b, bs, threads: int = 1) -> "PembStructure":
        return cls(BitVector.from_bits(a, threads), ParenSeq.from_bits(b, threads), ParenSeq.from_bits(bs, threads))

    def __repr__(self) -> str:
        return f"PembStructure(n={self.n}, m={self.m})"

    # ---- range checks
    def _v(self, v) -> int:
        v = int(v)
        if not 1 <= v <= self.n:
            raise RangeError(f"vertex {v} out of range [1, {self.n}]")
        return v

    def _i(self, i) -> int:
        i = int(i)
        if not 1 <= i <= 2 * self.m:
            raise RangeError(f"position {i} out of range [1, {2 * self.m}]")
        return i

    # ---- basic queries
    def first(self, v: int) -> int:
        return int(q_first(self._q, self._v(v)))

    def last(self, v: int) -> int:
        return int(q_last(self._q, self._v(v)))

    def next(self, i: int) -> int:
        return int(q_next(self._q, self._i(i)))

    def prev(self, i: int) -> int:
        return int(q_prev(self._q, self._i(i)))

    def mate(self, i: int) -> int:
        return int(q_mate(self._q, self._i(i)))

    def vertex(self, i: int) -> int:
        return int(q_vertex(self._q, self._i(i)))

    def many(self, op: str, args) -> np.ndarray:
        """Vectorised form of first/last/next/prev/mate/vertex/degree (unindexed degree)."""
        if op not in _OPS:
            raise ValueError(f"unknown operation {op!r}")
        args = np.ascontiguousarray(args, dtype=np.int64)
        hi = self.n if op in _VERTEX_OPS else 2 * self.m
        if args.size and (args.min() < 1 or args.max() > hi):
            raise RangeError(f"{op} argument out of range [1, {hi}]")
        out = np.empty(len(args), dtype=np.int64)
        _apply(self._q, _OPS[op], args, out)
        return out

    # ---- derived queries
    def degree(self, v: int) -> int:
        v = self._v(v)
        if self.degree_index is not None:
            di = self.degree_index
            return int(_indexed_degree(self._q, di.D.pack, di.E.pack, v))
        return int(q_degree(self._q, v))

    def degree_many(self, vs, indexed: bool = True) -> np.ndarray:
        vs = np.ascontiguousarray(vs, dtype=np.int64)
        if vs.size and (vs.min() < 1 or vs.max() > self.n):
            raise RangeError("vertex out of range")
        if indexed and self.degree_index is not None:
            di = self.degree_index
            out = np.empty(len(vs), dtype=np.int64)
            _indexed_degree_many(self._q, di.D.pack, di.E.pack, vs, out)
            return out
        return self.many("degree", vs)

    def listing(self, v: int, order: str = "ccw") -> list[int]:
        if order not in ("ccw", "cw"):
            raise ValueError("order must be 'ccw' or 'cw'")
        return q_listing(self._q, self._v(v), order == "ccw").tolist()

    def face(self, e: int, order: str = "cw") -> list[int]:
        if order not in ("ccw", "cw"):
            raise ValueError("order must be 'ccw' or 'cw'")
        e = self._i(e)
        return q_face(self._q, e, order == "cw").tolist()

    def face_positions(self, e: int, order: str = "cw") -> list[int]:
        return q_face_edges(self._q, self._i(e), order == "cw").tolist()

    def neighbour(self, u: int, v: int) -> bool:
        u, v = self._v(u), self._v(v)
        ni = self.neighbour_index
        if ni is not None:
            return bool(_indexed_neighbour(self._q, ni.D.pack, ni.offsets, ni.targets, u, v))
        return bool(q_neighbour_scan(self._q, u, v))

    def neighbour_many(self, us, vs, indexed: bool = True) -> np.ndarray:
        us = np.ascontiguousarray(us, dtype=np.int64)
        vs = np.ascontiguousarray(vs, dtype=np.int64)
        for arr in (us, vs):
            if arr.size and (arr.min() < 1 or arr.max() > self.n):
                raise RangeError("vertex out of range")
        out = np.empty(len(us), dtype=np.bool_)
        ni = self.neighbour_index
        if indexed and ni is not None:
            _indexed_neighbour_many(self._q, ni.D.pack, ni.offsets, ni.targets, us, vs, out)
        else:
            _scan_neighbour_many(self._q, us, vs, out)
        return out

    def dfs(self, start: int = 1) -> list[int]:
        return q_dfs(self._q, self._v(start), self.n).tolist()

    def faces(self) -> list[list[int]]:
        """Every face as a list of positions (the face walk partitions 1..2m)."""
        seen = np.zeros(2 * self.m + 1, dtype=bool)
        out = []
        for e in range(1, 2 * self.m + 1):
            if not seen[e]:
                cyc = self.face_positions(e)
                seen[cyc] = True
                out.append(cyc)
        return out

    # ---- linear-time views
    def replay(self) -> tuple[np.ndarray, np.ndarray]:
        """(vertex of each position, 1-based ids; mate of each position, 0-based)."""
        if self._replay_cache is None:
            self._replay_cache = _replay(self.A.to_array(), self.B.bv.to_array(), self.Bstar.bv.to_array(), self.n)
        return self._replay_cache

    def degrees(self) -> np.ndarray:
        vseq, _ = self.replay()
        return np.bincount(vseq - 1, minlength=self.n).astype(np.int64)

    def build_degree_index(self, f: int | None = None) -> DegreeIndex:
        f = default_degree_threshold(self.m) if f is None else int(f)
        self.degree_index = DegreeIndex.build(self.degrees(), f)
        return self.degree_index

    def build_neighbour_index(self, f: int | None = None) -> NeighbourIndex:
        f = default_neighbour_threshold(self.m) if f is None else int(f)
        vseq, mate = self.replay()
        self.neighbour_index = NeighbourIndex.build(self.degrees(), vseq, mate, f)
        return self.neighbour_index

    def symbols(self) -> np.ndarray:
        """S as codes 0..3 for '(', ')', '[', ']'."""
        a = self.A.to_array().astype(bool)
        s = np.empty(len(a), dtype=np.uint8)
        s[a] = self.B.bv.to_array()
        s[~a] = 2 + self.Bstar.bv.to_array()
        return s

    def symbol_string(self) -> str:
        return "".join(SYMBOLS[c] for c in self.symbols().tolist())

    def bits_per_edge(self) -> float:
        """Core bits plus query directories, as held in memory, per edge."""
        if self.m == 0:
            return 0.0
        return self.size_in_bits() / self.m

    def size_in_bits(self, include_indexes: bool = False) -> int:
        total = self.A.size_in_bits() + self.B.size_in_bits() + self.Bstar.size_in_bits()
        if include_indexes:
            if self.degree_index is not None:
                total += self.degree_index.size_in_bits()
            if self.neighbour_index is not None:
                total += self.neighbour_index.size_in_bits()
        return total

    def stats(self) -> dict:
        s = self.symbols()
        counts = np.bincount(s, minlength=4)
        h0 = _entropy(counts)
        h1 = 0.0
        if len(s):
            pairs = np.bincount(s.astype(np.int64) * 4 + np.roll(s, -1), minlength=16).reshape(4, 4)
            for c in range(4):
                if counts[c]:
                    h1 += counts[c] / len(s) * _entropy(pairs[c])
        m = max(self.m, 1)
        raw = 2 * self.m + 2 * (self.n - 1) + 2 * (self.m - self.n + 1)
        out = {
            "n": self.n,
            "m": self.m,
            "bits_per_edge": round(self.bits_per_edge(), 6),
            "serialized_bits_per_edge": round(8 * len(self.to_bytes()) / m, 6),
            "raw_bits": raw,
            "directory_bits": self.size_in_bits() - raw,
            "H0": round(h0, 6),
            "H1": round(float(h1), 6),
            "h1_bits_per_edge": round(float(2 * h1 * self.m / m), 6),
            "count_open": int(counts[0]),
            "count_close": int(counts[1]),
            "count_open_star": int(counts[2]),
            "count_close_star": int(counts[3]),
            "A_bits": self.A.size_in_bits(),
            "B_bits": self.B.size_in_bits(),
            "Bstar_bits": self.Bstar.size_in_bits(),
        }
        if self.degree_index is not None:
            out["degree_index_bits"] = self.degree_index.size_in_bits()
        if self.neighbour_index is not None:
            out["neighbour_index_bits"] = self.neighbour_index.size_in_bits()
        return out

    # ---- serialization
    def to_bytes(self) -> bytes:
        out = io.BytesIO()
        out.write(MAGIC)
        out.write(struct.pack("<BQQ", VERSION, self.n, self.m))
        out.write(self.A.to_bytes())
        out.write(self.B.to_bytes())
        out.write(self.Bstar.to_bytes())
        flags = (FLAG_DEGREE if self.degree_index is not None else 0) | (
            FLAG_NEIGHBOUR if self.neighbour_index is not None else 0)
        out.write(struct.pack("<B", flags))
        if self.degree_index is not None:
            out.write(self.degree_index.to_bytes())
        if self.neighbour_index is not None:
            out.write(self.neighbour_index.to_bytes())
        return out.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, threads: int = 1) -> "PembStructure":
        buf = memoryview(data)
        if bytes(buf[:4]) != MAGIC:
            raise ValidationError("not a .pemb file (bad magic)")
        try:
            version, n, m = struct.unpack_from("<BQQ", buf, 4)
            if version != VERSION:
                raise ValidationError(f"unsupported .pemb version {version}")
            off = 4 + 17
            A, off = BitVector.read_from(buf, off, threads)
            B, off = ParenSeq.read_from(buf, off, threads)
            S, off = ParenSeq.read_from(buf, off, threads)
            (flags,) = struct.unpack_from("<B", buf, off)
            off += 1
            di = ni = None
            if flags & FLAG_DEGREE:
                di, off = DegreeIndex.read_from(buf, off)
            if flags & FLAG_NEIGHBOUR:
                ni, off = NeighbourIndex.read_from(buf, off)
        except struct.error:
            raise ValidationError("truncated .pemb file") from None
        if off != len(buf):
            raise ValidationError("trailing bytes in .pemb file")
        s = cls(A, B, S, di, ni)
        if (s.n, s.m) != (n, m):
            raise ValidationError("header counts disagree with the stored sequences")
        return s

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path, threads: int = 1) -> "PembStructure":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read(), threads)


def recover_embedding(s: PembStructure) -> RotationSystem:
    """Rebuild a rotation system: vertex ``v - 1`` for preorder id ``v``, each
    rotation in processing order, edges numbered by first processing."""
    vseq, mate = s.replay()
    m2 = 2 * s.m
    pos = np.arange(m2, dtype=np.int64)
    first_of_pair = pos < mate
    eid = np.empty(m2, dtype=np.int64)
    eid[first_of_pair] = np.arange(s.m)
    eid[~first_of_pair] = eid[mate[~first_of_pair]]
    order = np.argsort(vseq, kind="stable")
    offsets = np.zeros(s.n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(np.bincount(vseq - 1, minlength=s.n))
    edges = np.stack([vseq[first_of_pair], vseq[mate[first_of_pair]]], axis=1) - 1
    return RotationSystem.from_csr(edges, offsets, eid[order], 0)


def implied_tree(s: PembStructure, g: RotationSystem) -> SpanningTree:
    """The tree of a recovered embedding: the edges processed as tree edges."""
    a = s.A.to_array().astype(bool)
    _, mate = s.replay()
    pos = np.flatnonzero(a & (np.arange(2 * s.m) < mate))
    # recovered edge ids are numbered by first processing position
    first_pos = np.flatnonzero(np.arange(2 * s.m) < mate)
    ids = np.searchsorted(first_pos, pos)
    return spanning_tree_from_edges(g, ids)


def encode(g: RotationSystem, tree: SpanningTree | None = None) -> PembStructure:
    from .rotation import spanning_tree_dfs

    return build_sequential(g, tree if tree is not None else spanning_tree_dfs(g))


@njit(cache=True, nogil=True)
def _bench_kernel(q, op, args):
    """Run one query per argument without materialising results; returns a checksum."""
    acc = 0
    for k in range(len(args)):
        x = args[k]
        if op == 0:
            acc += q_degree(q, x)
        elif op == 1:
            acc += len(q_listing(q, x, True))
        else:
            acc += len(q_face(q, x, True))
    return acc


def bench_queries(s: PembStructure, op: str, args) -> int:
    codes = {"degree": 0, "listing": 1, "face": 2}
    return int(_bench_kernel(s._q, codes[op], np.ascontiguousarray(args, dtype=np.int64)))
