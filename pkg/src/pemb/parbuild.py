"""Fork-join construction of A, B and B* from a graph and a spanning tree.

The sequential encoder walks the tree once. Here the same walk is rebuilt
from independent pieces, so that every step is a parallel loop:

1. each tree half-edge (an entry of the Euler tour) finds its successor in
   the tour and two weights: 1 for B, and ``1 + C[mate]`` for A, which also
   covers the non-tree half-edges processed right after it;
2. list ranking turns the weights into B and A positions;
3. tree bits are scattered into A and B;
4. every non-tree half-edge gets its B* index from the tree entry it follows;
5. a B* bit is 1 exactly when the mate's index is smaller;
6. rank/select and parenthesis directories are built per block.

Each step writes disjoint ranges, so the bytes do not depend on the thread count.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ._forkjoin import parallel_for, prefix_sum, resolve_threads, run_tasks
from .core import PembStructure
from .errors import StructureError, ValidationError
from .parens import ParenSeq, check_balanced
from .rotation import RotationSystem, SpanningTree
from .succinct import BitVector, pack_words

__all__ = ["par_build", "list_ranking", "list_ranking_sequential", "prefix_sum", "par_build_directories"]


# --------------------------------------------------------------------------
# step 1: Euler tour wiring

@njit(cache=True, nogil=True)
def _wire(lo, hi, et_src, et_tgt, et_mat, vt_first, vt_last, C, root, succ, value, wA):
    for j in range(lo, hi):
        s = et_src[j]
        w = et_tgt[j]
        mj = et_mat[j]
        if s == root or vt_first[s] != j:
            # descending into w; next comes w's first child edge, or straight back up
            value[j] = 0
            if vt_first[w] == vt_last[w]:
                succ[j] = mj
            else:
                succ[j] = vt_first[w] + 1
        else:
            # returning to w; continue after the edge we left w by
            value[j] = 1
            if mj == vt_last[w]:
                succ[j] = -1 if w == root else vt_first[w]
            else:
                succ[j] = mj + 1
        wA[j] = C[mj] + 1
    return hi - lo


# --------------------------------------------------------------------------
# step 2: list ranking

@njit(cache=True, nogil=True)
def _sweep(lo, hi, heads, is_head, succ, w1, w2, r1, r2, sub, sub_next, sub_tot1, sub_tot2, sub_len, limit):
    """Walk each sublist from its head to the next head, storing local inclusive sums."""
    touched = 0
    for s in range(lo, hi):
        j = heads[s]
        a = 0
        b = 0
        steps = 0
        while True:
            if sub[j] != -1:
                # already claimed by another sublist: the chain merges or loops
                sub_len[s] = -1
                break
            sub[j] = s
            a += w1[j]
            b += w2[j]
            r1[j] = a
            r2[j] = b
            steps += 1
            nxt = succ[j]
            if nxt < 0 or is_head[nxt] >= 0 or steps > limit:
                sub_next[s] = is_head[nxt] if nxt >= 0 else -1
                break
            j = nxt
        if sub_len[s] != -1:
            sub_len[s] = steps
        sub_tot1[s] = a
        sub_tot2[s] = b
        touched += steps
    return touched


@njit(cache=True, nogil=True)
def _fixup(lo, hi, sub, off1, off2, r1, r2):
    for j in range(lo, hi):
        s = sub[j]
        r1[j] += off1[s]
        r2[j] += off2[s]
    return hi - lo


def list_ranking(succ: np.ndarray, head: int, weights1: np.ndarray, weights2: np.ndarray | None = None,
                 threads: int | None = 1, counters: dict | None = None):
    """Inclusive weighted ranks along the chain ``head -> succ[head] -> ... -> -1``.

    Sublists start at ``max(8 * threads, 1)`` evenly spaced entries plus ``head``;
    each is swept sequentially, their totals combined in chain order, and the
    offsets added back in parallel. Returns ``(rank1, rank2)``.
    """
    threads = resolve_threads(threads)
    succ = np.ascontiguousarray(succ, dtype=np.int64)
    N = len(succ)
    w1 = np.ascontiguousarray(weights1, dtype=np.int64)
    w2 = np.ones(N, dtype=np.int64) if weights2 is None else np.ascontiguousarray(weights2, dtype=np.int64)
    r1 = np.zeros(N, dtype=np.int64)
    r2 = np.zeros(N, dtype=np.int64)
    if N == 0:
        return r1, r2
    if not 0 <= head < N:
        raise StructureError("list head out of range")
    if np.any((succ < -1) | (succ >= N)):
        raise StructureError("successor out of range")
    s = max(8 * threads, 1)
    heads = np.unique(np.concatenate([[head], np.linspace(0, N, num=min(s, N), endpoint=False).astype(np.int64)]))
    ns = len(heads)
    is_head = np.full(N, -1, dtype=np.int64)
    is_head[heads] = np.arange(ns)
    sub = np.full(N, -1, dtype=np.int64)
    sub_next = np.full(ns, -1, dtype=np.int64)
    sub_tot1 = np.zeros(ns, dtype=np.int64)
    sub_tot2 = np.zeros(ns, dtype=np.int64)
    sub_len = np.zeros(ns, dtype=np.int64)
    touched = parallel_for(_sweep, ns, threads, heads, is_head, succ, w1, w2, r1, r2, sub, sub_next,
                           sub_tot1, sub_tot2, sub_len, N, grain=1)
    if np.any(sub_len < 0):
        raise StructureError("successor chain merges into itself (cycle or shared tail)")
    # combine in chain order starting from the true head
    off1 = np.zeros(ns, dtype=np.int64)
    off2 = np.zeros(ns, dtype=np.int64)
    cur = int(is_head[head])
    acc1 = acc2 = 0
    covered = 0
    for _ in range(ns):
        off1[cur] = acc1
        off2[cur] = acc2
        acc1 += int(sub_tot1[cur])
        acc2 += int(sub_tot2[cur])
        covered += int(sub_len[cur])
        cur = int(sub_next[cur])
        if cur < 0:
            break
    else:
        raise StructureError("successor chain loops back to a visited sublist")
    if covered != N:
        raise StructureError(f"successor chain from the head covers {covered} of {N} entries")
    fix = parallel_for(_fixup, N, threads, sub, off1, off2, r1, r2)
    if counters is not None:
        counters["rank_touches"] = counters.get("rank_touches", 0) + int(sum(touched)) + int(sum(fix))
        counters["aux_words"] = counters.get("aux_words", 0) + 5 * N + 6 * ns
    return r1, r2


def list_ranking_sequential(succ, head: int, weights) -> np.ndarray:
    """Pointer-chasing reference: inclusive sums along the chain."""
    succ = np.asarray(succ, dtype=np.int64)
    out = np.zeros(len(succ), dtype=np.int64)
    acc = 0
    j = head
    steps = 0
    while j >= 0:
        if steps >= len(succ):
            raise StructureError("successor chain has a cycle")
        acc += int(weights[j])
        out[j] = acc
        j = int(succ[j])
        steps += 1
    if steps != len(succ):
        raise StructureError(f"successor chain covers {steps} of {len(succ)} entries")
    return out


# --------------------------------------------------------------------------
# steps 3-5: scatter

@njit(cache=True, nogil=True)
def _scatter_tree(lo, hi, rankA, rankB, et_mat, C, lead, value, a, b, posA, posB):
    for j in range(lo, hi):
        pa = lead + rankA[j] - C[et_mat[j]]
        pb = rankB[j]
        posA[j] = pa
        posB[j] = pb
        a[pa - 1] = 1
        b[pb - 1] = value[j]
    return hi - lo


@njit(cache=True, nogil=True)
def _fill_dual(lo, hi, posA, posB, et_mat, et_ref, C, order, d_pos, d_edge):
    """Non-tree half-edges following entry j get consecutive B* indices after
    the zeros of A that precede it."""
    touched = 0
    for j in range(lo, hi):
        k = et_mat[j]
        c = C[k]
        if c == 0:
            continue
        base = posA[j] - posB[j]          # zeros of A before position posA[j]
        start = et_ref[k] + 1
        for t in range(c):                # short sequential run per entry
            h = order[start + t]
            d_pos[h] = base + t
            d_edge[base + t] = h
        touched += c
    return touched


@njit(cache=True, nogil=True)
def _orient_dual(lo, hi, d_edge, d_pos, mate, bs):
    for q in range(lo, hi):
        bs[q] = 1 if d_pos[mate[d_edge[q]]] < q else 0
    return hi - lo


def par_build_directories(a: np.ndarray, b: np.ndarray, bs: np.ndarray, threads: int | None = 1):
    """Pack the raw bits and build all three directories concurrently."""
    threads = resolve_threads(threads)
    check_balanced(b)
    check_balanced(bs)
    words = [pack_words(x) for x in (a, b, bs)]
    A, Bv, Sv = run_tasks([(BitVector, (words[0], len(a), threads)),
                           (BitVector, (words[1], len(b), threads)),
                           (BitVector, (words[2], len(bs), threads))], 1)
    B = ParenSeq(Bv, threads, validate=False)
    S = ParenSeq(Sv, threads, validate=False)
    return A, B, S


def par_build(g: RotationSystem, t: SpanningTree, threads: int | None = None,
              counters: dict | None = None) -> PembStructure:
    """Parallel encoder; output is bit-identical to :func:`pemb.core.build_sequential`."""
    threads = resolve_threads(threads)
    n, m = g.n, g.m
    N = 2 * (n - 1)
    if len(t.et_ref) != N or len(t.C) != N or len(t.order) != 2 * m or t.root != g.root:
        raise ValidationError("spanning tree does not belong to this graph")
    if int(t.C.sum()) + t.lead != 2 * m - N:
        raise ValidationError("non-tree counts C do not add up to 2m - 2(n - 1)")
    ctr = counters if counters is not None else {}

    succ = np.empty(N, dtype=np.int64)
    value = np.empty(N, dtype=np.uint8)
    wA = np.empty(N, dtype=np.int64)
    ctr["wire_touches"] = sum(parallel_for(_wire, N, threads, t.et_src, t.et_tgt, t.et_mat, t.vt_first,
                                           t.vt_last, t.C, g.root, succ, value, wA))
    ctr["aux_words"] = 3 * N

    a = np.zeros(2 * m, dtype=np.uint8)
    b = np.zeros(N, dtype=np.uint8)
    bs = np.zeros(2 * m - N, dtype=np.uint8)
    d_pos = np.empty(2 * m, dtype=np.int64)
    d_edge = np.empty(2 * m - N, dtype=np.int64)
    ctr["aux_words"] += 2 * m + (2 * m - N)

    if N:
        head = int(t.vt_first[g.root])
        rankA, rankB = list_ranking(succ, head, wA, None, threads, ctr)
        if rankB.max() != N or rankA.max() + t.lead != 2 * m:
            raise StructureError("Euler tour does not cover the tree")
        posA = np.empty(N, dtype=np.int64)
        posB = np.empty(N, dtype=np.int64)
        ctr["aux_words"] += 2 * N
        ctr["scatter_touches"] = sum(parallel_for(_scatter_tree, N, threads, rankA, rankB, t.et_mat, t.C, t.lead,
                                                  value, a, b, posA, posB))
        ctr["dual_touches"] = sum(parallel_for(_fill_dual, N, threads, posA, posB, t.et_mat, t.et_ref, t.C,
                                               t.order, d_pos, d_edge))
    # the root's non-tree half-edges before its first tree edge come first of all
    lead_h = t.order[g.offsets[g.root]:g.offsets[g.root] + t.lead]
    d_pos[lead_h] = np.arange(t.lead)
    d_edge[:t.lead] = lead_h
    ctr["dual_touches"] = ctr.get("dual_touches", 0) + t.lead
    ctr["orient_touches"] = sum(parallel_for(_orient_dual, 2 * m - N, threads, d_edge, d_pos, g.mate, bs))

    A, B, S = par_build_directories(a, b, bs, threads)
    ctr["directory_touches"] = (len(A.words) + len(B.bv.words) + len(S.bv.words)) * 2
    ctr["m"] = m
    return PembStructure(A, B, S)
