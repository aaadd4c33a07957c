"""Balanced parentheses over a bitvector (0 = open, 1 = close).

``match`` and ``parent`` are answered with forward/backward excess searches.
A min-excess segment tree over fixed 1024-bit blocks lets a search skip
whole blocks, and byte lookup tables let the in-block scans skip 8 bits at
a time.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ._forkjoin import parallel_for
from .errors import RangeError, ValidationError
from .succinct import BitVector, as_bits, rank1, select0, select1

BLOCK = 1024
BLOCK_SHIFT = 10
_BIG = 1 << 30


def _byte_tables():
    tot = np.zeros(256, dtype=np.int64)
    mn = np.zeros(256, dtype=np.int64)
    for x in range(256):
        e, m = 0, 8
        for k in range(8):
            e += -1 if (x >> k) & 1 else 1
            m = min(m, e)
        tot[x], mn[x] = e, m
    return tot, mn


BYTE_TOTAL, BYTE_MIN = _byte_tables()


@njit(cache=True, nogil=True, inline="always")
def _bit(words, j):
    k = j - 1
    return np.int64((words[k >> 6] >> np.uint64(k & 63)) & np.uint64(1))


@njit(cache=True, nogil=True, inline="always")
def _byte(words, q):
    return np.int64((words[q >> 3] >> np.uint64((q & 7) * 8)) & np.uint64(0xFF))


@njit(cache=True, nogil=True, _nrt=False)
def _excess(words, supers, i):
    return i - 2 * rank1(words, supers, i)


@njit(cache=True, nogil=True, _nrt=False)
def _scan_fwd(words, j, j_end, e, d):
    """Smallest position in [j, j_end] whose excess is <= d, or -1; ``e`` is the excess at j - 1."""
    while j <= j_end:
        if (j - 1) & 7 == 0 and j + 7 <= j_end:
            x = _byte(words, (j - 1) >> 3)
            if e + BYTE_MIN[x] > d:
                e += BYTE_TOTAL[x]
                j += 8
                continue
        e += 1 - 2 * _bit(words, j)
        if e <= d:
            return j
        j += 1
    return -1


@njit(cache=True, nogil=True, _nrt=False)
def _scan_bwd(words, k, k_end, e, d):
    """Largest position in [k_end, k] whose excess is <= d, or -1; ``e`` is the excess at k."""
    while k >= k_end:
        if k & 7 == 0 and k - 7 >= k_end:
            x = _byte(words, (k - 8) >> 3)
            if e - BYTE_TOTAL[x] + BYTE_MIN[x] > d:
                e -= BYTE_TOTAL[x]
                k -= 8
                continue
        if e <= d:
            return k
        e -= 1 - 2 * _bit(words, k)
        k -= 1
    return -1


@njit(cache=True, nogil=True)
def _block_mins(lo, hi, words, supers, length, mins, leaf0):
    for t in range(lo, hi):
        start = t * BLOCK + 1
        end = min(start + BLOCK - 1, length)
        e = _excess(words, supers, start - 1)
        m = _BIG
        j = start
        while j <= end:
            if (j - 1) & 7 == 0 and j + 7 <= end:
                x = _byte(words, (j - 1) >> 3)
                m = min(m, e + BYTE_MIN[x])
                e += BYTE_TOTAL[x]
                j += 8
                continue
            e += 1 - 2 * _bit(words, j)
            m = min(m, e)
            j += 1
        mins[leaf0 + t] = m
    return hi - lo


# a paren pack is (words, supers, samples1, samples0, length, ones, mins, leaf0);
# searches skip reference counting like the bitvector kernels (_nrt=False)

@njit(cache=True, nogil=True, _nrt=False)
def fwd_search(pk, i, d):
    """Smallest j > i with excess(j) <= d, or -1."""
    words, supers, length, mins, leaf0 = pk[0], pk[1], pk[4], pk[6], pk[7]
    if i >= length:
        return -1
    t = i >> BLOCK_SHIFT
    r = _scan_fwd(words, i + 1, min((t + 1) * BLOCK, length), _excess(words, supers, i), d)
    if r >= 0:
        return r
    node = leaf0 + t
    while node > 1:
        if node & 1 == 0 and mins[node + 1] <= d:
            node += 1
            break
        node >>= 1
    if node <= 1:
        return -1
    while node < leaf0:
        node = 2 * node if mins[2 * node] <= d else 2 * node + 1
    t = node - leaf0
    return _scan_fwd(words, t * BLOCK + 1, min((t + 1) * BLOCK, length), _excess(words, supers, t * BLOCK), d)


@njit(cache=True, nogil=True, _nrt=False)
def bwd_search(pk, i, d):
    """Largest k < i (k >= 0) with excess(k) <= d, or -1. excess(0) = 0."""
    words, supers, mins, leaf0 = pk[0], pk[1], pk[6], pk[7]
    k = i - 1
    if k <= 0:
        return 0 if k == 0 and d >= 0 else -1
    t = (k - 1) >> BLOCK_SHIFT
    r = _scan_bwd(words, k, t * BLOCK + 1, _excess(words, supers, k), d)
    if r >= 0:
        return r
    node = leaf0 + t
    while node > 1:
        if node & 1 == 1 and mins[node - 1] <= d:
            node -= 1
            break
        node >>= 1
    if node <= 1:
        return 0 if d >= 0 else -1
    while node < leaf0:
        node = 2 * node + 1 if mins[2 * node + 1] <= d else 2 * node
    t = node - leaf0
    end = min((t + 1) * BLOCK, pk[4])
    return _scan_bwd(words, end, t * BLOCK + 1, _excess(words, supers, end), d)


@njit(cache=True, nogil=True, _nrt=False)
def ps_match(pk, p):
    words, supers = pk[0], pk[1]
    if _bit(words, p) == 0:
        return fwd_search(pk, p, _excess(words, supers, p) - 1)
    return bwd_search(pk, p, _excess(words, supers, p)) + 1


@njit(cache=True, nogil=True, _nrt=False)
def ps_parent(pk, v):
    words, supers = pk[0], pk[1]
    p = select0(words, supers, pk[3], v)
    e = _excess(words, supers, p - 1)
    if e == 0:
        return 0
    q = bwd_search(pk, p - 1, e - 1) + 1
    return q - rank1(words, supers, q)


@njit(cache=True, nogil=True, _nrt=False)
def _match_many(pk, idx, out):
    for k in range(len(idx)):
        out[k] = ps_match(pk, idx[k])


@njit(cache=True, nogil=True, _nrt=False)
def _parent_many(pk, idx, out):
    for k in range(len(idx)):
        out[k] = ps_parent(pk, idx[k])


def check_balanced(bits: np.ndarray) -> None:
    if len(bits) == 0:
        return
    exc = np.cumsum(1 - 2 * bits.astype(np.int64))
    if exc.min() < 0:
        raise ValidationError(f"unbalanced parentheses: excess negative at position {int(np.argmax(exc < 0)) + 1}")
    if exc[-1] != 0:
        raise ValidationError(f"unbalanced parentheses: final excess {int(exc[-1])}")


class ParenSeq:
    """A balanced forest of ``t = len / 2`` nodes, numbered by preorder (1-based)."""

    __slots__ = ("bv", "mins", "leaf0")

    def __init__(self, bv: BitVector, threads: int = 1, validate: bool = True):
        if validate:
            check_balanced(bv.to_array())
        self.bv = bv
        nblocks = (bv.length + BLOCK - 1) // BLOCK
        leaf0 = 1
        while leaf0 < max(nblocks, 1):
            leaf0 *= 2
        dtype = np.int32 if bv.length < _BIG else np.int64
        mins = np.full(2 * leaf0, _BIG, dtype=dtype)
        parallel_for(_block_mins, nblocks, threads, bv.words, bv.supers, bv.length, mins, leaf0, grain=64)
        lo = leaf0
        while lo > 1:
            half = lo // 2
            mins[half:lo] = np.minimum(mins[lo:2 * lo:2], mins[lo + 1:2 * lo:2])
            lo = half
        self.mins = mins
        self.leaf0 = leaf0

    @classmethod
    def from_bits(cls, bits, threads: int = 1) -> "ParenSeq":
        arr = as_bits(bits)
        check_balanced(arr)
        return cls(BitVector.from_bits(arr, threads), threads, validate=False)

    def __len__(self) -> int:
        return self.bv.length

    def __repr__(self) -> str:
        return f"ParenSeq(length={self.bv.length})"

    @property
    def nodes(self) -> int:
        return self.bv.length // 2

    @property
    def pack(self):
        return self.bv.pack + (self.mins, self.leaf0)

    def excess(self, i: int) -> int:
        return int(i) - 2 * self.bv.rank1(i)

    def match(self, i: int) -> int:
        i = int(i)
        if not 1 <= i <= self.bv.length:
            raise RangeError(f"position {i} out of range [1, {self.bv.length}]")
        return int(ps_match(self.pack, i))

    def parent(self, v: int) -> int:
        v = int(v)
        if not 1 <= v <= self.nodes:
            raise RangeError(f"node {v} out of range [1, {self.nodes}]")
        return int(ps_parent(self.pack, v))

    def fwd_search(self, i: int, d: int) -> int:
        return int(fwd_search(self.pack, int(i), int(d)))

    def bwd_search(self, i: int, d: int) -> int:
        return int(bwd_search(self.pack, int(i), int(d)))

    def match_many(self, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 1 or idx.max() > self.bv.length):
            raise RangeError("position out of range")
        out = np.empty(len(idx), dtype=np.int64)
        _match_many(self.pack, idx, out)
        return out

    def parent_many(self, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 1 or idx.max() > self.nodes):
            raise RangeError("node out of range")
        out = np.empty(len(idx), dtype=np.int64)
        _parent_many(self.pack, idx, out)
        return out

    def directory_bits(self) -> int:
        return self.bv.directory_bits() + 8 * self.mins.nbytes

    def size_in_bits(self) -> int:
        return self.bv.size_in_bits() + 8 * self.mins.nbytes

    def to_bytes(self) -> bytes:
        return self.bv.to_bytes()

    @classmethod
    def read_from(cls, buf, offset: int = 0, threads: int = 1):
        bv, end = BitVector.read_from(buf, offset, threads)
        return cls(bv, threads), end
