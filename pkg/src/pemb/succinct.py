"""Rank/select bitvectors.

Two encodings with the same query semantics:

* :class:`BitVector` keeps the raw bits in 64-bit words plus a cumulative
  popcount per 512-bit superblock and sampled superblock hints for select.
  Directory overhead is about 15% of the raw length.
* :class:`SparseBitVector` splits the bits into blocks of ``b`` bits and
  stores each block as (class, offset): the popcount and the index of the
  block among all ``b``-bit strings with that popcount. Offsets are packed
  with variable width and located through sampled absolute pointers plus
  short deltas.

Positions are 1-based: ``access(i)`` for ``1 <= i <= len``; ``rank_b(i)``
counts ``b`` bits in the prefix of length ``i`` (``0 <= i <= len``);
``select_b(j)`` is the position of the ``j``-th ``b`` bit, with
``select_b(0) == 0``.
"""
from __future__ import annotations

import math
import struct

import numpy as np
from numba import njit, types
from numba.core.extending import intrinsic

from ._forkjoin import parallel_for, prefix_sum, resolve_threads
from .errors import RangeError

SB_BITS = 512
SB_WORDS = SB_BITS // 64
SB_SHIFT = 9
SELECT_SAMPLE = 4096
SELECT_SHIFT = 12

_ONE = np.uint64(1)
_FULL = np.uint64(0xFFFFFFFFFFFFFFFF)


def as_bits(bits) -> np.ndarray:
    """Coerce a '0'/'1' string, a sequence of ints or an array into a uint8 0/1 array."""
    if isinstance(bits, np.ndarray) and bits.dtype == np.uint8:
        arr = bits
    elif isinstance(bits, str):
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - np.uint8(48)
    else:
        arr = np.asarray(bits)
        if arr.dtype == bool:
            arr = arr.astype(np.uint8)
        elif arr.size and (arr.min() < 0 or arr.max() > 1):
            raise ValueError("bits must be 0 or 1")
        arr = arr.astype(np.uint8, copy=False)
    if arr.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return np.ascontiguousarray(arr)


def pack_words(bits: np.ndarray) -> np.ndarray:
    """Little-endian bit packing: bit ``i`` (0-based) is bit ``i % 64`` of word ``i // 64``."""
    nwords = (len(bits) + 63) // 64
    packed = np.packbits(bits, bitorder="little")
    buf = np.zeros(nwords * 8, dtype=np.uint8)
    buf[: len(packed)] = packed
    return buf.view("<u8").astype(np.uint64)


def unpack_words(words: np.ndarray, length: int) -> np.ndarray:
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little", count=length) if length else np.zeros(0, np.uint8)


# --------------------------------------------------------------------------
# word-level kernels

@intrinsic
def _ctpop(typingctx, x):
    # LLVM's population count; lowers to a single instruction where the CPU has one
    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return types.uint64(types.uint64), codegen


@njit(cache=True, nogil=True, inline="always")
def popcount(x):
    return np.int64(_ctpop(np.uint64(x)))


@njit(cache=True, nogil=True, _nrt=False)
def select_in_word(x, k):
    """0-based offset of the k-th (1-based) set bit of ``x``."""
    pos = 0
    width = 32
    while width:
        c = popcount(x & ((_ONE << np.uint64(width)) - _ONE))
        if c < k:
            k -= c
            x >>= np.uint64(width)
            pos += width
        width >>= 1
    return pos


@njit(cache=True, nogil=True)
def _super_counts(lo, hi, words, out):
    nwords = len(words)
    for sb in range(lo, hi):
        c = 0
        end = min((sb + 1) * SB_WORDS, nwords)
        for w in range(sb * SB_WORDS, end):
            c += popcount(words[w])
        out[sb] = c
    return (hi - lo) * SB_WORDS


@njit(cache=True, nogil=True, _nrt=False)
def get_bit(words, i):
    """Bit at 1-based position ``i``."""
    k = i - 1
    return np.int64((words[k >> 6] >> np.uint64(k & 63)) & _ONE)


# Query kernels are compiled with _nrt=False: they only read arrays the caller
# owns and never allocate, so they can skip reference counting. Taking arrays
# out of the pack tuples otherwise costs an atomic incref/decref pair each,
# which was several times the cost of the rank itself.

@njit(cache=True, nogil=True, _nrt=False)
def rank1(words, supers, i):
    sb = i >> SB_SHIFT
    r = supers[sb]
    wi = i >> 6
    for w in range(sb * SB_WORDS, wi):
        r += popcount(words[w])
    rem = i & 63
    if rem:
        r += popcount(words[wi] & ((_ONE << np.uint64(rem)) - _ONE))
    return r


@njit(cache=True, nogil=True, _nrt=False)
def select1(words, supers, samples, j):
    if j <= 0:
        return 0
    s = (j - 1) >> SELECT_SHIFT
    lo = samples[s]
    hi = samples[s + 1]
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if supers[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    r = supers[lo]
    w = lo * SB_WORDS
    while True:
        c = popcount(words[w])
        if r + c >= j:
            break
        r += c
        w += 1
    return w * 64 + select_in_word(words[w], j - r) + 1


@njit(cache=True, nogil=True, _nrt=False)
def select0(words, supers, samples, j):
    if j <= 0:
        return 0
    s = (j - 1) >> SELECT_SHIFT
    lo = samples[s]
    hi = samples[s + 1]
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if mid * SB_BITS - supers[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    r = lo * SB_BITS - supers[lo]
    w = lo * SB_WORDS
    while True:
        x = words[w] ^ _FULL
        c = popcount(x)
        if r + c >= j:
            break
        r += c
        w += 1
    return w * 64 + select_in_word(words[w] ^ _FULL, j - r) + 1


# Bitvector "packs" are tuples (words, supers, samples1, samples0, length, ones)
# so that higher layers can call these from inside their own kernels.

@njit(cache=True, nogil=True, inline="always")
def p_access(p, i):
    return get_bit(p[0], i)


@njit(cache=True, nogil=True, inline="always")
def p_rank1(p, i):
    return rank1(p[0], p[1], i)


@njit(cache=True, nogil=True, inline="always")
def p_rank0(p, i):
    return i - rank1(p[0], p[1], i)


@njit(cache=True, nogil=True, inline="always")
def p_select1(p, j):
    return select1(p[0], p[1], p[2], j)


@njit(cache=True, nogil=True, inline="always")
def p_select0(p, j):
    return select0(p[0], p[1], p[3], j)


@njit(cache=True, nogil=True, _nrt=False)
def _rank1_many(p, idx, out):
    for k in range(len(idx)):
        out[k] = rank1(p[0], p[1], idx[k])


@njit(cache=True, nogil=True, _nrt=False)
def _select_many(p, bit, idx, out):
    for k in range(len(idx)):
        if bit:
            out[k] = select1(p[0], p[1], p[2], idx[k])
        else:
            out[k] = select0(p[0], p[1], p[3], idx[k])


def _select_samples(cum: np.ndarray, count: int, nsb: int) -> np.ndarray:
    # cum[sb] = number of bits of the sampled kind in superblocks [0, sb]
    k = (count + SELECT_SAMPLE - 1) // SELECT_SAMPLE
    targets = np.arange(k, dtype=np.int64) * SELECT_SAMPLE + 1
    samples = np.empty(k + 1, dtype=np.int64)
    samples[:k] = np.searchsorted(cum, targets, side="left")
    samples[k] = max(nsb - 1, 0)
    return samples


def build_directory(words: np.ndarray, length: int, threads: int = 1):
    """Superblock ranks and select samples for ``words``; parallel over superblock chunks."""
    nsb = (length + SB_BITS - 1) // SB_BITS
    counts = np.zeros(nsb, dtype=np.int64)
    parallel_for(_super_counts, nsb, threads, words, counts, grain=max(1, 4096 // SB_WORDS))
    cum = prefix_sum(counts, threads)
    supers = np.zeros(nsb + 1, dtype=np.int64)
    supers[1:] = cum
    ones = int(supers[-1])
    zcum = np.minimum((np.arange(1, nsb + 1, dtype=np.int64) * SB_BITS), length) - cum
    samples1 = _select_samples(cum, ones, nsb)
    samples0 = _select_samples(zcum, length - ones, nsb)
    return supers, samples1, samples0


class BitVector:
    """Plain bitvector with constant-time rank and near-constant-time select."""

    __slots__ = ("words", "length", "ones", "supers", "samples1", "samples0")

    def __init__(self, words: np.ndarray, length: int, threads: int = 1):
        if len(words) != (length + 63) // 64:
            raise ValueError("word count does not match length")
        self.words = np.ascontiguousarray(words, dtype=np.uint64)
        self.length = int(length)
        tail = length & 63
        if tail and len(self.words):
            self.words[-1] &= (_ONE << np.uint64(tail)) - _ONE
        self.supers, self.samples1, self.samples0 = build_directory(self.words, self.length, threads)
        self.ones = int(self.supers[-1])

    @classmethod
    def from_bits(cls, bits, threads: int = 1) -> "BitVector":
        arr = as_bits(bits)
        return cls(pack_words(arr), len(arr), threads)

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"BitVector(length={self.length}, ones={self.ones})"

    @property
    def pack(self):
        return (self.words, self.supers, self.samples1, self.samples0, self.length, self.ones)

    def to_array(self) -> np.ndarray:
        return unpack_words(self.words, self.length)

    def to_string(self) -> str:
        return (self.to_array() + 48).tobytes().decode("ascii")

    def count(self, b: int) -> int:
        return self.ones if b else self.length - self.ones

    def _check_pos(self, i: int) -> int:
        i = int(i)
        if not 1 <= i <= self.length:
            raise RangeError(f"position {i} out of range [1, {self.length}]")
        return i

    def access(self, i: int) -> int:
        return int(get_bit(self.words, self._check_pos(i)))

    def rank1(self, i: int) -> int:
        i = int(i)
        if not 0 <= i <= self.length:
            raise RangeError(f"rank index {i} out of range [0, {self.length}]")
        return int(rank1(self.words, self.supers, i))

    def rank0(self, i: int) -> int:
        return int(i) - self.rank1(i)

    def rank(self, b: int, i: int) -> int:
        return self.rank1(i) if b else self.rank0(i)

    def select1(self, j: int) -> int:
        j = int(j)
        if not 0 <= j <= self.ones:
            raise RangeError(f"select1({j}) out of range, {self.ones} ones")
        return int(select1(self.words, self.supers, self.samples1, j))

    def select0(self, j: int) -> int:
        j = int(j)
        if not 0 <= j <= self.length - self.ones:
            raise RangeError(f"select0({j}) out of range, {self.length - self.ones} zeros")
        return int(select0(self.words, self.supers, self.samples0, j))

    def select(self, b: int, j: int) -> int:
        return self.select1(j) if b else self.select0(j)

    # batch forms; no range checks beyond numpy's
    def rank1_many(self, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() > self.length):
            raise RangeError("rank index out of range")
        out = np.empty(len(idx), dtype=np.int64)
        _rank1_many(self.pack, idx, out)
        return out

    def select_many(self, b: int, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() > self.count(b)):
            raise RangeError("select index out of range")
        out = np.empty(len(idx), dtype=np.int64)
        _select_many(self.pack, 1 if b else 0, idx, out)
        return out

    def directory_bits(self) -> int:
        return 8 * (self.supers.nbytes + self.samples1.nbytes + self.samples0.nbytes)

    def size_in_bits(self) -> int:
        """Raw bits plus directory, as held in memory."""
        return 64 * ((self.length + 63) // 64) + self.directory_bits()

    def to_bytes(self) -> bytes:
        return struct.pack("<Q", self.length) + self.words.astype("<u8").tobytes()

    @classmethod
    def read_from(cls, buf: bytes | memoryview, offset: int = 0, threads: int = 1):
        """Parse ``[u64 length][words]`` at ``offset``; returns ``(vector, new_offset)``."""
        (length,) = struct.unpack_from("<Q", buf, offset)
        offset += 8
        nwords = (length + 63) // 64
        end = offset + 8 * nwords
        if end > len(buf):
            raise ValueError("truncated bitvector payload")
        words = np.frombuffer(buf, dtype="<u8", count=nwords, offset=offset).astype(np.uint64)
        return cls(words, length, threads), end

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitVector":
        bv, end = cls.read_from(data)
        if end != len(data):
            raise ValueError("trailing bytes after bitvector")
        return bv


# --------------------------------------------------------------------------
# sparse (class/offset) encoding

MAX_BLOCK = 32
SPARSE_SAMPLE = 64
DELTA_STEP = 8
BINOM = np.array([[math.comb(i, j) for j in range(MAX_BLOCK + 1)] for i in range(MAX_BLOCK + 1)], dtype=np.int64)
OFFSET_WIDTH = np.array(
    [[(math.comb(b, c) - 1).bit_length() if c <= b else 0 for c in range(MAX_BLOCK + 1)] for b in range(MAX_BLOCK + 1)],
    dtype=np.int64,
)


def sparse_block_len(length: int) -> int:
    if length <= 4:
        return 1
    return min(MAX_BLOCK, math.ceil(math.log2(length) / 2))


@njit(cache=True, nogil=True)
def encode_block(block, b):
    """(class, offset) of the low ``b`` bits of ``block`` in the combinatorial number system."""
    c = 0
    off = 0
    for j in range(b):
        if (block >> np.uint64(j)) & _ONE:
            c += 1
            off += BINOM[j, c]
    return c, off


@njit(cache=True, nogil=True, _nrt=False)
def decode_block(c, off, b):
    block = np.uint64(0)
    pos = b - 1
    for r in range(c, 0, -1):
        while BINOM[pos, r] > off:
            pos -= 1
        block |= _ONE << np.uint64(pos)
        off -= BINOM[pos, r]
        pos -= 1
    return block


@njit(cache=True, nogil=True, _nrt=False)
def read_bits(words, pos, width):
    if width == 0:
        return 0
    w = pos >> 6
    off = pos & 63
    x = words[w] >> np.uint64(off)
    if off + width > 64:
        x |= words[w + 1] << np.uint64(64 - off)
    if width < 64:
        x &= (_ONE << np.uint64(width)) - _ONE
    return np.int64(x)


@njit(cache=True, nogil=True)
def _extract(words, start, b, length):
    # bits [start, start + b) of a plain word array, as an integer
    nb = min(b, length - start)
    if nb <= 0:
        return np.uint64(0)
    w = start >> 6
    off = start & 63
    x = words[w] >> np.uint64(off)
    if off + nb > 64:
        x |= words[w + 1] << np.uint64(64 - off)
    if nb < 64:
        x &= (_ONE << np.uint64(nb)) - _ONE
    return x


@njit(cache=True, nogil=True)
def _encode_blocks(lo, hi, words, length, b, classes, offsets, widths):
    for t in range(lo, hi):
        c, off = encode_block(_extract(words, t * b, b, length), b)
        classes[t] = c
        offsets[t] = off
        widths[t] = OFFSET_WIDTH[b, c]
    return hi - lo


@njit(cache=True, nogil=True)
def _pack_owned(wlo, whi, values, widths, ptrs, out):
    """Write every packed value overlapping words [wlo, whi); only those words are touched."""
    n = len(values)
    lo_bit = wlo * 64
    hi_bit = whi * 64
    # first value whose end is past lo_bit
    a = np.searchsorted(ptrs, lo_bit, side="right") - 1
    if a < 0:
        a = 0
    touched = 0
    for t in range(a, n):
        p = ptrs[t]
        if p >= hi_bit:
            break
        wd = widths[t]
        if wd == 0:
            continue
        v = np.uint64(values[t])
        w = p >> 6
        off = p & 63
        if wlo <= w < whi:
            out[w] |= v << np.uint64(off)
        if off + wd > 64 and wlo <= w + 1 < whi:
            out[w + 1] |= v >> np.uint64(64 - off)
        touched += 1
    return touched


def pack_values(values: np.ndarray, widths: np.ndarray, threads: int = 1):
    """Pack variable-width values; returns ``(words, start_pointers)``."""
    widths = np.asarray(widths, dtype=np.int64)
    ends = prefix_sum(widths, threads)
    ptrs = ends - widths
    total = int(ends[-1]) if len(ends) else 0
    out = np.zeros((total + 63) // 64 + 1, dtype=np.uint64)
    parallel_for(_pack_owned, len(out), threads, np.asarray(values, dtype=np.int64), widths, ptrs, out, grain=1024)
    return out, ptrs


# sparse pack: (b, length, ones, cwidth, cwords, owords, dwidth, dwords, sptr, srank)

@njit(cache=True, nogil=True, _nrt=False)
def sp_class(p, t):
    return read_bits(p[4], t * p[3], p[3])


@njit(cache=True, nogil=True, _nrt=False)
def sp_offset_ptr(p, t):
    b = p[0]
    g = t // DELTA_STEP
    ptr = np.int64(p[8][t // SPARSE_SAMPLE]) + read_bits(p[7], g * p[6], p[6])
    for u in range(g * DELTA_STEP, t):
        ptr += OFFSET_WIDTH[b, sp_class(p, u)]
    return ptr


@njit(cache=True, nogil=True, _nrt=False)
def sp_block(p, t):
    b = p[0]
    c = sp_class(p, t)
    off = read_bits(p[5], sp_offset_ptr(p, t), OFFSET_WIDTH[b, c])
    return decode_block(c, off, b)


@njit(cache=True, nogil=True, _nrt=False)
def sp_access(p, i):
    b = p[0]
    k = i - 1
    return np.int64((sp_block(p, k // b) >> np.uint64(k % b)) & _ONE)


@njit(cache=True, nogil=True, _nrt=False)
def sp_rank1(p, i):
    b = p[0]
    t = i // b
    s = t // SPARSE_SAMPLE
    r = np.int64(p[9][s])
    for u in range(s * SPARSE_SAMPLE, t):
        r += sp_class(p, u)
    rem = i - t * b
    if rem:
        r += popcount(sp_block(p, t) & ((_ONE << np.uint64(rem)) - _ONE))
    return r


@njit(cache=True, nogil=True, _nrt=False)
def sp_select(p, bit, j):
    if j <= 0:
        return 0
    b = p[0]
    srank = p[9]
    nblocks = (p[1] + b - 1) // b
    # last sample with fewer than j bits of the wanted kind before it
    lo = 0
    hi = len(srank) - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        before = np.int64(srank[mid])
        if not bit:
            before = mid * SPARSE_SAMPLE * b - before
        if before < j:
            lo = mid
        else:
            hi = mid - 1
    r = np.int64(srank[lo])
    if not bit:
        r = lo * SPARSE_SAMPLE * b - r
    t = lo * SPARSE_SAMPLE
    while t < nblocks:
        c = sp_class(p, t)
        if not bit:
            c = b - c
        if r + c >= j:
            break
        r += c
        t += 1
    blk = sp_block(p, t)
    if not bit:
        blk = (~blk) & ((_ONE << np.uint64(b)) - _ONE) if b < 64 else ~blk
    return t * b + select_in_word(blk, j - r) + 1


@njit(cache=True, nogil=True, _nrt=False)
def _sp_rank_many(p, idx, out):
    for k in range(len(idx)):
        out[k] = sp_rank1(p, idx[k])


@njit(cache=True, nogil=True, _nrt=False)
def _sp_select_many(p, bit, idx, out):
    for k in range(len(idx)):
        out[k] = sp_select(p, bit, idx[k])


def _fixed_width(max_value: int) -> int:
    return max(1, int(max_value).bit_length())


def _compact(values: np.ndarray) -> np.ndarray:
    if not len(values) or values.max() < 2**32:
        return values.astype(np.uint32)
    return values.astype(np.int64)


class SparseBitVector:
    """Class/offset compressed bitvector; same query semantics as :class:`BitVector`."""

    def __init__(self, bits, threads: int = 1):
        threads = resolve_threads(threads)
        arr = as_bits(bits)
        self.length = length = len(arr)
        self.b = b = sparse_block_len(length)
        words = pack_words(arr)
        nblocks = (length + b - 1) // b
        self.nblocks = nblocks
        classes = np.zeros(nblocks, dtype=np.int64)
        offsets = np.zeros(nblocks, dtype=np.int64)
        widths = np.zeros(nblocks, dtype=np.int64)
        parallel_for(_encode_blocks, nblocks, threads, words, length, b, classes, offsets, widths)

        self.cwidth = _fixed_width(b)
        self.cwords, _ = pack_values(classes, np.full(nblocks, self.cwidth), threads)
        self.owords, ptrs = pack_values(offsets, widths, threads)

        # absolute pointer and rank every SPARSE_SAMPLE blocks; a short delta every
        # DELTA_STEP blocks; blocks in between add up offset widths from their classes
        nsamples = nblocks // SPARSE_SAMPLE + 1
        sample_idx = np.arange(nsamples, dtype=np.int64) * SPARSE_SAMPLE
        cls_cum = np.zeros(nblocks + 1, dtype=np.int64)
        cls_cum[1:] = prefix_sum(classes, threads)
        ptr_ext = np.append(ptrs, ptrs[-1] + widths[-1] if nblocks else 0)
        self.ones = int(cls_cum[-1])
        self.sptr = _compact(ptr_ext[sample_idx])
        self.srank = _compact(cls_cum[sample_idx])
        group_idx = np.arange(0, nblocks, DELTA_STEP, dtype=np.int64)
        deltas = ptrs[group_idx] - ptr_ext[(group_idx // SPARSE_SAMPLE) * SPARSE_SAMPLE]
        self.dwidth = _fixed_width(int(deltas.max()) if len(deltas) else 0)
        self.dwords, _ = pack_values(deltas, np.full(len(deltas), self.dwidth), threads)

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"SparseBitVector(length={self.length}, ones={self.ones}, b={self.b})"

    @property
    def pack(self):
        return (self.b, self.length, self.ones, self.cwidth, self.cwords, self.owords,
                self.dwidth, self.dwords, self.sptr, self.srank)

    def count(self, b: int) -> int:
        return self.ones if b else self.length - self.ones

    def block(self, t: int) -> tuple[int, int]:
        """(class, offset) of block ``t`` (0-based)."""
        if not 0 <= t < self.nblocks:
            raise RangeError(f"block {t} out of range")
        p = self.pack
        c = int(sp_class(p, t))
        return c, int(read_bits(self.owords, sp_offset_ptr(p, t), int(OFFSET_WIDTH[self.b, c])))

    def access(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise RangeError(f"position {i} out of range [1, {self.length}]")
        return int(sp_access(self.pack, int(i)))

    def rank1(self, i: int) -> int:
        if not 0 <= i <= self.length:
            raise RangeError(f"rank index {i} out of range [0, {self.length}]")
        return int(sp_rank1(self.pack, int(i)))

    def rank0(self, i: int) -> int:
        return int(i) - self.rank1(i)

    def rank(self, b: int, i: int) -> int:
        return self.rank1(i) if b else self.rank0(i)

    def select(self, b: int, j: int) -> int:
        if not 0 <= j <= self.count(b):
            raise RangeError(f"select{b}({j}) out of range")
        return int(sp_select(self.pack, 1 if b else 0, int(j)))

    def select1(self, j: int) -> int:
        return self.select(1, j)

    def select0(self, j: int) -> int:
        return self.select(0, j)

    def rank1_many(self, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() > self.length):
            raise RangeError("rank index out of range")
        out = np.empty(len(idx), dtype=np.int64)
        _sp_rank_many(self.pack, idx, out)
        return out

    def select_many(self, b: int, idx) -> np.ndarray:
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() > self.count(b)):
            raise RangeError("select index out of range")
        out = np.empty(len(idx), dtype=np.int64)
        _sp_select_many(self.pack, 1 if b else 0, idx, out)
        return out

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=np.uint8)
        for t in range(self.nblocks):
            blk = int(sp_block(self.pack, t))
            lo = t * self.b
            hi = min(lo + self.b, self.length)
            for k in range(hi - lo):
                out[lo + k] = (blk >> k) & 1
        return out

    def size_in_bits(self) -> int:
        """Packed classes, offsets and deltas, plus the sampled pointers and ranks."""
        cls_bits = self.nblocks * self.cwidth
        off_bits = int(self.owords.nbytes * 8)
        delta_bits = ((self.nblocks + DELTA_STEP - 1) // DELTA_STEP) * self.dwidth
        return cls_bits + off_bits + delta_bits + 8 * (self.sptr.nbytes + self.srank.nbytes)

    def to_bytes(self) -> bytes:
        # stored as the plain layout; the compressed form is rebuilt on load
        return BitVector.from_bits(self.to_array()).to_bytes()

    @classmethod
    def read_from(cls, buf, offset: int = 0, threads: int = 1):
        bv, end = BitVector.read_from(buf, offset)
        return cls(bv.to_array(), threads), end
