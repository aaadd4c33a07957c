import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numba import njit

from pemb.errors import RangeError
from pemb.succinct import (
    BINOM,
    OFFSET_WIDTH,
    BitVector,
    SparseBitVector,
    decode_block,
    encode_block,
    rank1,
    select0,
    select1,
)

FIG1_A = "0110110101110010110100010100"


def naive(bits):
    bits = np.asarray(bits, dtype=np.int64)
    r1 = np.concatenate([[0], np.cumsum(bits)])
    ones = np.flatnonzero(bits == 1) + 1
    zeros = np.flatnonzero(bits == 0) + 1
    return r1, ones, zeros


def assert_matches(bv, bits):
    r1, ones, zeros = naive(bits)
    L = len(bits)
    np.testing.assert_array_equal(bv.rank1_many(np.arange(L + 1)), r1)
    np.testing.assert_array_equal(bv.select_many(1, np.arange(1, len(ones) + 1)), ones)
    np.testing.assert_array_equal(bv.select_many(0, np.arange(1, len(zeros) + 1)), zeros)
    assert bv.select1(0) == 0 and bv.select0(0) == 0
    assert bv.count(1) == len(ones) and bv.count(0) == len(zeros)


# ---- worked examples

def test_fig1_rank_and_select():
    bv = BitVector.from_bits(FIG1_A)
    assert bv.rank1(12) == 8
    assert bv.select1(7) == 11
    assert bv.to_string() == FIG1_A


def test_empty_vector():
    bv = BitVector.from_bits("")
    assert len(bv) == 0
    assert bv.rank1(0) == 0
    assert bv.select1(0) == 0
    with pytest.raises(RangeError):
        bv.access(1)


def test_small_examples():
    assert BitVector.from_bits("00000000").rank1(8) == 0
    assert BitVector.from_bits("0101").select0(2) == 3


def test_range_errors():
    bv = BitVector.from_bits("0101")
    for bad in (lambda: bv.rank1(5), lambda: bv.rank1(-1), lambda: bv.select1(3), lambda: bv.select0(3),
                lambda: bv.access(0), lambda: bv.access(5)):
        with pytest.raises(RangeError):
            bad()
    with pytest.raises(ValueError):
        BitVector.from_bits([0, 2, 1])


# ---- exhaustive small lengths

def test_exhaustive_objects_up_to_12():
    for L in range(0, 13):
        for x in range(1 << L):
            bits = [(x >> k) & 1 for k in range(L)]
            bv = BitVector.from_bits(np.array(bits, dtype=np.uint8))
            assert_matches(bv, bits)


@njit(cache=True)
def _exhaustive_kernel(max_len):
    words = np.zeros(1, dtype=np.uint64)
    supers = np.zeros(2, dtype=np.int64)
    samples = np.zeros(2, dtype=np.int64)
    checked = 0
    for L in range(max_len + 1):
        for x in range(1 << L):
            words[0] = np.uint64(x)
            ones = 0
            for k in range(L):
                ones += (x >> k) & 1
            supers[1] = ones
            r = 0
            c1 = 0
            c0 = 0
            for i in range(1, L + 1):
                b = (x >> (i - 1)) & 1
                r += b
                if rank1(words, supers, i) != r:
                    return -1
                if b:
                    c1 += 1
                    if select1(words, supers, samples, c1) != i:
                        return -2
                else:
                    c0 += 1
                    if select0(words, supers, samples, c0) != i:
                        return -3
            checked += 1
    return checked


def test_exhaustive_query_kernels_up_to_20():
    # every bit pattern of length <= 20 through the compiled rank/select paths
    assert _exhaustive_kernel(20) == (1 << 21) - 1


def test_exhaustive_sparse_up_to_10():
    for L in range(0, 11):
        for x in range(1 << L):
            bits = np.array([(x >> k) & 1 for k in range(L)], dtype=np.uint8)
            sp = SparseBitVector(bits)
            assert_matches(sp, bits)
            np.testing.assert_array_equal(sp.to_array(), bits)


# ---- random vectors

def _random_vectors(count, max_len, seed):
    rng = np.random.default_rng(seed)
    dens = [0.001, 0.01, 0.5, 0.99]
    for i in range(count):
        L = int(math.exp(rng.uniform(0, math.log(max_len))))
        p = dens[i % 4]
        yield (rng.random(L) < p).astype(np.uint8), rng


def _sampled_check(bv, bits, rng, k=300):
    r1, ones, zeros = naive(bits)
    L = len(bits)
    idx = rng.integers(0, L + 1, size=k)
    np.testing.assert_array_equal(bv.rank1_many(idx), r1[idx])
    if len(ones):
        j = rng.integers(1, len(ones) + 1, size=k)
        np.testing.assert_array_equal(bv.select_many(1, j), ones[j - 1])
        np.testing.assert_array_equal(bv.rank1_many(ones[j - 1]), j)
    if len(zeros):
        j = rng.integers(1, len(zeros) + 1, size=k)
        np.testing.assert_array_equal(bv.select_many(0, j), zeros[j - 1])
    # last positions always
    if L:
        assert bv.rank1(L) == r1[L]


def test_random_plain_vectors_against_scan():
    for bits, rng in _random_vectors(1000, 10**6, seed=11):
        bv = BitVector.from_bits(bits)
        _sampled_check(bv, bits, rng)


def test_random_sparse_equals_plain():
    for bits, rng in _random_vectors(10**4, 3000, seed=12):
        sp = SparseBitVector(bits)
        bv = BitVector.from_bits(bits)
        L = len(bits)
        idx = np.arange(L + 1)
        np.testing.assert_array_equal(sp.rank1_many(idx), bv.rank1_many(idx))
        for b in (0, 1):
            j = np.arange(1, bv.count(b) + 1)
            np.testing.assert_array_equal(sp.select_many(b, j), bv.select_many(b, j))


def test_large_sparse_against_scan():
    for bits, rng in _random_vectors(40, 10**6, seed=13):
        _sampled_check(SparseBitVector(bits), bits, rng)


# ---- properties

@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=3000))
def test_rank_select_inverse(bits):
    bv = BitVector.from_bits(np.array(bits, dtype=np.uint8))
    L = len(bits)
    assert bv.rank1(L) + bv.rank0(L) == L
    for b in (0, 1):
        for j in range(1, bv.count(b) + 1):
            assert bv.rank(b, bv.select(b, j)) == j
        for i in range(L + 1):
            r = bv.rank(b, i)
            if r >= 1:
                assert bv.select(b, r) <= i


def test_directory_overhead_within_budget():
    for L in (10**5, 10**6, 10**7):
        bv = BitVector.from_bits(np.random.default_rng(0).integers(0, 2, L, dtype=np.uint8))
        assert bv.directory_bits() <= 0.25 * L


def test_sparse_smaller_than_plain_when_sparse():
    rng = np.random.default_rng(5)
    bits = np.zeros(10**5, dtype=np.uint8)
    bits[rng.choice(10**5, 100, replace=False)] = 1
    assert SparseBitVector(bits).size_in_bits() < BitVector.from_bits(bits).size_in_bits()


def test_sparse_zero_block_is_class_zero_offset_zero():
    sp = SparseBitVector(np.zeros(1000, dtype=np.uint8))
    for t in range(sp.nblocks):
        assert sp.block(t) == (0, 0)


@njit(cache=True)
def _block_roundtrip(b):
    bad = 0
    for x in range(1 << b):
        c, off = encode_block(np.uint64(x), b)
        if off >= BINOM[b, c] or decode_block(c, off, b) != np.uint64(x):
            bad += 1
    return bad


def test_block_decode_encode_identity_all_classes():
    for b in range(1, 17):
        assert _block_roundtrip(b) == 0
    rng = np.random.default_rng(3)
    for b in range(17, 33):
        for x in rng.integers(0, 1 << b, size=2000, dtype=np.uint64).tolist() + [0, (1 << b) - 1]:
            c, off = encode_block(np.uint64(x), b)
            assert c == bin(x).count("1")
            assert 0 <= off < math.comb(b, c)
            assert (off.bit_length() if off else 0) <= OFFSET_WIDTH[b, c]
            assert int(decode_block(c, off, b)) == x


def test_sparse_offsets_below_binomial():
    rng = np.random.default_rng(8)
    bits = (rng.random(50000) < 0.3).astype(np.uint8)
    sp = SparseBitVector(bits)
    for t in rng.integers(0, sp.nblocks, 500):
        c, off = sp.block(int(t))
        assert off < math.comb(sp.b, c)


# ---- serialization

@pytest.mark.parametrize("L", [0, 1, 63, 64, 65, 1000, 100_001])
def test_roundtrip_bytes(L):
    bits = np.random.default_rng(L).integers(0, 2, L, dtype=np.uint8)
    bv = BitVector.from_bits(bits)
    data = bv.to_bytes()
    assert len(data) == 8 + 8 * ((L + 63) // 64)
    back = BitVector.from_bytes(data)
    np.testing.assert_array_equal(back.to_array(), bits)
    assert back.rank1(L) == bv.rank1(L)
    sp, end = SparseBitVector.read_from(SparseBitVector(bits).to_bytes())
    np.testing.assert_array_equal(sp.to_array(), bits)


def test_truncated_bytes_rejected():
    data = BitVector.from_bits("1" * 100).to_bytes()
    with pytest.raises(ValueError):
        BitVector.from_bytes(data[:-1])


def test_parallel_directory_equals_sequential():
    bits = np.random.default_rng(1).integers(0, 2, 10**6, dtype=np.uint8)
    a = BitVector.from_bits(bits, threads=1)
    b = BitVector.from_bits(bits, threads=4)
    np.testing.assert_array_equal(a.supers, b.supers)
    np.testing.assert_array_equal(a.samples1, b.samples1)
    np.testing.assert_array_equal(a.samples0, b.samples0)
    sa, sb = SparseBitVector(bits, threads=1), SparseBitVector(bits, threads=4)
    np.testing.assert_array_equal(sa.owords, sb.owords)
    np.testing.assert_array_equal(sa.cwords, sb.cwords)
