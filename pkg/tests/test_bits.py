import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynidx.bits import (CompactReportBitVector, PlainBitVector, RankBitVector,
                         ReportBitVector, ZeroBudgetExceeded)


def bitvec(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


def scan(bits, s, e):
    return [j for j in range(s, e + 1) if bits[j]]


def test_report_examples():
    v = ReportBitVector(bitvec("11011"))
    assert v.report(0, 4).tolist() == [0, 1, 3, 4]
    v.zero(1)
    assert v.report(0, 4).tolist() == [0, 3, 4]
    v.zero(1)
    assert v.report(0, 4).tolist() == [0, 3, 4]
    assert ReportBitVector(bitvec("00000")).report(0, 4).tolist() == []
    assert ReportBitVector(np.ones(64, np.uint8)).report(0, 63).tolist() == list(range(64))
    assert ReportBitVector(bitvec("10101")).report(1, 3).tolist() == [2]
    assert ReportBitVector(bitvec("10101")).report(2, 2).tolist() == [2]


def test_single_word_leaves_summary():
    bits = np.zeros(64, np.uint8)
    bits[0] = 1
    v = ReportBitVector(bits)
    assert v.nonempty_words() == [0]
    v.zero(0)
    assert v.nonempty_words() == []


def test_report_skips_empty_word():
    bits = np.concatenate([np.ones(64), np.zeros(64), np.ones(64)]).astype(np.uint8)
    v = ReportBitVector(bits)
    out = v.report(0, 191)
    assert out.shape[0] == 128
    assert 64 not in out.tolist()
    # two contributing words, the empty middle word is never visited
    assert v.last_probes <= 2 + v.summary.depth


def test_range_errors():
    v = ReportBitVector(bitvec("101"))
    with pytest.raises(IndexError):
        v.report(2, 1)
    with pytest.raises(IndexError):
        v.zero(3)
    with pytest.raises(IndexError):
        RankBitVector(bitvec("101")).rank1(3)


def test_compact_matches_plain():
    rnd = random.Random(3)
    n, tau = 1024, 16
    bits = np.ones(n, np.uint8)
    plain = ReportBitVector(bits)
    comp = CompactReportBitVector(bits, tau)
    for p in rnd.sample(range(n), 64):
        plain.zero(p)
        comp.zero(p)
    for _ in range(100):
        s = rnd.randrange(n)
        e = rnd.randrange(s, n)
        assert comp.report(s, e).tolist() == plain.report(s, e).tolist()


def test_compact_all_ones_payload():
    n, tau = 1000, 8
    comp = CompactReportBitVector(np.ones(n, np.uint8), tau)
    count_bits = tau.bit_length()
    blocks = math.ceil(n / tau)
    assert comp.size_report()["payload_bits"] == blocks * 8 * math.ceil(count_bits / 8)


def test_compact_tau2_behaves_plain():
    rnd = random.Random(5)
    bits = np.array([rnd.random() < 0.7 for _ in range(300)], np.uint8)
    comp = CompactReportBitVector(bits, 2, zero_budget=300)
    for _ in range(50):
        s = rnd.randrange(300)
        e = rnd.randrange(s, 300)
        assert comp.report(s, e).tolist() == scan(bits, s, e)


def test_compact_budget():
    comp = CompactReportBitVector(np.ones(64, np.uint8), 8)
    for p in range(8):
        comp.zero(p)
    with pytest.raises(ZeroBudgetExceeded):
        comp.zero(9)


@pytest.mark.parametrize("tau", [4, 16, 64])
def test_compact_size_law(tau):
    rnd = np.random.default_rng(tau)
    n = 1 << 14
    comp = CompactReportBitVector(np.ones(n, np.uint8), tau)
    z = n // (2 * tau)
    for p in rnd.choice(n, z, replace=False).tolist():
        comp.zero(p)
    lg = math.log2(tau)
    assert comp.size_report()["payload_bits"] <= 4 * (z * lg + n / tau + n * lg / tau)


def test_rank_examples():
    v = RankBitVector(bitvec("11011"))
    assert v.rank1(2) == 2
    assert v.ones_in_range(1, 3) == 2
    z = RankBitVector(np.zeros(70, np.uint8))
    assert all(z.rank1(i) == 0 for i in range(70))
    w = RankBitVector(np.ones(200, np.uint8))
    before = [w.rank1(i) for i in range(200)]
    w.zero(77)
    assert [w.rank1(i) for i in range(200)] == [b - (i >= 77) for i, b in enumerate(before)]


def test_plain_select():
    bits = bitvec("1101000111")
    v = PlainBitVector(bits)
    ones = [i for i, b in enumerate(bits) if b]
    zeros = [i for i, b in enumerate(bits) if not b]
    assert [v.select1(k) for k in range(len(ones))] == ones
    assert [v.select0(k) for k in range(len(zeros))] == zeros
    assert [v.ones_before(i) for i in range(11)] == [int(bits[:i].sum()) for i in range(11)]


ops_strategy = st.lists(st.tuples(st.sampled_from("zrk"), st.integers(0, 10 ** 6),
                                  st.integers(0, 10 ** 6)), max_size=200)


@given(n=st.integers(1, 600), density=st.floats(0.5, 1.0), seed=st.integers(0, 10 ** 6),
       ops=ops_strategy, tau=st.sampled_from([2, 3, 8, 16]))
def test_vectors_against_array(n, density, seed, ops, tau):
    rnd = random.Random(seed)
    ref = [1 if rnd.random() < density else 0 for _ in range(n)]
    arr = np.array(ref, np.uint8)
    rv = ReportBitVector(arr)
    cv = CompactReportBitVector(arr, tau, zero_budget=n)
    kv = RankBitVector(arr)
    for kind, a, b in ops:
        i = a % n
        if kind == "z":
            before = set(rv.report(0, n - 1).tolist())
            ref[i] = 0
            rv.zero(i)
            cv.zero(i)
            kv.zero(i)
            assert set(rv.report(0, n - 1).tolist()) <= before
        elif kind == "r":
            s, e = sorted((i, b % n))
            want = scan(ref, s, e)
            assert rv.report(s, e).tolist() == want
            assert cv.report(s, e).tolist() == want
            assert rv.last_probes <= len(want) + 2 + rv.summary.depth
        else:
            assert kv.rank1(i) == sum(ref[:i + 1])
    assert cv.zeros == n - sum(ref)
