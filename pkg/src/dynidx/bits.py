"""Bit vectors with one-way clearing, output-sensitive reporting and rank.

Three mutable vectors and one static one:

``ReportBitVector``
    plain 64-bit words plus a 64-ary summary tree over non-empty words;
    ``report`` touches only words that contribute output (plus the two
    boundary words).
``CompactReportBitVector``
    the same interface for vectors that are almost all ones: blocks of
    ``tau`` bits store only a zero count and the in-block zero positions.
``RankBitVector``
    clear-only vector with prefix counts kept in an aggregation tree.
``PlainBitVector``
    immutable, with rank/select through a cumulative popcount directory.

All positions are 0-based.
"""
import math

import numpy as np

from . import kernels as K


class ZeroBudgetExceeded(RuntimeError):
    """Raised when a compact vector would store more zeros than allowed."""


def _check_range(s, e, n):
    if not (0 <= s <= e < n):
        raise IndexError(f"invalid range [{s}, {e}] for length {n}")


def _check_pos(i, n):
    if not (0 <= i < n):
        raise IndexError(f"position {i} out of range for length {n}")


class _Summary:
    """64-ary bitmap tree over ``m`` flags; bottom bit t set iff flag t."""

    def __init__(self, flags):
        flags = np.asarray(flags, dtype=np.uint8)
        levels = []
        cur = flags
        while True:
            w = K.pack_bits(cur)
            levels.append(w)
            if w.shape[0] <= 1:
                break
            cur = (w != 0).astype(np.uint8)
        self.level_off = np.zeros(len(levels) + 1, dtype=np.int64)
        for k, w in enumerate(levels):
            self.level_off[k + 1] = self.level_off[k] + w.shape[0]
        self.words = np.concatenate(levels) if levels else np.zeros(0, np.uint64)
        self.depth = len(levels)

    def clear(self, t):
        K.summary_clear(self.words, self.level_off, self.depth, t)

    def next(self, t):
        return int(K.summary_next(self.words, self.level_off, self.depth, t))

    def bits(self):
        return 64 * int(self.words.shape[0])


class ReportBitVector:
    def __init__(self, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        self.length = int(bits.shape[0])
        self.words = K.pack_bits(bits)
        self.summary = _Summary(self.words != 0)
        self.ones = int(bits.sum())
        self.last_probes = 0

    @classmethod
    def all_ones(cls, n):
        return cls(np.ones(n, dtype=np.uint8))

    def __len__(self):
        return self.length

    def get(self, i):
        _check_pos(i, self.length)
        return int(K.get_bit(self.words, i))

    def zero(self, i):
        _check_pos(i, self.length)
        s = self.summary
        if K.clear_bit(self.words, s.words, s.level_off, s.depth, i):
            self.ones -= 1

    def report(self, s, e):
        _check_range(s, e, self.length)
        sm = self.summary
        out, probes = K.report_ones(self.words, sm.words, sm.level_off, sm.depth, s, e)
        self.last_probes = int(probes)
        return out

    def nonempty_words(self):
        found = []
        t = self.summary.next(0)
        while t != -1:
            found.append(t)
            t = self.summary.next(t + 1)
        return found

    def size_report(self):
        payload = 64 * int(self.words.shape[0])
        summary = self.summary.bits()
        return {"payload_bits": payload, "summary_bits": summary,
                "total_bits": payload + summary}


class CompactReportBitVector:
    """Mostly-ones vector; block payload = zero count + zero offsets.

    Each block of ``tau`` bits is encoded as a little-endian integer holding
    the zero count (``count_bits``) followed by that many offsets
    (``pos_bits`` each), padded to whole bytes.  A summary tree marks blocks
    that still hold at least one 1.
    """

    def __init__(self, bits, tau, zero_budget=None):
        if tau < 2:
            raise ValueError("tau must be >= 2")
        bits = np.asarray(bits, dtype=np.uint8)
        n = int(bits.shape[0])
        self.length = n
        self.tau = int(tau)
        self.count_bits = self.tau.bit_length()
        self.pos_bits = max(1, (self.tau - 1).bit_length())
        self._count_mask = (1 << self.count_bits) - 1
        self.zero_budget = (max(1, n // self.tau) if zero_budget is None
                            else int(zero_budget))
        self.nblocks = (n + self.tau - 1) // self.tau
        zero_pos = np.flatnonzero(bits == 0)
        self.zeros = int(zero_pos.shape[0])
        if self.zeros > self.zero_budget:
            raise ZeroBudgetExceeded(f"{self.zeros} zeros > budget {self.zero_budget}")
        empty = self._encode(())
        self.blocks = [empty] * self.nblocks
        if self.zeros:
            blk = zero_pos // self.tau
            splits = np.flatnonzero(np.diff(blk)) + 1
            for grp in np.split(zero_pos, splits):
                b = int(grp[0]) // self.tau
                self.blocks[b] = self._encode([int(p) - b * self.tau for p in grp])
        flags = np.ones(self.nblocks, dtype=np.uint8)
        if self.zeros:
            blk, cnt = np.unique(zero_pos // self.tau, return_counts=True)
            for b, c in zip(blk.tolist(), cnt.tolist()):
                if c == self._width(b):
                    flags[b] = 0
        self.summary = _Summary(flags)
        self.last_probes = 0

    def _width(self, b):
        return min(self.tau, self.length - b * self.tau)

    def _encode(self, offsets):
        v = len(offsets)
        shift = self.count_bits
        for p in offsets:
            v |= p << shift
            shift += self.pos_bits
        return v.to_bytes((shift + 7) // 8, "little")

    def _decode(self, blob):
        v = int.from_bytes(blob, "little")
        f = v & ((1 << self.count_bits) - 1)
        v >>= self.count_bits
        mask = (1 << self.pos_bits) - 1
        out = []
        for _ in range(f):
            out.append(v & mask)
            v >>= self.pos_bits
        return out

    def __len__(self):
        return self.length

    def get(self, i):
        _check_pos(i, self.length)
        b, off = divmod(i, self.tau)
        return 0 if off in self._decode(self.blocks[b]) else 1

    def zero(self, i):
        _check_pos(i, self.length)
        b, off = divmod(i, self.tau)
        zs = self._decode(self.blocks[b])
        if off in zs:
            return
        if self.zeros + 1 > self.zero_budget:
            raise ZeroBudgetExceeded(f"zero budget {self.zero_budget} exhausted")
        zs.append(off)
        zs.sort()
        self.blocks[b] = self._encode(zs)
        self.zeros += 1
        if len(zs) == self._width(b):
            self.summary.clear(b)

    def _block_ones(self, b, lo, hi, out):
        # ones of block b at offsets lo..hi inclusive
        base = b * self.tau
        blob = self.blocks[b]
        if int.from_bytes(blob, "little") & self._count_mask == 0:
            out.extend(range(base + lo, base + hi + 1))
            return
        zs = set(self._decode(blob))
        out.extend(base + o for o in range(lo, hi + 1) if o not in zs)

    def report(self, s, e):
        _check_range(s, e, self.length)
        tau = self.tau
        bs, be = s // tau, e // tau
        out = []
        if bs == be:
            self._block_ones(bs, s - bs * tau, e - bs * tau, out)
            self.last_probes = 1
            return np.asarray(out, dtype=np.int64)
        self._block_ones(bs, s - bs * tau, self._width(bs) - 1, out)
        probes = 1
        t = self.summary.next(bs + 1)
        while t != -1 and t < be:
            self._block_ones(t, 0, self._width(t) - 1, out)
            probes += 1
            t = self.summary.next(t + 1)
        self._block_ones(be, 0, e - be * tau, out)
        self.last_probes = probes + 1
        return np.asarray(out, dtype=np.int64)

    def block_zero_positions(self, b):
        return self._decode(self.blocks[b])

    def size_report(self):
        payload = 8 * sum(len(blob) for blob in self.blocks)
        summary = self.summary.bits()
        return {"payload_bits": payload, "summary_bits": summary,
                "total_bits": payload + summary}


class RankBitVector:
    """Clear-only bit vector with ``rank1`` via an aggregation tree.

    Leaves are 64-bit words; every internal node stores the popcount of its
    subtree, so clearing a bit updates one root-to-leaf path.
    """

    def __init__(self, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        self.length = int(bits.shape[0])
        self.words = K.pack_bits(bits)
        nw = max(1, self.words.shape[0])
        size = 1
        while size < nw:
            size <<= 1
        self.size = size
        tree = np.zeros(2 * size, dtype=np.int64)
        tree[size:size + self.words.shape[0]] = np.bitwise_count(self.words)
        for i in range(size - 1, 0, -1):
            tree[i] = tree[2 * i] + tree[2 * i + 1]
        self.tree = tree
        self.last_touched = 0

    def __len__(self):
        return self.length

    def rank1(self, i):
        """Number of ones in positions 0..i inclusive."""
        _check_pos(i, self.length)
        return int(K.rank_tree(self.words, self.tree, self.size, i))

    def ones_in_range(self, a, b):
        if a > b:
            return 0
        _check_range(a, b, self.length)
        return self.rank1(b) - (self.rank1(a - 1) if a > 0 else 0)

    def total(self):
        return int(self.tree[1])

    def zero(self, i):
        _check_pos(i, self.length)
        w = i >> 6
        m = np.uint64(1) << np.uint64(i & 63)
        if self.words[w] & m:
            self.words[w] &= ~m
            self.last_touched = int(K.seg_add(self.tree, self.size, w, -1))

    def size_report(self):
        payload = 64 * int(self.words.shape[0])
        tree_bits = int(self.tree.shape[0]) * max(1, math.ceil(math.log2(self.length + 1)))
        return {"payload_bits": payload, "summary_bits": tree_bits,
                "total_bits": payload + tree_bits}


class PlainBitVector:
    """Immutable bit vector; ``ones_before(i)`` counts ones in [0, i)."""

    def __init__(self, bits=None, words=None, length=None):
        if words is None:
            bits = np.asarray(bits, dtype=np.uint8)
            self.length = int(bits.shape[0])
            self.words = K.pack_bits(bits)
        else:
            self.length = int(length)
            self.words = np.ascontiguousarray(words, dtype=np.uint64)
        self.cum = K.cumulative_popcount(self.words)

    def __len__(self):
        return self.length

    @property
    def ones(self):
        return int(self.cum[-1])

    def get(self, i):
        _check_pos(i, self.length)
        return int(K.get_bit(self.words, i))

    def ones_before(self, i):
        return int(K.rank1(self.words, self.cum, i))

    def zeros_before(self, i):
        return i - self.ones_before(i)

    def select1(self, k):
        if not 0 <= k < self.ones:
            raise IndexError(k)
        return int(K.select1(self.words, self.cum, k))

    def select0(self, k):
        if not 0 <= k < self.length - self.ones:
            raise IndexError(k)
        return int(K.select0(self.words, self.cum, k))

    def to_bits(self):
        return K.unpack_bits(self.words, self.length)

    def size_bits(self):
        # words plus the stored cumulative-count directory
        return 64 * int(self.words.shape[0]) + 64 * int(self.cum.shape[0])
