"""Huffman-shaped wavelet tree with rank, select and access.

The tree shape follows a Huffman code of the sequence, so the total number
of stored bits is ``sum(len(code(c)))`` over the sequence, i.e. at most
``n (H0 + 1)``.  Node bitmaps are laid out level by level (breadth-first)
and concatenated into a single bit vector; a small node table holds each
node's offset and children.
"""
import heapq
import math

import numpy as np

from . import kernels as K
from .bits import PlainBitVector


def huffman_code_lengths(counts):
    """Code lengths for symbols with positive counts (deterministic ties)."""
    heap = [(int(c), int(s), (int(s),)) for s, c in enumerate(counts) if c > 0]
    if not heap:
        return {}
    if len(heap) == 1:
        return {heap[0][2][0]: 0}
    heapq.heapify(heap)
    depth = {t[2][0]: 0 for t in heap}
    while len(heap) > 1:
        c1, k1, s1 = heapq.heappop(heap)
        c2, k2, s2 = heapq.heappop(heap)
        for s in s1 + s2:
            depth[s] += 1
        heapq.heappush(heap, (c1 + c2, min(k1, k2), s1 + s2))
    return depth


def canonical_codes(lengths):
    """Canonical prefix codes (MSB first) ordered by (length, symbol)."""
    codes = {}
    code = 0
    prev = 0
    for sym, ln in sorted(lengths.items(), key=lambda t: (t[1], t[0])):
        code <<= ln - prev
        codes[sym] = code
        code += 1
        prev = ln
    return codes


class WaveletTree:
    def __init__(self, seq, sigma=None):
        seq = np.asarray(seq, dtype=np.int64)
        self.length = int(seq.shape[0])
        if sigma is None:
            sigma = int(seq.max()) + 1 if self.length else 1
        self.sigma = int(sigma)
        counts = np.bincount(seq, minlength=self.sigma) if self.length else np.zeros(self.sigma, np.int64)
        lengths = huffman_code_lengths(counts)
        codes = canonical_codes(lengths)
        self.code = np.zeros(self.sigma, dtype=np.int64)
        self.code_len = np.full(self.sigma, -1, dtype=np.int64)
        for s, ln in lengths.items():
            self.code[s] = codes[s]
            self.code_len[s] = ln
        self.only_sym = next(iter(lengths)) if len(lengths) == 1 else 0
        self._layout(seq)

    def _layout(self, seq):
        lens = self.code_len[seq] if self.length else np.zeros(0, np.int64)
        cds = self.code[seq] if self.length else np.zeros(0, np.int64)
        maxlen = int(self.code_len.max()) if self.length else 0
        node_id = {}
        offsets = []
        chunks = []
        pos = 0
        for d in range(maxlen):
            idx = np.flatnonzero(lens > d)
            if idx.shape[0] == 0:
                break
            ln = lens[idx]
            prefix = cds[idx] >> (ln - d)
            order = np.argsort(prefix, kind="stable")
            bits = (cds[idx][order] >> (ln[order] - 1 - d)) & 1
            chunks.append(bits.astype(np.uint8))
            pref_sorted = prefix[order]
            uniq, starts = np.unique(pref_sorted, return_index=True)
            for p, st in zip(uniq.tolist(), starts.tolist()):
                node_id[(d, p)] = len(offsets)
                offsets.append(pos + st)
            pos += bits.shape[0]
        all_bits = np.concatenate(chunks) if chunks else np.zeros(0, np.uint8)
        self.bits = PlainBitVector(all_bits)
        self.node_off = np.asarray(offsets, dtype=np.int64)
        leaf_of = {(int(self.code_len[s]), int(self.code[s])): s
                   for s in range(self.sigma) if self.code_len[s] > 0}
        child = np.zeros((len(offsets), 2), dtype=np.int64)
        for (d, p), k in node_id.items():
            for b in (0, 1):
                key = (d + 1, 2 * p + b)
                if key in node_id:
                    child[k, b] = node_id[key]
                else:
                    child[k, b] = -(leaf_of[key] + 1)
        self.child = child

    # ------------------------------------------------------------------
    def __len__(self):
        return self.length

    def _args(self):
        return self.bits.words, self.bits.cum, self.node_off, self.child

    def rank(self, c, i):
        """Occurrences of ``c`` in positions [0, i)."""
        if not 0 <= i <= self.length:
            raise IndexError(i)
        w, cm, off, ch = self._args()
        return int(K.wt_rank(w, cm, off, ch, self.code, self.code_len, int(c), int(i)))

    def access(self, i):
        return self.access_rank(i)[0]

    def access_rank(self, i):
        if not 0 <= i < self.length:
            raise IndexError(i)
        w, cm, off, ch = self._args()
        c, r = K.wt_access_rank(w, cm, off, ch, self.only_sym, int(i))
        return int(c), int(r)

    def count(self, c):
        return self.rank(c, self.length)

    def select(self, c, k):
        """Position of the k-th (0-based) occurrence of ``c``."""
        if not 0 <= k < self.count(c):
            raise IndexError(k)
        w, cm, off, ch = self._args()
        return int(K.wt_select(w, cm, off, ch, self.code, self.code_len, int(c), int(k)))

    def to_array(self):
        return np.asarray([self.access(i) for i in range(self.length)], dtype=np.int64)

    def size_bits(self):
        word = max(1, math.ceil(math.log2(self.length + 2)))
        table = self.node_off.shape[0] * (word + 2 * word) + self.sigma * 2 * 8
        return self.bits.size_bits() + table

    # serialization support -------------------------------------------
    def state(self):
        return {
            "wt_words": self.bits.words, "wt_nbits": np.array([self.bits.length], np.int64),
            "wt_node_off": self.node_off, "wt_child": self.child.reshape(-1),
            "wt_code": self.code, "wt_code_len": self.code_len,
            "wt_meta": np.array([self.length, self.sigma, self.only_sym], np.int64),
        }

    @classmethod
    def from_state(cls, st):
        self = cls.__new__(cls)
        self.length, self.sigma, self.only_sym = (int(x) for x in st["wt_meta"])
        self.bits = PlainBitVector(words=st["wt_words"], length=int(st["wt_nbits"][0]))
        self.node_off = np.asarray(st["wt_node_off"], np.int64)
        self.child = np.asarray(st["wt_child"], np.int64).reshape(-1, 2)
        self.code = np.asarray(st["wt_code"], np.int64)
        self.code_len = np.asarray(st["wt_code_len"], np.int64)
        return self
