"""Immutable FM-index over a document collection.

Every document is stored followed by the terminator 0; terminators compare
by document order (documents are laid out sorted by id), which gives the
same suffix order as distinct end markers while keeping the alphabet at
``sigma + 1`` symbols.
"""
import math

import numpy as np

from . import kernels as K
from . import snapshot
from .bits import PlainBitVector
from .wavelet import WaveletTree


def suffix_array(keys):
    """Suffix array of an int sequence whose last symbol is unique and minimal
    within each terminator-delimited block (prefix doubling)."""
    keys = np.asarray(keys, dtype=np.int64)
    n = keys.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(keys, return_inverse=True)
    rank = rank.astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    k = 1
    while True:
        top = int(rank.max())
        if top == n - 1:
            break
        second = np.zeros(n, dtype=np.int64)
        second[:n - k] = rank[k:] + 1
        combined = rank * (n + 1) + second
        sa = np.argsort(combined, kind="stable")
        srt = combined[sa]
        new = np.empty(n, dtype=np.int64)
        new[0] = 0
        np.cumsum(srt[1:] != srt[:-1], out=new[1:])
        rank = np.empty(n, dtype=np.int64)
        rank[sa] = new
        k *= 2
    return np.argsort(rank, kind="stable")


def _normalize_docs(docs):
    items = docs.items() if isinstance(docs, dict) else docs
    out = []
    seen = set()
    for doc_id, syms in items:
        doc_id = int(doc_id)
        if doc_id < 0:
            raise ValueError(f"document id must be non-negative: {doc_id}")
        if doc_id in seen:
            raise ValueError(f"duplicate document id {doc_id}")
        seen.add(doc_id)
        arr = np.asarray(syms, dtype=np.int64).reshape(-1)
        if arr.shape[0] == 0:
            raise ValueError(f"document {doc_id} is empty")
        out.append((doc_id, arr))
    out.sort(key=lambda t: t[0])
    return out


class StaticIndex:
    """FM-index: Huffman wavelet tree over the BWT plus sampled suffix array.

    Sizes include the terminator; public methods take and return symbols in
    1..sigma.  ``range_find`` returns an inclusive SA interval or ``None``.
    """

    def __init__(self, docs, sigma=None, sample_rate=None):
        docs = _normalize_docs(docs)
        if sigma is None:
            sigma = max((int(a.max()) for _, a in docs), default=1)
        self.sigma = int(sigma)
        if self.sigma < 1:
            raise ValueError("sigma must be >= 1")
        for doc_id, arr in docs:
            if arr.min() < 1 or arr.max() > self.sigma:
                raise ValueError(f"document {doc_id}: symbol outside 1..{self.sigma}")
        rho = len(docs)
        self.doc_ids = np.asarray([d for d, _ in docs], dtype=np.int64)
        lengths = np.asarray([a.shape[0] + 1 for _, a in docs], dtype=np.int64)
        self.starts = np.zeros(rho, dtype=np.int64)
        if rho:
            np.cumsum(lengths[:-1], out=self.starts[1:])
        self.lengths = lengths
        n = int(lengths.sum())
        self.n = n
        if sample_rate is None:
            sample_rate = max(1, math.ceil(math.log2(n))) if n > 1 else 1
        if sample_rate < 1:
            raise ValueError("sample rate must be >= 1")
        self.sample_rate = int(sample_rate)
        self._id_pos = {int(d): k for k, d in enumerate(self.doc_ids)}
        self.last_steps = 0

        text = np.zeros(n, dtype=np.int64)
        keys = np.zeros(n, dtype=np.int64)
        for k, (_, arr) in enumerate(docs):
            s = int(self.starts[k])
            text[s:s + arr.shape[0]] = arr
            keys[s:s + arr.shape[0]] = arr + (rho - 1)
            keys[s + arr.shape[0]] = k
        sa = suffix_array(keys)
        self._build_from_sa(text, sa)

    def _build_from_sa(self, text, sa):
        n = self.n
        s = self.sample_rate
        bwt = text[sa - 1] if n else np.zeros(0, np.int64)
        self.wt = WaveletTree(bwt, sigma=self.sigma + 1)
        counts = np.bincount(text, minlength=self.sigma + 1)
        self.C = np.zeros(self.sigma + 2, dtype=np.int64)
        np.cumsum(counts, out=self.C[1:])
        marked = (sa % s) == 0
        self.marks = PlainBitVector(marked.astype(np.uint8))
        self.samples = sa[marked].astype(np.int64)
        self.dollar_sa = sa[bwt == 0].astype(np.int64) if n else np.zeros(0, np.int64)
        isa = np.empty(n, dtype=np.int64)
        isa[sa] = np.arange(n, dtype=np.int64)
        pos = np.arange(0, n, s, dtype=np.int64)
        self.inv_pos = np.append(pos, n)
        self.inv_rows = np.append(isa[pos], isa[0] if n else 0)

    # ------------------------------------------------------------------
    @property
    def num_docs(self):
        return int(self.doc_ids.shape[0])

    def __len__(self):
        return self.n

    def has_doc(self, doc_id):
        return int(doc_id) in self._id_pos

    def doc_length(self, doc_id):
        """Length of the document including its terminator."""
        return int(self.lengths[self._doc_index(doc_id)])

    def _doc_index(self, doc_id):
        try:
            return self._id_pos[int(doc_id)]
        except KeyError:
            raise KeyError(f"unknown document {doc_id}") from None

    def _wt(self):
        w = self.wt
        return w.bits.words, w.bits.cum, w.node_off, w.child

    def range_find(self, pattern):
        """Inclusive SA interval [a, b] of suffixes prefixed by pattern, or None."""
        p = np.asarray(pattern, dtype=np.int64).reshape(-1)
        if p.shape[0] == 0:
            raise ValueError("pattern must be non-empty")
        words, cum, off, ch = self._wt()
        a, b, steps = K.backward_search(p, self.C, words, cum, off, ch,
                                        self.wt.code, self.wt.code_len, self.n)
        self.last_steps = int(steps)
        if a >= b:
            return None
        return int(a), int(b) - 1

    def locate(self, i):
        if not 0 <= i < self.n:
            raise IndexError(f"SA position {i} out of range")
        words, cum, off, ch = self._wt()
        return int(K.locate_one(int(i), self.marks.words, self.marks.cum, self.samples,
                                self.dollar_sa, self.C, words, cum, off, ch,
                                self.wt.only_sym))

    def locate_many(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        if rows.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        if rows.min() < 0 or rows.max() >= self.n:
            raise IndexError("SA position out of range")
        words, cum, off, ch = self._wt()
        return K.locate_many(rows, self.marks.words, self.marks.cum, self.samples,
                             self.dollar_sa, self.C, words, cum, off, ch, self.wt.only_sym)

    def position_to_doc(self, positions):
        """Map global text positions to (doc ids, offsets) arrays."""
        positions = np.asarray(positions, dtype=np.int64)
        k = np.searchsorted(self.starts, positions, side="right") - 1
        return self.doc_ids[k], positions - self.starts[k]

    def occurrences(self, pattern):
        """Sorted list of (doc_id, offset) for every occurrence."""
        rng = self.range_find(pattern)
        if rng is None:
            return []
        pos = self.locate_many(np.arange(rng[0], rng[1] + 1))
        ids, offs = self.position_to_doc(pos)
        return sorted(zip(ids.tolist(), offs.tolist()))

    def _walk(self, q_target, stop, out, out_lo):
        j = int(np.searchsorted(self.inv_pos, q_target, side="left"))
        q = int(self.inv_pos[j])
        words, cum, off, ch = self._wt()
        return int(K.walk_back(q, int(self.inv_rows[j]), stop, self.C, self.starts,
                               words, cum, off, ch, self.wt.only_sym, out, out_lo))

    def extract(self, p, length):
        """Symbols T[p:p+length] of the concatenated text (terminators are 0)."""
        if length < 0 or p < 0 or p + length > self.n:
            raise IndexError(f"extract({p}, {length}) outside text of length {self.n}")
        out = np.zeros(length, dtype=np.int64)
        if length:
            self._walk(p + length, p, out, p)
        return out

    def suffix_rank(self, doc_id, offset):
        k = self._doc_index(doc_id)
        if not 0 <= offset < self.lengths[k]:
            raise IndexError(f"offset {offset} outside document {doc_id}")
        p = int(self.starts[k]) + int(offset)
        return self._walk(p, p, np.zeros(0, dtype=np.int64), 0)

    def suffix_rows(self, doc_id):
        """SA rows of every suffix of a document (one backward walk)."""
        k = self._doc_index(doc_id)
        lo = int(self.starts[k])
        hi = lo + int(self.lengths[k])
        rows = np.empty(hi - lo, dtype=np.int64)
        words, cum, off, ch = self._wt()
        # the terminator row is the document's rank among documents
        K.walk_rows(k, hi - lo, self.C, self.starts, lo, words, cum, off, ch,
                    self.wt.only_sym, rows)
        return rows

    def text(self):
        out = np.zeros(self.n, dtype=np.int64)
        if self.n:
            self._walk(self.n, 0, out, 0)
        return out

    def to_pairs(self):
        t = self.text()
        for k, d in enumerate(self.doc_ids.tolist()):
            s = int(self.starts[k])
            yield d, t[s:s + int(self.lengths[k]) - 1].copy()

    # ------------------------------------------------------------------
    def size_report(self):
        n = max(self.n, 2)
        word = math.ceil(math.log2(n))
        wt_bits = self.wt.size_bits()
        sample_bits = (self.samples.shape[0] + self.inv_pos.shape[0] * 2) * word
        mark_bits = self.marks.size_bits()
        docmap_bits = self.num_docs * 3 * 64 + self.dollar_sa.shape[0] * word
        count_bits = self.C.shape[0] * word
        total = wt_bits + sample_bits + mark_bits + docmap_bits + count_bits
        return {"wavelet_bits": wt_bits, "sample_bits": sample_bits,
                "mark_bits": mark_bits, "docmap_bits": docmap_bits,
                "count_bits": count_bits, "total_bits": total}

    def entropy_bound_bits(self, c=2):
        """c*n*(H0+1) + n*ceil(log2 n)/s + sigma*log n style reference bound."""
        n = self.n
        if n == 0:
            return 0.0
        counts = np.bincount(self.text(), minlength=self.sigma + 1).astype(float)
        p = counts[counts > 0] / n
        h0 = float(-(p * np.log2(p)).sum())
        word = math.ceil(math.log2(max(n, 2)))
        return c * n * (h0 + 1) + 2 * n * word / self.sample_rate + (self.sigma + 2) * word * 8

    def serialize(self):
        fields = {
            "meta": np.array([self.n, self.sigma, self.sample_rate], np.int64),
            "doc_ids": self.doc_ids, "starts": self.starts, "lengths": self.lengths,
            "C": self.C, "marks_words": self.marks.words,
            "marks_len": np.array([self.marks.length], np.int64),
            "samples": self.samples, "dollar_sa": self.dollar_sa,
            "inv_pos": self.inv_pos, "inv_rows": self.inv_rows,
        }
        fields.update(self.wt.state())
        return snapshot.dumps(fields)

    @classmethod
    def deserialize(cls, blob):
        st = snapshot.loads(blob)
        try:
            self = cls.__new__(cls)
            self.n, self.sigma, self.sample_rate = (int(x) for x in st["meta"])
            self.doc_ids = st["doc_ids"]
            self.starts = st["starts"]
            self.lengths = st["lengths"]
            self.C = st["C"]
            self.marks = PlainBitVector(words=st["marks_words"], length=int(st["marks_len"][0]))
            self.samples = st["samples"]
            self.dollar_sa = st["dollar_sa"]
            self.inv_pos = st["inv_pos"]
            self.inv_rows = st["inv_rows"]
            self.wt = WaveletTree.from_state(st)
        except KeyError as exc:
            raise snapshot.SnapshotError(f"missing field {exc}") from None
        self._id_pos = {int(d): k for k, d in enumerate(self.doc_ids)}
        self.last_steps = 0
        return self
