"""Fully dynamic index with amortized update cost.

Documents live in an uncompressed suffix tree (level 0) or in one of the
deletion-only compressed levels 1..r.  An insertion goes into the first
level j whose cap can absorb levels 0..j plus the new document; those
levels are merged into a fresh level j.  When nothing fits, or the alive
size has doubled or halved since the last global rebuild, everything is
rebuilt into level r.

Two cap layouts are provided: ``"constant"`` (``r = ceil(2/eps)`` levels
growing by ``log^eps n``) and ``"loglog"`` (caps doubling, ``O(log log n)``
levels).
"""
import math

from .semi_dynamic import SemiDynamicIndex
from .suffix_tree import GeneralizedSuffixTree

MIN_REF = 64
MIN_CAP = 64


def log_term(n):
    return max(math.log2(max(n, 2)), 4.0)


def default_tau(n):
    return max(2, math.ceil(math.log2(log_term(n))))


def level_caps(n, epsilon=0.5, mode="constant"):
    """Caps max_0..max_r for reference size n."""
    n = max(n, MIN_REF)
    L = log_term(n)
    base = max(2.0 * n / (L * L), MIN_CAP)
    if mode == "constant":
        r = math.ceil(2 / epsilon)
        caps = [int(base * L ** (epsilon * i)) for i in range(r + 1)]
    elif mode == "loglog":
        caps = [int(base)]
        while caps[-1] < 2 * n:
            caps.append(caps[-1] * 2)
        if len(caps) == 1:
            caps.append(caps[0] * 2)
    else:
        raise ValueError(f"unknown layout mode {mode!r}")
    for i in range(1, len(caps)):
        caps[i] = max(caps[i], caps[i - 1] + 1)
    return caps


def route(caps, sizes, size):
    """Smallest j with sizes[0] + ... + sizes[j] + size <= caps[j], else None."""
    acc = size
    for j, cap in enumerate(caps):
        acc += sizes[j]
        if acc <= cap:
            return j
    return None


class AmortizedDynamicIndex:
    def __init__(self, sigma, epsilon=0.5, tau=None, mode="constant", sample_rate=None):
        if not 0 < epsilon <= 1:
            raise ValueError("epsilon must be in (0, 1]")
        self.sigma = int(sigma)
        self.epsilon = float(epsilon)
        self.mode = mode
        self.fixed_tau = tau
        self.sample_rate = sample_rate
        self.c0 = GeneralizedSuffixTree()
        self.registry = {}
        self.n = 0
        self.n_last = 0
        self.build_symbols = 0
        self.inserted_symbols = 0
        self.global_rebuilds = 0
        self.n_max = 0
        self._relayout()
        self.levels = [None] * len(self.caps)

    def _relayout(self):
        self.caps = level_caps(self.n_last, self.epsilon, self.mode)
        self.tau = self.fixed_tau or default_tau(max(self.n_last, MIN_REF))

    @property
    def r(self):
        return len(self.caps) - 1

    def _make_level(self, docs):
        lvl = SemiDynamicIndex(docs, self.sigma, tau=self.tau, sample_rate=self.sample_rate)
        self.build_symbols += lvl.total_symbols
        return lvl

    def level_size(self, i):
        if i == 0:
            return self.c0.total_symbols
        lvl = self.levels[i]
        return 0 if lvl is None else lvl.alive_symbols

    def _drain(self, upto):
        docs = list(self.c0.to_pairs())
        self.c0 = GeneralizedSuffixTree()
        for i in range(1, upto + 1):
            if self.levels[i] is not None:
                docs.extend(self.levels[i].to_pairs())
                self.levels[i] = None
        return docs

    def _check_symbols(self, symbols):
        syms = [int(x) for x in symbols]
        if not syms:
            raise ValueError("empty document")
        if min(syms) < 1 or max(syms) > self.sigma:
            raise ValueError(f"symbol outside 1..{self.sigma}")
        return syms

    # ------------------------------------------------------------------
    def insert(self, doc_id, symbols):
        doc_id = int(doc_id)
        if doc_id in self.registry:
            raise KeyError(f"document {doc_id} already present")
        syms = self._check_symbols(symbols)
        size = len(syms) + 1
        self.inserted_symbols += size
        sizes = [self.level_size(i) for i in range(len(self.caps))]
        j = route(self.caps, sizes, size)
        self.n += size
        self.n_max = max(self.n_max, self.n)
        if j is None or self.n >= 2 * max(self.n_last, MIN_REF // 2):
            self.registry[doc_id] = -1
            self._global_rebuild(extra=(doc_id, syms))
            return
        if j == 0:
            self.c0.insert(doc_id, syms)
            self.registry[doc_id] = 0
            return
        docs = self._drain(j)
        docs.append((doc_id, syms))
        self.levels[j] = self._make_level(docs)
        for d, _ in docs:
            self.registry[d] = j
        for d in self.c0.doc_ids():
            self.registry[d] = 0

    def _global_rebuild(self, extra=None):
        docs = self._drain(len(self.levels) - 1)
        if extra is not None:
            docs.append(extra)
        self.n_last = self.n
        self.global_rebuilds += 1
        self._relayout()
        self.levels = [None] * len(self.caps)
        if docs:
            top = len(self.caps) - 1
            self.levels[top] = self._make_level(docs)
            for d, _ in docs:
                self.registry[d] = top

    def delete(self, doc_id):
        doc_id = int(doc_id)
        if doc_id not in self.registry:
            raise KeyError(f"unknown document {doc_id}")
        lv = self.registry.pop(doc_id)
        if lv == 0:
            size = self.c0.doc_length(doc_id)
            self.c0.delete(doc_id)
        else:
            lvl = self.levels[lv]
            size = lvl.doc_length(doc_id)
            before = lvl.rebuilds
            lvl.delete_document(doc_id)
            if lvl.rebuilds != before:
                self.build_symbols += lvl.last_build_symbols
            if lvl.alive_symbols == 0:
                self.levels[lv] = None
        self.n -= size
        if self.n_last >= 2 * MIN_REF and self.n <= self.n_last // 2:
            self._global_rebuild()

    # ------------------------------------------------------------------
    def _holders(self):
        yield self.c0
        for lvl in self.levels:
            if lvl is not None:
                yield lvl

    def query(self, pattern):
        out = set()
        for h in self._holders():
            out |= h.query(pattern)
        return out

    def count(self, pattern):
        return sum(h.count(pattern) for h in self._holders())

    def __contains__(self, doc_id):
        return int(doc_id) in self.registry

    def __len__(self):
        return len(self.registry)

    def to_pairs(self):
        docs = list(self.c0.to_pairs())
        for lvl in self.levels:
            if lvl is not None:
                docs.extend(lvl.to_pairs())
        return sorted(docs, key=lambda t: t[0])

    def overhead_bits(self):
        return sum(l.size_report()["overhead_bits"] for l in self.levels if l is not None)

    def stats(self):
        st = {"mode": self.mode, "n": self.n, "docs": len(self.registry),
              "n_at_rebuild": self.n_last, "tau": self.tau, "levels": self.r,
              "global_rebuilds": self.global_rebuilds,
              "build_symbols": self.build_symbols,
              "inserted_symbols": self.inserted_symbols,
              "c0_symbols": self.c0.total_symbols, "c0_nodes": self.c0.num_nodes}
        for i in range(1, len(self.caps)):
            lvl = self.levels[i]
            st[f"cap_{i}"] = self.caps[i]
            st[f"level_{i}_alive"] = 0 if lvl is None else lvl.alive_symbols
            st[f"level_{i}_deleted"] = 0 if lvl is None else lvl.deleted_symbols
        st["cap_0"] = self.caps[0]
        st["level_0_alive"] = self.c0.total_symbols
        return st

    def check(self):
        """Assert that caps hold and the registry matches the holders."""
        assert self.c0.total_symbols <= self.caps[0]
        seen = {d: 0 for d in self.c0.doc_ids()}
        for i in range(1, len(self.caps)):
            lvl = self.levels[i]
            if lvl is None:
                continue
            assert lvl.alive_symbols <= self.caps[i], (i, lvl.alive_symbols, self.caps[i])
            for d in lvl.alive_ids():
                assert d not in seen
                seen[d] = i
        assert seen == self.registry
        assert sum(self.level_size(i) for i in range(len(self.caps))) == self.n
