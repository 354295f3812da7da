"""Fully dynamic document index with worst-case update cost.

Thin document layer over :class:`WorstCaseEngine`: level 0 is a
generalized suffix tree, every other holder a deletion-only compressed
index.  Queries visit every live holder (levels, locked levels, temporary
single-document holders, tops, parked and retired holders); pending builds
stay invisible until they are swapped in.
"""
import numpy as np

from .engine import NF_MIN, WorstCaseEngine
from .semi_dynamic import SemiDynamicIndex
from .suffix_tree import GeneralizedSuffixTree


class DynamicDocs:
    """Suffix-tree holder for level 0."""

    def __init__(self):
        self.tree = GeneralizedSuffixTree()

    def insert(self, key, payload):
        self.tree.insert(key, payload)
        return self.tree.last_insert_ops

    def delete(self, key):
        before = self.tree.node_ops
        self.tree.delete(key)
        return self.tree.node_ops - before

    @property
    def alive_units(self):
        return self.tree.total_symbols

    deleted_units = 0

    def doc_length(self, key):
        return self.tree.doc_length(key)

    def items(self):
        return list(self.tree.to_pairs())

    def query(self, pattern):
        return self.tree.query(pattern)

    def count(self, pattern):
        return self.tree.count(pattern)

    def overhead_bits(self):
        return 0


class StaticDocs:
    """Deletion-only compressed holder (no automatic purge)."""

    def __init__(self, items, sigma, block, sample_rate):
        self.index = SemiDynamicIndex(items, sigma, tau=None, sample_rate=sample_rate,
                                      block=block)

    def delete(self, key):
        size = self.index.doc_length(key)
        self.index.delete_document(key)
        return size

    @property
    def alive_units(self):
        return self.index.alive_symbols

    @property
    def deleted_units(self):
        return self.index.deleted_symbols

    def doc_length(self, key):
        return self.index.doc_length(key)

    def items(self):
        return list(self.index.to_pairs())

    def query(self, pattern):
        return self.index.query(pattern)

    def count(self, pattern):
        return self.index.count(pattern)

    def overhead_bits(self):
        return self.index.size_report()["overhead_bits"]


class DocBackend:
    def __init__(self, sigma, sample_rate=None):
        self.sigma = sigma
        self.sample_rate = sample_rate
        self.engine = None

    @staticmethod
    def unit(payload):
        return len(payload) + 1

    @staticmethod
    def unit_of(struct, key):
        return struct.doc_length(key)

    def make_dynamic(self):
        return DynamicDocs()

    def build(self, items):
        tau = self.engine.tau if self.engine is not None else 2
        return StaticDocs(items, self.sigma, tau, self.sample_rate)


class WorstCaseDynamicIndex:
    def __init__(self, sigma, epsilon=0.5, tau=None, sample_rate=None, nf_min=NF_MIN):
        self.sigma = int(sigma)
        self.backend = DocBackend(self.sigma, sample_rate)
        self.engine = WorstCaseEngine(self.backend, epsilon=epsilon, tau=tau, nf_min=nf_min)
        self.backend.engine = self.engine

    def _check_symbols(self, symbols):
        syms = np.asarray(symbols, dtype=np.int64).reshape(-1)
        if syms.shape[0] == 0:
            raise ValueError("empty document")
        if syms.min() < 1 or syms.max() > self.sigma:
            raise ValueError(f"symbol outside 1..{self.sigma}")
        return syms.tolist()

    def insert(self, doc_id, symbols):
        doc_id = int(doc_id)
        if doc_id < 0:
            raise ValueError("document id must be non-negative")
        if doc_id in self.engine.registry:
            raise KeyError(f"document {doc_id} already present")
        self.engine.insert(doc_id, self._check_symbols(symbols))

    def delete(self, doc_id):
        doc_id = int(doc_id)
        if doc_id not in self.engine.registry:
            raise KeyError(f"unknown document {doc_id}")
        self.engine.delete(doc_id)

    def query(self, pattern):
        if len(pattern) == 0:
            raise ValueError("pattern must be non-empty")
        out = set()
        for s in self.engine.slots():
            if s.alive:
                out |= s.struct.query(pattern)
        return out

    def count(self, pattern):
        if len(pattern) == 0:
            raise ValueError("pattern must be non-empty")
        return sum(s.struct.count(pattern) for s in self.engine.slots() if s.alive)

    def __contains__(self, doc_id):
        return int(doc_id) in self.engine.registry

    def __len__(self):
        return len(self.engine.registry)

    @property
    def n(self):
        return self.engine.n

    def to_pairs(self):
        docs = []
        for s in self.engine.slots():
            docs.extend(s.struct.items())
        return sorted(docs, key=lambda t: t[0])

    def overhead_bits(self):
        return sum(s.struct.overhead_bits() for s in self.engine.slots())

    def stats(self):
        st = {"mode": "worstcase", "docs": len(self.engine.registry)}
        st.update(self.engine.stats())
        return st

    def check(self):
        self.engine.check()
