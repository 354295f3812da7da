"""Deletion-only index: a StaticIndex plus lazy deletion marks.

Deleting a document clears the mark bit of each of its suffix rows; queries
report only rows whose bit is still set.  With ``tau`` given, once more than
``total/tau`` symbols would be deleted the index is rebuilt from the
surviving documents instead.
"""
import math

import numpy as np

from .bits import CompactReportBitVector, RankBitVector
from .static_index import StaticIndex

NONE = "none"
REBUILT = "rebuilt"

_DEFAULT_BLOCK = 8


class SemiDynamicIndex:
    def __init__(self, docs, sigma, tau=None, sample_rate=None, counting=True,
                 block=None):
        self.sigma = int(sigma)
        self.tau = None if tau is None else max(2, int(tau))
        self.sample_rate = sample_rate
        self.counting = counting
        self.block = int(block) if block else (self.tau or _DEFAULT_BLOCK)
        self.rebuilds = 0
        self._build(docs)

    def _build(self, docs):
        self.core = StaticIndex(docs, sigma=self.sigma, sample_rate=self.sample_rate)
        n = self.core.n
        self.total_symbols = n
        self.deleted_symbols = 0
        budget = n if self.tau is None else max(1, n // self.tau)
        ones = np.ones(n, dtype=np.uint8)
        self.marks = CompactReportBitVector(ones, max(2, self.block), zero_budget=budget)
        self.rank = RankBitVector(ones) if self.counting else None
        self.alive = {int(d): True for d in self.core.doc_ids.tolist()}
        self.last_build_symbols = n

    # ------------------------------------------------------------------
    @property
    def alive_symbols(self):
        return self.total_symbols - self.deleted_symbols

    @property
    def num_alive(self):
        return sum(1 for v in self.alive.values() if v)

    def __contains__(self, doc_id):
        return self.alive.get(int(doc_id), False)

    def doc_length(self, doc_id):
        return self.core.doc_length(doc_id)

    def alive_ids(self):
        return [d for d, v in self.alive.items() if v]

    def delete_document(self, doc_id):
        """Lazily delete; returns ``REBUILT`` if the purge rule fired."""
        doc_id = int(doc_id)
        if not self.alive.get(doc_id, False):
            raise KeyError(f"document {doc_id} is not alive here")
        size = self.core.doc_length(doc_id)
        if self.tau is not None and self.deleted_symbols + size > self.total_symbols / self.tau:
            self.alive[doc_id] = False
            self.purge()
            return REBUILT
        for row in self.core.suffix_rows(doc_id).tolist():
            self.marks.zero(row)
            if self.rank is not None:
                self.rank.zero(row)
        self.alive[doc_id] = False
        self.deleted_symbols += size
        return NONE

    def purge(self):
        """Rebuild from alive documents only."""
        keep = list(self.to_pairs())
        self.rebuilds += 1
        self._build(keep)

    def to_pairs(self):
        for d, syms in self.core.to_pairs():
            if self.alive.get(d, False):
                yield d, syms

    # ------------------------------------------------------------------
    def query(self, pattern):
        if len(pattern) == 0:
            raise ValueError("pattern must be non-empty")
        if self.alive_symbols == 0:
            return set()
        rng = self.core.range_find(pattern)
        if rng is None:
            return set()
        rows = self.marks.report(rng[0], rng[1])
        if rows.shape[0] == 0:
            return set()
        ids, offs = self.core.position_to_doc(self.core.locate_many(rows))
        return set(zip(ids.tolist(), offs.tolist()))

    def count(self, pattern):
        if self.rank is None:
            raise RuntimeError("counting disabled for this index")
        if len(pattern) == 0:
            raise ValueError("pattern must be non-empty")
        if self.alive_symbols == 0:
            return 0
        rng = self.core.range_find(pattern)
        if rng is None:
            return 0
        return self.rank.ones_in_range(rng[0], rng[1])

    # ------------------------------------------------------------------
    def size_report(self):
        core = self.core.size_report()
        marks = self.marks.size_report()["total_bits"]
        rank = self.rank.size_report()["total_bits"] if self.rank is not None else 0
        n = max(self.core.n, 2)
        registry = len(self.alive) * (math.ceil(math.log2(n)) + 1)
        deleted = 0
        if self.total_symbols:
            deleted = math.ceil(core["total_bits"] * self.deleted_symbols / self.total_symbols)
        return {"core_bits": core["total_bits"], "mark_bits": marks, "rank_bits": rank,
                "registry_bits": registry, "deleted_symbol_bits": deleted,
                "overhead_bits": deleted + marks + rank,
                "total_bits": core["total_bits"] + marks + rank + registry}
