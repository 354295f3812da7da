"""Dynamic binary relation over (object, label) pairs and a graph view.

A static block stores its pairs objectwise: ``S`` lists the labels of
object 0, then object 1, ... (each run in increasing label order) and
``N = 1^{n_0} 0 1^{n_1} 0 ...`` delimits the runs.  Deletion marks live in
``D`` (indexed like ``S``) and in ``DL``, the same marks in label-major
order: the run for label ``a`` starts at ``first[a]`` and its k-th bit
belongs to the k-th occurrence of ``a`` in ``S``.  ``DL`` is therefore the
concatenation of the per-label vectors ``D_a``.

Labels are stored as slots of a global table (``SN``: label -> slot,
``NS``: slot -> label) with a free list.  A slot is released when its last
pair goes away and may then be recycled.  Old blocks can still hold the
slot, but only as deleted pairs, so they report nothing for the new label.

The blocks are scheduled by :class:`WorstCaseEngine`; level 0 is an
uncompressed pair of adjacency maps with sorted lists.
"""
import math

import numpy as np
from sortedcontainers import SortedList

from .bits import CompactReportBitVector, PlainBitVector, RankBitVector
from .engine import NF_MIN, WorstCaseEngine
from .wavelet import WaveletTree


class LabelTable:
    """The SN/NS pair with a free-slot list."""

    def __init__(self):
        self.sn = {}
        self.ns = []
        self.free = []
        self.count = {}

    def acquire(self, label):
        slot = self.sn.get(label)
        if slot is None:
            if self.free:
                slot = self.free.pop()
                self.ns[slot] = label
            else:
                slot = len(self.ns)
                self.ns.append(label)
            self.sn[label] = slot
            self.count[label] = 0
        self.count[label] += 1
        return slot

    def release(self, label):
        self.count[label] -= 1
        if self.count[label] == 0:
            del self.count[label]
            slot = self.sn.pop(label)
            self.ns[slot] = None
            self.free.append(slot)
            return True
        return False

    def __len__(self):
        return len(self.sn)

    def check(self):
        for label, slot in self.sn.items():
            assert self.ns[slot] == label
        live = sum(1 for x in self.ns if x is not None)
        assert live == len(self.sn)
        assert len(self.free) + live == len(self.ns)


class RelationBlock:
    """Static block with lazy deletions."""

    def __init__(self, items, table, block=8):
        self.table = table
        pairs = sorted((o, table.sn[a]) for (o, a), _ in items)
        n = len(pairs)
        objs = np.fromiter((o for o, _ in pairs), dtype=np.int64, count=n)
        S = np.fromiter((s for _, s in pairs), dtype=np.int64, count=n)
        self.objs, run = np.unique(objs, return_counts=True)
        t = int(self.objs.shape[0])
        nbits = np.ones(n + t, dtype=np.uint8)
        nbits[np.cumsum(run) + np.arange(t)] = 0
        self.N = PlainBitVector(nbits)
        self.sigma = int(S.max()) + 1 if n else 1
        self.S = WaveletTree(S, self.sigma)
        counts = np.bincount(S, minlength=self.sigma)
        self.first = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self.G = PlainBitVector((counts > 0).astype(np.uint8))
        ones = np.ones(n, dtype=np.uint8)
        block = max(2, int(block))
        self.D = CompactReportBitVector(ones, block, zero_budget=n)
        self.Drank = RankBitVector(ones)
        self.DL = CompactReportBitVector(ones, block, zero_budget=n)
        self.DLrank = RankBitVector(ones)
        self.size = n
        self.deleted_units = 0

    @property
    def alive_units(self):
        return self.size - self.deleted_units

    def _local(self, obj):
        i = int(np.searchsorted(self.objs, obj))
        if i < self.objs.shape[0] and self.objs[i] == obj:
            return i
        return -1

    def _run(self, i):
        start = 0 if i == 0 else self.N.select0(i - 1) - (i - 1)
        return start, self.N.select0(i) - i

    def _slot(self, label):
        s = self.table.sn.get(label)
        if s is None or s >= self.sigma or not self.G.get(s):
            return -1
        return s

    def _find(self, obj, label):
        """(S position, rank among the label's occurrences) or None."""
        i = self._local(obj)
        s = self._slot(label)
        if i < 0 or s < 0:
            return None
        lo, hi = self._run(i)
        k = self.S.rank(s, lo)
        if self.S.rank(s, hi) == k:
            return None
        return self.S.select(s, k), k

    def _object_at(self, p):
        return int(self.objs[self.N.select1(p) - p])

    def delete(self, key):
        hit = self._find(*key)
        if hit is None or not self.D.get(hit[0]):
            raise KeyError(f"pair {key!r} not alive here")
        p, k = hit
        s = self.table.sn[key[1]]
        self.D.zero(p)
        self.Drank.zero(p)
        q = int(self.first[s]) + k
        self.DL.zero(q)
        self.DLrank.zero(q)
        self.deleted_units += 1
        return 1

    def unit_of(self, key):
        return 1

    def items(self):
        if self.alive_units == 0:
            return []
        out = []
        ns = self.table.ns
        for p in self.D.report(0, self.size - 1).tolist():
            out.append(((self._object_at(p), ns[self.S.access(p)]), None))
        return out

    # queries ---------------------------------------------------------
    def labels_of(self, obj):
        i = self._local(obj)
        if i < 0:
            return set()
        lo, hi = self._run(i)
        if lo == hi:
            return set()
        ns = self.table.ns
        return {ns[self.S.access(p)] for p in self.D.report(lo, hi - 1).tolist()}

    def count_labels(self, obj):
        i = self._local(obj)
        if i < 0:
            return 0
        lo, hi = self._run(i)
        return self.Drank.ones_in_range(lo, hi - 1)

    def objects_of(self, label):
        s = self._slot(label)
        if s < 0:
            return set()
        a, b = int(self.first[s]), int(self.first[s + 1])
        ks = self.DL.report(a, b - 1) - a
        return {self._object_at(self.S.select(s, k)) for k in ks.tolist()}

    def count_objects(self, label):
        s = self._slot(label)
        if s < 0:
            return 0
        return self.DLrank.ones_in_range(int(self.first[s]), int(self.first[s + 1]) - 1)

    def related(self, obj, label):
        hit = self._find(obj, label)
        return hit is not None and bool(self.D.get(hit[0]))

    def encoding(self):
        """(S as label slots, N as a 0/1 string)."""
        return self.S.to_array().tolist(), "".join(map(str, self.N.to_bits().tolist()))

    def size_report(self):
        t = int(self.objs.shape[0])
        remap = t * max(1, math.ceil(math.log2(int(self.objs.max()) + 2))) if t else 0
        marks = (self.D.size_report()["total_bits"] + self.DL.size_report()["total_bits"]
                 + self.Drank.size_report()["total_bits"] + self.DLrank.size_report()["total_bits"])
        first = int(self.first.shape[0]) * max(1, math.ceil(math.log2(self.size + 1)))
        core = self.S.size_bits() + self.N.size_bits() + self.G.size_bits() + first + remap
        return {"core_bits": core, "mark_bits": marks, "total_bits": core + marks}

    def overhead_bits(self):
        return self.size_report()["mark_bits"]


class PairLists:
    """Uncompressed holder: per-object and per-label sorted lists."""

    def __init__(self):
        self.by_obj = {}
        self.by_label = {}
        self.alive_units = 0

    deleted_units = 0

    def insert(self, key, payload=None):
        o, a = key
        self.by_obj.setdefault(o, SortedList()).add(a)
        self.by_label.setdefault(a, SortedList()).add(o)
        self.alive_units += 1
        return 1

    def delete(self, key):
        o, a = key
        self.by_obj[o].remove(a)
        if not self.by_obj[o]:
            del self.by_obj[o]
        self.by_label[a].remove(o)
        if not self.by_label[a]:
            del self.by_label[a]
        self.alive_units -= 1
        return 1

    def unit_of(self, key):
        return 1

    def items(self):
        return [((o, a), None) for o in sorted(self.by_obj) for a in self.by_obj[o]]

    def labels_of(self, obj):
        return set(self.by_obj.get(obj, ()))

    def count_labels(self, obj):
        return len(self.by_obj.get(obj, ()))

    def objects_of(self, label):
        return set(self.by_label.get(label, ()))

    def count_objects(self, label):
        return len(self.by_label.get(label, ()))

    def related(self, obj, label):
        return label in self.by_obj.get(obj, ())

    def overhead_bits(self):
        return 0


class RelationBackend:
    filter_tombstones = True

    def __init__(self, table):
        self.table = table
        self.engine = None

    @staticmethod
    def unit(payload):
        return 1

    @staticmethod
    def unit_of(struct, key):
        return 1

    def make_dynamic(self):
        return PairLists()

    def build(self, items):
        tau = self.engine.tau if self.engine is not None else 2
        return RelationBlock(items, self.table, block=tau)


def _check_id(x, what):
    x = int(x)
    if x < 0:
        raise ValueError(f"{what} id must be non-negative")
    return x


class DynamicRelation:
    def __init__(self, epsilon=0.5, tau=None, nf_min=NF_MIN):
        self.table = LabelTable()
        self.backend = RelationBackend(self.table)
        self.engine = WorstCaseEngine(self.backend, epsilon=epsilon, tau=tau, nf_min=nf_min)
        self.backend.engine = self.engine
        self.obj_count = {}
        self.empty_labels = 0

    def add(self, obj, label):
        key = (_check_id(obj, "object"), _check_id(label, "label"))
        if key in self.engine.registry:
            raise KeyError(f"pair {key!r} already present")
        self.table.acquire(key[1])
        self.obj_count[key[0]] = self.obj_count.get(key[0], 0) + 1
        self.engine.insert(key, None)

    def remove(self, obj, label):
        key = (int(obj), int(label))
        if key not in self.engine.registry:
            raise KeyError(f"pair {key!r} not present")
        self.engine.delete(key)
        if self.table.release(key[1]):
            self.empty_labels += 1
        c = self.obj_count[key[0]] - 1
        if c:
            self.obj_count[key[0]] = c
        else:
            del self.obj_count[key[0]]

    def _holders(self):
        return [s.struct for s in self.engine.slots() if s.alive]

    def labels_of(self, obj):
        obj = int(obj)
        if obj not in self.obj_count:
            return set()
        out = set()
        for h in self._holders():
            out |= h.labels_of(obj)
        return out

    def objects_of(self, label):
        label = int(label)
        if label not in self.table.sn:
            return set()
        out = set()
        for h in self._holders():
            out |= h.objects_of(label)
        return out

    def related(self, obj, label):
        obj, label = int(obj), int(label)
        if obj not in self.obj_count or label not in self.table.sn:
            return False
        return any(h.related(obj, label) for h in self._holders())

    def count_labels(self, obj):
        obj = int(obj)
        if obj not in self.obj_count:
            return 0
        return sum(h.count_labels(obj) for h in self._holders())

    def count_objects(self, label):
        label = int(label)
        if label not in self.table.sn:
            return 0
        return sum(h.count_objects(label) for h in self._holders())

    def __len__(self):
        return self.engine.n

    def pairs(self):
        out = []
        for s in self.engine.slots():
            out.extend(k for k, _ in s.struct.items())
        return sorted(out)

    @property
    def num_objects(self):
        return len(self.obj_count)

    @property
    def num_labels(self):
        return len(self.table)

    def size_report(self):
        core = marks = 0
        for s in self.engine.slots():
            if isinstance(s.struct, RelationBlock):
                rep = s.struct.size_report()
                core += rep["core_bits"]
                marks += rep["mark_bits"]
            else:
                # two sorted lists holding each pair, one word per entry
                core += 2 * 64 * s.alive
        word = max(1, math.ceil(math.log2(max(self.engine.n, 2))))
        tables = 2 * len(self.table.ns) * word
        return {"block_bits": core, "mark_bits": marks, "table_bits": tables,
                "total_bits": core + marks + tables}

    def stats(self):
        st = {"pairs": self.engine.n, "objects": self.num_objects,
              "labels": self.num_labels, "label_slots": len(self.table.ns),
              "empty_labels": self.empty_labels}
        st.update(self.engine.stats())
        return st

    def check(self):
        self.engine.check()
        self.table.check()
        assert sum(self.obj_count.values()) == self.engine.n
        assert sum(self.table.count.values()) == self.engine.n


class DirectedGraph:
    """Edges u -> v stored as object u related to label v."""

    def __init__(self, epsilon=0.5, tau=None, nf_min=NF_MIN):
        self.rel = DynamicRelation(epsilon=epsilon, tau=tau, nf_min=nf_min)

    def add_edge(self, u, v):
        self.rel.add(u, v)

    def remove_edge(self, u, v):
        self.rel.remove(u, v)

    def has_edge(self, u, v):
        return self.rel.related(u, v)

    def out_neighbors(self, u):
        return self.rel.labels_of(u)

    def in_neighbors(self, v):
        return self.rel.objects_of(v)

    def out_degree(self, u):
        return self.rel.count_labels(u)

    def in_degree(self, v):
        return self.rel.count_objects(v)

    def __len__(self):
        return len(self.rel)

    def stats(self):
        return self.rel.stats()

    def check(self):
        self.rel.check()
