"""Brute-force reference models.

Deliberately naive and self-contained: nothing here imports the indexing
structures, so agreement between the two is meaningful.
"""
from functools import cmp_to_key


class NaiveCollection:
    """Documents as plain lists of symbols keyed by id."""

    def __init__(self, docs=()):
        self.docs = {}
        for doc_id, syms in (docs.items() if isinstance(docs, dict) else docs):
            self.insert(doc_id, syms)

    def insert(self, doc_id, syms):
        if doc_id in self.docs:
            raise KeyError(f"document {doc_id} already present")
        self.docs[doc_id] = [int(x) for x in syms]

    def delete(self, doc_id):
        del self.docs[doc_id]

    def occurrences(self, pattern):
        return naive_occurrences(self.docs, pattern)

    def count(self, pattern):
        return len(self.occurrences(pattern))

    def total_symbols(self):
        """Alive symbols including one terminator per document."""
        return sum(len(s) + 1 for s in self.docs.values())


def naive_occurrences(docs, pattern):
    """Set of (doc_id, offset) where pattern occurs; overlapping allowed."""
    pat = [int(x) for x in pattern]
    m = len(pat)
    found = set()
    items = docs.items() if isinstance(docs, dict) else docs
    for doc_id, syms in items:
        syms = [int(x) for x in syms]
        for i in range(len(syms) - m + 1):
            if syms[i:i + m] == pat:
                found.add((doc_id, i))
    return found


def naive_suffix_sort(docs):
    """All suffixes (terminators included) as (doc_id, offset), sorted.

    Each document ends with terminator 0; two terminators compare by
    document id, and a terminator sorts before any symbol.
    """
    items = sorted(docs.items() if isinstance(docs, dict) else docs)
    texts = {d: [int(x) for x in s] + [0] for d, s in items}

    def cmp(a, b):
        (da, ia), (db, ib) = a, b
        ta, tb = texts[da], texts[db]
        while True:
            x, y = ta[ia], tb[ib]
            if x == 0 and y == 0:
                return (da > db) - (da < db)
            if x != y:
                return -1 if x < y else 1
            ia += 1
            ib += 1

    suffixes = [(d, i) for d, t in texts.items() for i in range(len(t))]
    return sorted(suffixes, key=cmp_to_key(cmp))


class NaiveRelation:
    """Set-of-pairs model of a binary relation between objects and labels."""

    def __init__(self):
        self.pairs = set()

    def add(self, obj, label):
        if (obj, label) in self.pairs:
            raise KeyError(f"pair ({obj}, {label}) already present")
        self.pairs.add((obj, label))

    def remove(self, obj, label):
        self.pairs.remove((obj, label))

    def labels_of(self, obj):
        return {b for a, b in self.pairs if a == obj}

    def objects_of(self, label):
        return {a for a, b in self.pairs if b == label}

    def related(self, obj, label):
        return (obj, label) in self.pairs

    def count_labels(self, obj):
        return len(self.labels_of(obj))

    def count_objects(self, label):
        return len(self.objects_of(label))

    def __len__(self):
        return len(self.pairs)


class NaiveGraph:
    """Directed graph as adjacency sets."""

    def __init__(self):
        self.out = {}

    def add_edge(self, u, v):
        nb = self.out.setdefault(u, set())
        if v in nb:
            raise KeyError(f"edge {u}->{v} already present")
        nb.add(v)

    def remove_edge(self, u, v):
        self.out[u].remove(v)

    def has_edge(self, u, v):
        return v in self.out.get(u, ())

    def out_neighbors(self, u):
        return set(self.out.get(u, ()))

    def in_neighbors(self, v):
        return {u for u, nb in self.out.items() if v in nb}

    def out_degree(self, u):
        return len(self.out.get(u, ()))

    def in_degree(self, v):
        return len(self.in_neighbors(v))
