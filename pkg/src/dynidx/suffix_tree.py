"""Generalized suffix tree with whole-document insertion and deletion.

Documents are inserted with McCreight's algorithm (suffix links plus
rescan/scan).  Each document is stored with a private terminator key
``-1 - doc_id``, so every suffix ends in its own leaf.  A node keeps one
occurrence ``(doc, pos)`` of its path label; the edge into it spans
``depth(parent)..depth(node)`` of that occurrence.

Deletion removes the document's leaves longest suffix first.  The remaining
suffix set stays closed under taking suffixes, so a node that becomes unary
can't be the suffix-link target of a branching node and may be contracted
safely.  Surviving nodes whose label pointed into the deleted document are
relabeled from a leaf below them.
"""

_ROOT = 0


class GeneralizedSuffixTree:
    def __init__(self):
        self.parent = [-1]
        self.depth = [0]
        self.ldoc = [-1]
        self.lpos = [0]
        self.slink = [_ROOT]
        self.children = [{}]
        self._free = []
        self.texts = {}
        self.leaf = {}
        self.refs = {}
        self.total_symbols = 0
        self.node_ops = 0
        self.last_insert_ops = 0

    # ------------------------------------------------------------------
    def _new_node(self, parent, depth, doc, pos, children):
        if self._free:
            v = self._free.pop()
            self.parent[v] = parent
            self.depth[v] = depth
            self.ldoc[v] = doc
            self.lpos[v] = pos
            self.slink[v] = -1
            self.children[v] = children
        else:
            v = len(self.parent)
            self.parent.append(parent)
            self.depth.append(depth)
            self.ldoc.append(doc)
            self.lpos.append(pos)
            self.slink.append(-1)
            self.children.append(children)
        if children is not None:
            self.refs.setdefault(doc, set()).add(v)
        return v

    def _drop_node(self, v):
        if self.children[v] is not None:
            s = self.refs.get(self.ldoc[v])
            if s is not None:
                s.discard(v)
        self.children[v] = None
        self.parent[v] = -1
        self._free.append(v)

    def _char(self, v, k):
        return self.texts[self.ldoc[v]][self.lpos[v] + k]

    def _split(self, v, child, k, doc, pos):
        """Insert a node of depth k on the edge v -> child."""
        s = self.texts[doc]
        w = self._new_node(v, k, doc, pos, {self._char(child, k): child})
        self.children[v][s[pos + self.depth[v]]] = w
        self.parent[child] = w
        self.node_ops += 1
        return w

    def _rescan(self, v, target, doc, pos):
        # walk down from node v along s[pos:] to string depth target
        s = self.texts[doc]
        while self.depth[v] < target:
            self.node_ops += 1
            child = self.children[v][s[pos + self.depth[v]]]
            if self.depth[child] <= target:
                v = child
            else:
                return self._split(v, child, target, doc, pos), True
        return v, False

    def _scan(self, v, doc, pos):
        # compare symbol by symbol from node v; returns the head node
        s = self.texts[doc]
        while True:
            self.node_ops += 1
            dv = self.depth[v]
            child = self.children[v].get(s[pos + dv])
            if child is None:
                return v
            k = dv + 1
            dc = self.depth[child]
            while k < dc and s[pos + k] == self._char(child, k):
                k += 1
            if k == dc:
                v = child
            else:
                return self._split(v, child, k, doc, pos)

    # ------------------------------------------------------------------
    def insert(self, doc_id, symbols):
        doc_id = int(doc_id)
        if doc_id in self.texts:
            raise KeyError(f"document {doc_id} already present")
        s = [int(x) for x in symbols]
        if not s:
            raise ValueError("empty document")
        s.append(-1 - doc_id)
        m = len(s)
        self.texts[doc_id] = s
        start_ops = self.node_ops
        head = _ROOT
        fresh = False
        for i in range(m):
            if head == _ROOT:
                head = self._scan(_ROOT, doc_id, i)
                fresh = False
            elif not fresh:
                head = self._scan(self.slink[head], doc_id, i)
                fresh = False
            else:
                # the head found for suffix i-1 was created by that step
                h = head
                u = self.parent[h]
                start = _ROOT if u == _ROOT else self.slink[u]
                w, created = self._rescan(start, self.depth[h] - 1, doc_id, i)
                self.slink[h] = w
                head = w if created else self._scan(w, doc_id, i)
            leaf = self._new_node(head, m - i, doc_id, i, None)
            self.children[head][s[i + self.depth[head]]] = leaf
            self.leaf[(doc_id, i)] = leaf
            self.node_ops += 1
            fresh = head != _ROOT and self.slink[head] == -1
        self.total_symbols += m
        self.last_insert_ops = self.node_ops - start_ops

    def delete(self, doc_id):
        doc_id = int(doc_id)
        s = self.texts.get(doc_id)
        if s is None:
            raise KeyError(f"unknown document {doc_id}")
        m = len(s)
        for i in range(m):
            leaf = self.leaf.pop((doc_id, i))
            p = self.parent[leaf]
            del self.children[p][s[i + self.depth[p]]]
            self._drop_node(leaf)
            self.node_ops += 1
            if p != _ROOT and len(self.children[p]) == 1:
                (c,) = self.children[p].values()
                g = self.parent[p]
                key = self._char(p, self.depth[g])
                self.children[g][key] = c
                self.parent[c] = g
                self._drop_node(p)
                self.node_ops += 1
        for v in list(self.refs.pop(doc_id, ())):
            x = v
            while self.children[x] is not None:
                x = next(iter(self.children[x].values()))
            self.ldoc[v] = self.ldoc[x]
            self.lpos[v] = self.lpos[x]
            self.refs.setdefault(self.ldoc[x], set()).add(v)
            self.node_ops += 1
        del self.texts[doc_id]
        self.total_symbols -= m

    # ------------------------------------------------------------------
    def _locus(self, pattern):
        p = [int(x) for x in pattern]
        if not p:
            raise ValueError("pattern must be non-empty")
        v = _ROOT
        k = 0
        while k < len(p):
            child = self.children[v].get(p[k])
            if child is None:
                return -1
            end = min(self.depth[child], len(p))
            k += 1
            while k < end:
                if p[k] != self._char(child, k):
                    return -1
                k += 1
            v = child
        return v

    def _leaves(self, v):
        out = []
        stack = [v]
        while stack:
            x = stack.pop()
            ch = self.children[x]
            if ch is None:
                out.append((self.ldoc[x], self.lpos[x]))
            else:
                stack.extend(ch.values())
        return out

    def query(self, pattern):
        v = self._locus(pattern)
        return set() if v < 0 else set(self._leaves(v))

    def count(self, pattern):
        v = self._locus(pattern)
        return 0 if v < 0 else len(self._leaves(v))

    def __contains__(self, doc_id):
        return int(doc_id) in self.texts

    def doc_length(self, doc_id):
        return len(self.texts[int(doc_id)])

    def doc_ids(self):
        return list(self.texts)

    def to_pairs(self):
        for d in sorted(self.texts):
            yield d, self.texts[d][:-1]

    @property
    def num_nodes(self):
        return len(self.parent) - len(self._free)

    def is_empty(self):
        return not self.texts

    # ------------------------------------------------------------------
    def path(self, v):
        d = self.ldoc[v]
        if d < 0:
            return []
        return self.texts[d][self.lpos[v]:self.lpos[v] + self.depth[v]]

    def check(self):
        """Assert structural invariants (test helper; linear in tree size)."""
        seen = 0
        leaves = 0
        stack = [_ROOT]
        while stack:
            v = stack.pop()
            seen += 1
            ch = self.children[v]
            if ch is None:
                leaves += 1
                d, i = self.ldoc[v], self.lpos[v]
                assert self.leaf[(d, i)] == v
                assert self.depth[v] == len(self.texts[d]) - i
                continue
            if v != _ROOT:
                assert len(ch) >= 2, f"unary node {v}"
                sl = self.slink[v]
                assert sl >= 0 and self.children[sl] is not None, f"missing suffix link at {v}"
                assert self.path(sl) == self.path(v)[1:], f"bad suffix link at {v}"
            for key, c in ch.items():
                assert self.parent[c] == v
                assert self.depth[c] > self.depth[v]
                assert self._char(c, self.depth[v]) == key
                assert self.path(c)[:self.depth[v]] == self.path(v)
                stack.append(c)
        assert seen == self.num_nodes, "unreachable nodes"
        assert leaves == self.total_symbols == len(self.leaf)
