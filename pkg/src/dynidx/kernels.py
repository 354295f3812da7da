"""Inner loops: bit rank/select, wavelet traversal, LF walks, range reporting.

Every function here takes flat numpy arrays and scalars only, so the same
source runs compiled (numba) or interpreted (``DYNIDX_DISABLE_NUMBA=1``).
Bit vectors are little-endian words of 64 bits; ``cum[k]`` is the number of
ones in ``words[:k]`` (length ``nwords + 1``).
"""
import numpy as np

from ._jit import lowest_bit, njit, popcount

_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_SIX = np.int64(6)


# --------------------------------------------------------------------------
# build helpers (vectorized numpy, shared by both paths)

def pack_bits(bits):
    """Pack a 0/1 array into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[0]
    nw = (n + 63) // 64
    padded = np.zeros(nw * 64, dtype=np.uint8)
    padded[:n] = bits
    return np.packbits(padded, bitorder="little").view("<u8").astype(np.uint64)


def unpack_bits(words, n):
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


def cumulative_popcount(words):
    cum = np.zeros(words.shape[0] + 1, dtype=np.int64)
    if words.shape[0]:
        np.cumsum(np.bitwise_count(words), out=cum[1:])
    return cum


# --------------------------------------------------------------------------
# static bit vector primitives

@njit
def rank1(words, cum, i):
    w = i >> 6
    b = i & 63
    r = cum[w]
    if b:
        r += popcount(words[w] & ((_ONE << np.uint64(b)) - _ONE))
    return r


@njit
def get_bit(words, i):
    return np.int64((words[i >> 6] >> np.uint64(i & 63)) & _ONE)


@njit
def select1(words, cum, k):
    # position of the k-th one (0-based); caller guarantees k < total ones
    lo = 0
    hi = cum.shape[0] - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if cum[mid] <= k:
            lo = mid
        else:
            hi = mid
    x = words[lo]
    rem = k - cum[lo]
    for _ in range(rem):
        x &= x - _ONE
    return lo * 64 + lowest_bit(x)


@njit
def select0(words, cum, k):
    lo = 0
    hi = cum.shape[0] - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if mid * 64 - cum[mid] <= k:
            lo = mid
        else:
            hi = mid
    x = ~words[lo]
    rem = k - (lo * 64 - cum[lo])
    for _ in range(rem):
        x &= x - _ONE
    return lo * 64 + lowest_bit(x)


# --------------------------------------------------------------------------
# Huffman-shaped wavelet tree (all node bitmaps concatenated in one vector)

@njit
def wt_rank(words, cum, node_off, child, code, code_len, c, i):
    if c < 0 or c >= code_len.shape[0]:
        return 0
    ln = code_len[c]
    if ln < 0:
        return 0
    node = 0
    cd = code[c]
    for d in range(ln):
        b = (cd >> (ln - 1 - d)) & 1
        off = node_off[node]
        ones = rank1(words, cum, off + i) - rank1(words, cum, off)
        if b:
            i = ones
        else:
            i = i - ones
        node = child[node, b]
    return i


@njit
def wt_access_rank(words, cum, node_off, child, only_sym, i):
    # returns (symbol at i, occurrences of that symbol in [0, i))
    if node_off.shape[0] == 0:
        return only_sym, i
    node = 0
    while True:
        off = node_off[node]
        b = get_bit(words, off + i)
        ones = rank1(words, cum, off + i) - rank1(words, cum, off)
        if b:
            i = ones
        else:
            i = i - ones
        nxt = child[node, b]
        if nxt < 0:
            return -nxt - 1, i
        node = nxt


@njit
def wt_select(words, cum, node_off, child, code, code_len, c, k):
    ln = code_len[c]
    if ln <= 0:
        return k
    path = np.empty(ln, dtype=np.int64)
    node = 0
    cd = code[c]
    for d in range(ln):
        path[d] = node
        b = (cd >> (ln - 1 - d)) & 1
        node = child[node, b]
    pos = k
    for d in range(ln - 1, -1, -1):
        node = path[d]
        b = (cd >> (ln - 1 - d)) & 1
        off = node_off[node]
        before1 = rank1(words, cum, off)
        if b:
            pos = select1(words, cum, before1 + pos) - off
        else:
            pos = select0(words, cum, (off - before1) + pos) - off
    return pos


# --------------------------------------------------------------------------
# FM-index walks

@njit
def backward_search(pattern, C, words, cum, node_off, child, code, code_len, n):
    """Half-open SA interval of suffixes prefixed by ``pattern``.

    Always performs exactly ``len(pattern)`` steps; returns (a, b, steps).
    """
    a = 0
    b = n
    steps = 0
    sigma = C.shape[0] - 2
    for k in range(pattern.shape[0] - 1, -1, -1):
        c = pattern[k]
        steps += 1
        if a >= b:
            continue
        if c < 1 or c > sigma:
            a = 0
            b = 0
            continue
        a = C[c] + wt_rank(words, cum, node_off, child, code, code_len, c, a)
        b = C[c] + wt_rank(words, cum, node_off, child, code, code_len, c, b)
    if a >= b:
        a = 0
        b = 0
    return a, b, steps


@njit
def locate_one(i, mwords, mcum, samples, dollar_sa, C,
               words, cum, node_off, child, only_sym):
    steps = 0
    while True:
        if get_bit(mwords, i):
            return samples[rank1(mwords, mcum, i)] + steps
        c, r = wt_access_rank(words, cum, node_off, child, only_sym, i)
        if c == 0:
            return dollar_sa[r] + steps
        i = C[c] + r
        steps += 1


@njit
def locate_many(rows, mwords, mcum, samples, dollar_sa, C,
                words, cum, node_off, child, only_sym):
    out = np.empty(rows.shape[0], dtype=np.int64)
    for k in range(rows.shape[0]):
        out[k] = locate_one(rows[k], mwords, mcum, samples, dollar_sa, C,
                            words, cum, node_off, child, only_sym)
    return out


@njit
def doc_of(starts, p):
    lo = 0
    hi = starts.shape[0]
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if starts[mid] <= p:
            lo = mid
        else:
            hi = mid
    return lo


@njit
def walk_back(q, row, stop, C, starts, words, cum, node_off, child, only_sym,
              out, out_lo):
    """Step from text position q (SA row ``row``) back to ``stop``.

    Symbols T[p] for out_lo <= p < out_lo + len(out) are written to out.
    Returns the SA row of ``stop``.
    """
    hi = out_lo + out.shape[0]
    while q > stop:
        c, r = wt_access_rank(words, cum, node_off, child, only_sym, row)
        p = q - 1
        if out_lo <= p < hi:
            out[p - out_lo] = c
        if c == 0:
            row = doc_of(starts, p)
        else:
            row = C[c] + r
        q = p
    return row


# --------------------------------------------------------------------------
# hierarchical non-empty summary (64-ary bitmap tree)

@njit
def summary_clear(summ, level_off, nlev, t):
    idx = t
    for lev in range(nlev):
        w = idx >> 6
        p = level_off[lev] + w
        summ[p] &= ~(_ONE << np.uint64(idx & 63))
        if summ[p] != _ZERO:
            return
        idx = w


@njit
def summary_set(summ, level_off, nlev, t):
    idx = t
    for lev in range(nlev):
        w = idx >> 6
        p = level_off[lev] + w
        was = summ[p]
        summ[p] |= _ONE << np.uint64(idx & 63)
        if was != _ZERO:
            return
        idx = w


@njit
def summary_next(summ, level_off, nlev, t):
    """Smallest marked index >= t at the bottom level, or -1."""
    lev = 0
    idx = t
    while True:
        if lev == nlev:
            return -1
        w = idx >> 6
        if w >= level_off[lev + 1] - level_off[lev]:
            return -1
        x = summ[level_off[lev] + w] & (_ALL << np.uint64(idx & 63))
        if x != _ZERO:
            idx = w * 64 + lowest_bit(x)
            break
        lev += 1
        idx = w + 1
    while lev > 0:
        lev -= 1
        idx = idx * 64 + lowest_bit(summ[level_off[lev] + idx])
    return idx


@njit
def _emit(out, cnt, x, base):
    while x != _ZERO:
        if cnt == out.shape[0]:
            grown = np.empty(out.shape[0] * 2, dtype=np.int64)
            grown[:cnt] = out[:cnt]
            out = grown
        out[cnt] = base + lowest_bit(x)
        cnt += 1
        x &= x - _ONE
    return out, cnt


@njit
def report_ones(words, summ, level_off, nlev, s, e):
    """Positions of ones in [s, e] and the number of words examined."""
    ws = s >> 6
    we = e >> 6
    out = np.empty(64, dtype=np.int64)
    cnt = 0
    lo_mask = _ALL << np.uint64(s & 63)
    if we == ws:
        width = e - s + 1
        x = (words[ws] >> np.uint64(s & 63))
        if width < 64:
            x &= (_ONE << np.uint64(width)) - _ONE
        out, cnt = _emit(out, cnt, x, s)
        return out[:cnt], 1
    out, cnt = _emit(out, cnt, words[ws] & lo_mask, ws * 64)
    probes = 1
    t = summary_next(summ, level_off, nlev, ws + 1)
    while t != -1 and t < we:
        out, cnt = _emit(out, cnt, words[t], t * 64)
        probes += 1
        t = summary_next(summ, level_off, nlev, t + 1)
    hb = e & 63
    x = words[we]
    if hb < 63:
        x &= (_ONE << np.uint64(hb + 1)) - _ONE
    out, cnt = _emit(out, cnt, x, we * 64)
    probes += 1
    return out[:cnt], probes


@njit
def clear_bit(words, summ, level_off, nlev, i):
    """Set bit i to zero; returns 1 if it was one."""
    w = i >> 6
    m = _ONE << np.uint64(i & 63)
    if words[w] & m == _ZERO:
        return 0
    words[w] &= ~m
    if words[w] == _ZERO:
        summary_clear(summ, level_off, nlev, w)
    return 1


# --------------------------------------------------------------------------
# aggregation tree over word popcounts

@njit
def seg_prefix(tree, size, w):
    # sum of leaves [0, w)
    res = 0
    lo = size
    hi = size + w
    while lo < hi:
        if lo & 1:
            res += tree[lo]
            lo += 1
        if hi & 1:
            hi -= 1
            res += tree[hi]
        lo >>= 1
        hi >>= 1
    return res


@njit
def seg_add(tree, size, w, delta):
    i = size + w
    touched = 0
    while i >= 1:
        tree[i] += delta
        touched += 1
        i >>= 1
    return touched


@njit
def rank_tree(words, tree, size, i):
    # ones in [0, i]
    w = i >> 6
    b = i & 63
    x = words[w]
    if b < 63:
        x &= (_ONE << np.uint64(b + 1)) - _ONE
    return seg_prefix(tree, size, w) + popcount(x)


@njit
def walk_rows(row, count, C, starts, lo, words, cum, node_off, child, only_sym, rows):
    """Fill rows[count-1], rows[count-2], ... with SA rows walking backward.

    ``row`` is the row of text position lo + count - 1.
    """
    rows[count - 1] = row
    for k in range(count - 1, 0, -1):
        c, r = wt_access_rank(words, cum, node_off, child, only_sym, row)
        if c == 0:
            row = doc_of(starts, lo + k - 1)
        else:
            row = C[c] + r
        rows[k - 1] = row
