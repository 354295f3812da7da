import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynidx.oracle import NaiveCollection
from dynidx.suffix_tree import GeneralizedSuffixTree


def test_insert_query_examples():
    t = GeneralizedSuffixTree()
    t.insert(4, [1, 2, 1, 2])
    assert t.query([1, 2]) == {(4, 0), (4, 2)}
    assert t.query([1, 2, 1, 2]) == {(4, 0)}
    assert t.query([2, 2]) == set()
    t.insert(5, [1, 2, 1, 2])
    assert t.count([1, 2]) == 4
    t.check()


def test_length_one_document():
    t = GeneralizedSuffixTree()
    t.insert(0, [3])
    t.check()
    # root, the leaf for "3" and the terminator leaf
    assert t.num_nodes == 3
    assert t.total_symbols == 2


def test_round_trip_restores_tree():
    t = GeneralizedSuffixTree()
    t.insert(0, [1, 2, 3, 1, 2])
    nodes = t.num_nodes
    t.insert(1, [2, 3, 1, 2, 2])
    t.delete(1)
    t.check()
    assert t.num_nodes == nodes
    assert t.query([1, 2]) == {(0, 0), (0, 3)}
    t.delete(0)
    assert t.num_nodes == 1 and t.is_empty()


def test_errors():
    t = GeneralizedSuffixTree()
    t.insert(0, [1])
    with pytest.raises(KeyError):
        t.insert(0, [2])
    with pytest.raises(KeyError):
        t.delete(3)
    with pytest.raises(ValueError):
        t.insert(1, [])


@given(seed=st.integers(0, 10 ** 9), sigma=st.sampled_from([1, 2, 3, 26]))
def test_random_sessions(seed, sigma):
    rnd = random.Random(seed)
    t = GeneralizedSuffixTree()
    ref = NaiveCollection()
    nid = 0
    for _ in range(40):
        if ref.docs and rnd.random() < 0.35:
            d = rnd.choice(sorted(ref.docs))
            t.delete(d)
            ref.delete(d)
        else:
            s = [rnd.randint(1, sigma) for _ in range(rnd.randint(1, 30))]
            t.insert(nid, s)
            ref.insert(nid, s)
            # node operations per insert stay linear in the document length
            assert t.last_insert_ops <= 6 * (len(s) + 1)
            nid += 1
        t.check()
        pat = [rnd.randint(1, sigma) for _ in range(rnd.randint(1, 3))]
        assert t.query(pat) == ref.occurrences(pat)
        assert t.total_symbols == ref.total_symbols()
