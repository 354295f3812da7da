import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynidx.oracle import NaiveCollection
from dynidx.semi_dynamic import NONE, REBUILT, SemiDynamicIndex
from dynidx.static_index import StaticIndex


def test_delete_hides_document():
    idx = SemiDynamicIndex([(0, [1, 2, 1, 2]), (1, [2, 2])], sigma=2)
    assert idx.query([2]) == {(0, 1), (0, 3), (1, 0), (1, 1)}
    assert idx.delete_document(1) == NONE
    assert idx.query([2]) == {(0, 1), (0, 3)}
    assert idx.count([2]) == 2


def test_delete_only_document():
    idx = SemiDynamicIndex([(5, [1, 1, 2])], sigma=2)
    idx.delete_document(5)
    assert idx.query([1]) == set()
    assert idx.count([1]) == 0
    assert idx.num_alive == 0


def test_purge_threshold():
    # 40 symbols in total (terminators included): three docs of 6 and one of 22
    docs = [(0, [1] * 5), (1, [2] * 5), (2, [1, 2] * 2 + [1]), (3, [2, 1] * 10 + [2])]
    idx = SemiDynamicIndex(docs, sigma=2, tau=4)
    assert idx.total_symbols == 40
    assert idx.delete_document(0) == NONE       # 6 <= 10
    assert idx.delete_document(1) == REBUILT    # 12 > 10
    assert idx.total_symbols == 28
    assert idx.deleted_symbols == 0
    assert sorted(idx.alive_ids()) == [2, 3]
    assert idx.query([1, 1]) == set()


def test_matches_static_without_deletions():
    rnd = random.Random(4)
    docs = [(d, [rnd.randint(1, 3) for _ in range(20)]) for d in range(4)]
    semi = SemiDynamicIndex(docs, sigma=3)
    core = StaticIndex(docs, sigma=3)
    for pat in ([1], [2, 3], [3, 3, 3], [1, 2, 3, 1]):
        assert semi.query(pat) == set(core.occurrences(pat))
    assert semi.query([1, 1, 1, 1, 1, 1, 1, 1]) == set(core.occurrences([1] * 8))


def test_errors():
    idx = SemiDynamicIndex([(0, [1, 2])], sigma=2, counting=False)
    with pytest.raises(RuntimeError):
        idx.count([1])
    with pytest.raises(ValueError):
        idx.query([])
    idx.delete_document(0)
    with pytest.raises(KeyError):
        idx.delete_document(0)
    with pytest.raises(KeyError):
        idx.delete_document(9)


@given(seed=st.integers(0, 10 ** 9), tau=st.sampled_from([None, 2, 3, 8]),
       sigma=st.sampled_from([2, 4, 26]))
def test_random_deletions_match_oracle(seed, tau, sigma):
    rnd = random.Random(seed)
    docs = [(d, [rnd.randint(1, sigma) for _ in range(rnd.randint(1, 25))])
            for d in range(rnd.randint(1, 8))]
    idx = SemiDynamicIndex(docs, sigma=sigma, tau=tau)
    ref = NaiveCollection(docs)
    order = [d for d, _ in docs]
    rnd.shuffle(order)
    for d in order[:rnd.randint(0, len(order))]:
        idx.delete_document(d)
        ref.delete(d)
        if tau is not None:
            assert idx.deleted_symbols <= idx.total_symbols / tau
        for _ in range(3):
            pat = [rnd.randint(1, sigma) for _ in range(rnd.randint(1, 3))]
            got = idx.query(pat)
            assert got == ref.occurrences(pat)
            assert idx.count(pat) == len(got)
