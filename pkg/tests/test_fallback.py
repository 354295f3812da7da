"""The pure-numpy path (numba disabled) must give identical answers."""
import os
import subprocess
import sys

SCRIPT = r"""
import random
from dynidx import USE_NUMBA, StaticIndex, WorstCaseDynamicIndex
from dynidx.oracle import NaiveCollection, naive_occurrences
assert not USE_NUMBA
rnd = random.Random(0)
docs = [(d, [rnd.randint(1, 4) for _ in range(40)]) for d in range(5)]
idx = StaticIndex(docs, sigma=4)
for _ in range(20):
    pat = [rnd.randint(1, 4) for _ in range(rnd.randint(1, 3))]
    assert set(idx.occurrences(pat)) == naive_occurrences(docs, pat)
    assert idx.last_steps <= len(pat)
w = WorstCaseDynamicIndex(4)
ref = NaiveCollection()
for d, s in docs:
    w.insert(d, s); ref.insert(d, s)
w.delete(2); ref.delete(2)
assert w.query([1, 2]) == ref.occurrences([1, 2])
print("ok")
"""


def test_numpy_fallback_matches():
    env = dict(os.environ, DYNIDX_DISABLE_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True,
                         env=env, timeout=300)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == "ok"
