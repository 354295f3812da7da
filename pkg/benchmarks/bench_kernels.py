"""Time the hot kernels with numba on and off.

Each configuration runs in a fresh interpreter because the JIT switch is
read once at import time (``DYNIDX_DISABLE_NUMBA``).

    python benchmarks/bench_kernels.py [--n 20000] [--queries 300]
"""
import argparse
import json
import os
import subprocess
import sys
import time


def worker(n, queries, seed):
    import numpy as np

    from dynidx import USE_NUMBA, CompactReportBitVector, StaticIndex
    from dynidx.wavelet import WaveletTree

    rng = np.random.default_rng(seed)
    text = rng.integers(1, 5, size=n)
    docs = [(i, text[i * 1000:(i + 1) * 1000]) for i in range(n // 1000)]
    out = {"numba": USE_NUMBA}

    t = time.perf_counter()
    idx = StaticIndex(docs, sigma=4)
    out["build"] = time.perf_counter() - t

    pats = []
    for _ in range(queries):
        i = int(rng.integers(0, n - 8))
        pats.append(text[i:i + 6].tolist())
    idx.range_find(pats[0])  # compile outside the timed region
    t = time.perf_counter()
    for p in pats:
        idx.range_find(p)
    out["backward_search"] = time.perf_counter() - t

    rows = np.arange(0, min(idx.n, 2000), dtype=np.int64)
    idx.locate_many(rows[:2])
    t = time.perf_counter()
    idx.locate_many(rows)
    out["locate_2000"] = time.perf_counter() - t

    wt = WaveletTree(rng.integers(0, 64, size=n), 64)
    wt.rank(3, 10)
    t = time.perf_counter()
    for k in range(queries):
        wt.rank(k % 64, (k * 7919) % n)
        wt.access((k * 104729) % n)
    out["wavelet_rank_access"] = time.perf_counter() - t

    bits = np.ones(n, dtype=np.uint8)
    bits[rng.choice(n, n // 16, replace=False)] = 0
    cv = CompactReportBitVector(bits, 8, zero_budget=n)
    cv.report(0, 100)
    t = time.perf_counter()
    for k in range(queries):
        s = (k * 31) % (n - 200)
        cv.report(s, s + 199)
    out["report_ranges"] = time.perf_counter() - t
    print(json.dumps(out))


def run(disable, args):
    env = dict(os.environ)
    env["DYNIDX_DISABLE_NUMBA"] = "1" if disable else "0"
    cmd = [sys.executable, __file__, "--worker", "--n", str(args.n),
           "--queries", str(args.queries), "--seed", str(args.seed)]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--queries", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--worker", action="store_true")
    args = ap.parse_args()
    if args.worker:
        worker(args.n, args.queries, args.seed)
        return
    fast = run(False, args)
    slow = run(True, args)
    print(f"n={args.n} queries={args.queries} numba_active={fast['numba']}")
    print(f"{'kernel':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for key in fast:
        if key == "numba":
            continue
        a, b = fast[key], slow[key]
        print(f"{key:<22}{a:>10.4f}{b:>10.4f}{b / max(a, 1e-9):>9.1f}")


if __name__ == "__main__":
    main()
