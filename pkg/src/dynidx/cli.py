"""Command-line driver: build, replay, graph streams and oracle fuzzing.

Exit codes: 0 ok, 1 usage or I/O error, 2 parse error, 3 verification
failure.  Query results print as sorted ``docId:offset`` pairs, one query
per line; stats print as ``key=value`` lines.
"""
import argparse
import os
import random
import sys

import numpy as np

from . import snapshot
from .amortized import AmortizedDynamicIndex
from .binrel import DirectedGraph
from .oracle import NaiveCollection, NaiveGraph
from .worstcase import WorstCaseDynamicIndex

MODES = ("amortized", "amortized-loglog", "worstcase")
_MODE_CODE = {m: i for i, m in enumerate(MODES)}

EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VERIFY = 3


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


def make_index(mode, sigma, epsilon=0.5, tau=None, sample_rate=None):
    if mode == "worstcase":
        return WorstCaseDynamicIndex(sigma, epsilon=epsilon, tau=tau, sample_rate=sample_rate)
    layout = "loglog" if mode == "amortized-loglog" else "constant"
    return AmortizedDynamicIndex(sigma, epsilon=epsilon, tau=tau, mode=layout,
                                 sample_rate=sample_rate)


class Alphabet:
    """Byte -> symbol map.  ``bytes`` keeps all 256 values (symbol = byte+1)."""

    def __init__(self, table=None):
        if table is None:
            table = np.arange(1, 257, dtype=np.int64)
        self.table = np.asarray(table, dtype=np.int64)
        self.sigma = int(self.table.max())

    @classmethod
    def dense(cls, blobs):
        seen = np.zeros(256, dtype=bool)
        for b in blobs:
            seen[np.frombuffer(b, dtype=np.uint8)] = True
        table = np.zeros(256, dtype=np.int64)
        table[seen] = np.arange(1, int(seen.sum()) + 1)
        if not seen.any():
            table[0] = 1
        return cls(table)

    def encode(self, blob, what="document"):
        """Symbols of ``blob``; unknown bytes raise, or give None if ``what`` is None."""
        syms = self.table[np.frombuffer(blob, dtype=np.uint8)]
        if syms.shape[0] and syms.min() == 0:
            if what is None:
                return None
            raise ValueError(f"{what} uses a byte outside the alphabet")
        return syms.tolist()


# ----------------------------------------------------------------------
# snapshots
def _save(path, mode, params, alphabet, docs):
    ids = np.array([d for d, _ in docs], dtype=np.int64)
    lengths = np.array([len(s) for _, s in docs], dtype=np.int64)
    syms = np.array([x for _, s in docs for x in s], dtype=np.int64)
    eps, tau, rate = params
    fields = {
        "config": np.array([_MODE_CODE[mode], round(eps * 1e6), tau or 0, rate or 0], np.int64),
        "alphabet": alphabet.table, "doc_ids": ids, "lengths": lengths, "symbols": syms,
    }
    with open(path, "wb") as fh:
        fh.write(snapshot.dumps(fields))


def _load(path):
    with open(path, "rb") as fh:
        st = snapshot.loads(fh.read())
    try:
        code, eps, tau, rate = (int(x) for x in st["config"])
        mode = MODES[code]
        alphabet = Alphabet(st["alphabet"])
        bounds = np.concatenate(([0], np.cumsum(st["lengths"])))
        syms = st["symbols"]
        docs = [(int(d), syms[bounds[i]:bounds[i + 1]].tolist())
                for i, d in enumerate(st["doc_ids"].tolist())]
    except (KeyError, IndexError, ValueError) as exc:
        raise snapshot.SnapshotError(f"malformed snapshot: {exc}") from exc
    return mode, (eps / 1e6, tau or None, rate or None), alphabet, docs


def _fill(index, docs):
    for d, s in docs:
        index.insert(d, s)


def write_stats(index, out):
    st = index.stats()
    alive = sum(v for k, v in st.items() if k.endswith("_alive"))
    st["holder_alive_sum"] = alive
    st["reconciled"] = int(alive == st["n"])
    for k in sorted(st):
        out.write(f"{k}={st[k]}\n")


def _format(hits):
    return " ".join(f"{d}:{o}" for d, o in sorted(hits))


# ----------------------------------------------------------------------
def cmd_index(args):
    if not os.path.isdir(args.corpus):
        raise CliError(f"not a directory: {args.corpus}", EXIT_USAGE)
    names = sorted(n for n in os.listdir(args.corpus)
                   if os.path.isfile(os.path.join(args.corpus, n)))
    blobs = []
    for n in names:
        with open(os.path.join(args.corpus, n), "rb") as fh:
            blobs.append(fh.read())
    alphabet = Alphabet.dense(blobs) if args.alphabet == "dense" else Alphabet()
    docs = [(i, alphabet.encode(b)) for i, b in enumerate(blobs) if b]
    order = list(range(len(docs)))
    random.Random(args.seed).shuffle(order)
    index = make_index(args.mode, alphabet.sigma, args.epsilon, args.tau, args.sample_rate)
    _fill(index, [docs[i] for i in order])
    _save(args.output, args.mode, (args.epsilon, args.tau, args.sample_rate), alphabet, docs)
    write_stats(index, sys.stdout)
    return 0


def parse_script(lines):
    """[(lineno, command, argument)]; raises CliError on bad lines."""
    ops = []
    for no, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cmd, _, arg = line.partition(" ")
        if cmd not in ("INSERT", "INSERTHEX", "DELETE", "QUERY", "COUNT", "QUERYHEX",
                       "COUNTHEX"):
            raise CliError(f"line {no}: unknown command {cmd!r}", EXIT_PARSE)
        if not arg:
            raise CliError(f"line {no}: {cmd} needs an argument", EXIT_PARSE)
        if cmd == "DELETE":
            try:
                arg = int(arg)
            except ValueError:
                raise CliError(f"line {no}: bad document id {arg!r}", EXIT_PARSE) from None
        if cmd.endswith("HEX"):
            try:
                arg = bytes.fromhex(arg)
            except ValueError:
                raise CliError(f"line {no}: bad hex payload", EXIT_PARSE) from None
            cmd = cmd[:-3] if cmd != "INSERTHEX" else cmd
        ops.append((no, cmd, arg))
    return ops


def run_script(index, ops, alphabet, base, out, oracle=None, next_id=0):
    """Apply ops; returns None or the line number of the first mismatch."""
    for no, cmd, arg in ops:
        try:
            if cmd in ("INSERT", "INSERTHEX"):
                if cmd == "INSERT":
                    with open(os.path.join(base, arg), "rb") as fh:
                        blob = fh.read()
                else:
                    blob = arg
                syms = alphabet.encode(blob)
                index.insert(next_id, syms)
                if oracle is not None:
                    oracle.insert(next_id, syms)
                next_id += 1
            elif cmd == "DELETE":
                index.delete(arg)
                if oracle is not None:
                    oracle.delete(arg)
            else:
                blob = arg.encode("latin-1") if isinstance(arg, str) else arg
                pat = alphabet.encode(blob, None)
                if cmd == "QUERY":
                    got = index.query(pat) if pat is not None else set()
                    out.write(_format(got) + "\n")
                    if oracle is not None and pat is not None and got != oracle.occurrences(pat):
                        return no
                else:
                    got = index.count(pat) if pat is not None else 0
                    out.write(f"{got}\n")
                    if oracle is not None and pat is not None and got != oracle.count(pat):
                        return no
        except OSError as exc:
            raise CliError(f"line {no}: {exc}", EXIT_USAGE) from None
        except (KeyError, ValueError, UnicodeEncodeError) as exc:
            raise CliError(f"line {no}: {exc}", EXIT_PARSE) from None
    return None


def cmd_replay(args):
    if args.fresh:
        alphabet = Alphabet()
        mode, params, docs = args.mode, (args.epsilon, args.tau, args.sample_rate), []
    else:
        try:
            mode, params, alphabet, docs = _load(args.snapshot)
        except OSError as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
        except snapshot.SnapshotError as exc:
            raise CliError(str(exc), EXIT_PARSE) from None
    try:
        with open(args.script, encoding="latin-1") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    ops = parse_script(lines)
    index = make_index(mode, alphabet.sigma, *params)
    _fill(index, docs)
    oracle = None
    if args.verify_oracle:
        oracle = NaiveCollection(docs)
    next_id = max((d for d, _ in docs), default=-1) + 1
    base = os.path.dirname(os.path.abspath(args.script))
    bad = run_script(index, ops, alphabet, base, sys.stdout, oracle, next_id)
    if args.stats_out:
        with open(args.stats_out, "w") as fh:
            write_stats(index, fh)
    if bad is not None:
        sys.stderr.write(f"verification failed at line {bad}; reproducer:\n")
        for no, raw in enumerate(lines, 1):
            if no > bad:
                break
            sys.stderr.write(raw if raw.endswith("\n") else raw + "\n")
        return EXIT_VERIFY
    return 0


# ----------------------------------------------------------------------
def parse_edges(lines):
    ops = []
    for no, raw in enumerate(lines, 1):
        tok = raw.split()
        if not tok or tok[0].startswith("#"):
            continue
        try:
            if tok[0] in ("A", "R") and len(tok) == 3:
                ops.append((no, tok[0], int(tok[1]), int(tok[2])))
            elif tok[0] == "Q" and len(tok) == 3 and tok[1] in ("out", "in", "outdeg", "indeg"):
                ops.append((no, tok[1], int(tok[2]), None))
            elif tok[0] == "Q" and len(tok) == 4 and tok[1] == "has":
                ops.append((no, "has", int(tok[2]), int(tok[3])))
            else:
                raise CliError(f"line {no}: bad edge command {raw.strip()!r}", EXIT_PARSE)
        except ValueError:
            raise CliError(f"line {no}: bad node id", EXIT_PARSE) from None
    return ops


def _graph_query(g, op, u, v):
    if op == "out":
        return " ".join(map(str, sorted(g.out_neighbors(u))))
    if op == "in":
        return " ".join(map(str, sorted(g.in_neighbors(u))))
    if op == "outdeg":
        return str(g.out_degree(u))
    if op == "indeg":
        return str(g.in_degree(u))
    return "1" if g.has_edge(u, v) else "0"


def cmd_graph(args):
    try:
        with open(args.edges) as fh:
            ops = parse_edges(fh)
    except OSError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    g = DirectedGraph(epsilon=args.epsilon, tau=args.tau)
    ref = NaiveGraph() if args.verify_oracle else None
    for no, op, u, v in ops:
        try:
            if op == "A":
                g.add_edge(u, v)
                if ref is not None:
                    ref.add_edge(u, v)
            elif op == "R":
                g.remove_edge(u, v)
                if ref is not None:
                    ref.remove_edge(u, v)
            else:
                got = _graph_query(g, op, u, v)
                print(got)
                if ref is not None and got != _graph_query(ref, op, u, v):
                    sys.stderr.write(f"verification failed at line {no}\n")
                    return EXIT_VERIFY
        except (KeyError, ValueError) as exc:
            raise CliError(f"line {no}: {exc}", EXIT_PARSE) from None
    return 0


# ----------------------------------------------------------------------
def gen_session(seed, n_ops, doc_len, sigma):
    """Random doc workload as ops (cmd, arg); patterns are symbol lists."""
    rnd = random.Random(seed)
    alive = []
    texts = {}
    ops = []
    next_id = 0
    for _ in range(n_ops):
        x = rnd.random()
        if alive and x < 0.3:
            d = alive.pop(rnd.randrange(len(alive)))
            ops.append(("DELETE", d))
        elif x < 0.6 or not alive:
            s = [rnd.randint(1, sigma) for _ in range(rnd.randint(1, doc_len))]
            texts[next_id] = s
            alive.append(next_id)
            ops.append(("INSERT", s))
            next_id += 1
        else:
            if rnd.random() < 0.7:
                s = texts[rnd.choice(alive)]
                i = rnd.randrange(len(s))
                pat = s[i:i + rnd.randint(1, 5)]
            else:
                pat = [rnd.randint(1, sigma) for _ in range(rnd.randint(1, 3))]
            ops.append(("QUERY" if rnd.random() < 0.5 else "COUNT", pat))
    return ops


def check_session(ops, make):
    """Index of the first op whose answer disagrees with the oracle, else None."""
    index = make()
    ref = NaiveCollection()
    ids = []
    for i, (cmd, arg) in enumerate(ops):
        if cmd == "INSERT":
            d = len(ids)
            ids.append(d)
            index.insert(d, arg)
            ref.insert(d, arg)
        elif cmd == "DELETE":
            if arg in ref.docs:
                index.delete(arg)
                ref.delete(arg)
        elif cmd == "QUERY":
            if index.query(arg) != ref.occurrences(arg):
                return i
        elif index.count(arg) != ref.count(arg):
            return i
    return None


def minimize(ops, fails):
    """Greedy delta debugging: drop chunks while ``fails(ops)`` stays true."""
    chunk = max(1, len(ops) // 2)
    while chunk >= 1:
        i = 0
        while i < len(ops):
            trial = ops[:i] + ops[i + chunk:]
            if trial and fails(trial):
                ops = trial
            else:
                i += chunk
        chunk //= 2
    return ops


def render_ops(ops):
    """Script text for a doc workload (INSERTHEX payload = symbol - 1 bytes)."""
    lines = []
    alive = set()
    inserted = 0
    for cmd, arg in ops:
        if cmd == "INSERT":
            lines.append("INSERTHEX " + bytes(x - 1 for x in arg).hex())
            alive.add(inserted)
            inserted += 1
        elif cmd == "DELETE":
            if arg in alive:
                alive.discard(arg)
                lines.append(f"DELETE {arg}")
        else:
            lines.append(f"{cmd}HEX " + bytes(x - 1 for x in arg).hex())
    return "\n".join(lines) + "\n"


def cmd_fuzz(args):
    sigma = args.alphabet
    if not 1 <= sigma <= 256:
        raise CliError("--alphabet must be in 1..256", EXIT_USAGE)

    def make():
        return make_index(args.mode, 256, args.epsilon, args.tau, args.sample_rate)

    ops = gen_session(args.seed, args.ops, args.doc_len, sigma)

    def fails(seq):
        try:
            return check_session(seq, make) is not None
        except Exception:  # a crash counts as a failure while shrinking
            return True

    try:
        bad = check_session(ops, make)
    except Exception as exc:
        bad = -1
        sys.stderr.write(f"crash: {exc!r}\n")
    if bad is None:
        print(f"PASS mode={args.mode} seed={args.seed} ops={args.ops}")
        return 0
    small = minimize(ops, fails)
    print(f"FAIL mode={args.mode} seed={args.seed} ops={args.ops} minimized={len(small)}")
    sys.stdout.write(render_ops(small))
    return EXIT_VERIFY


# ----------------------------------------------------------------------
def _add_index_flags(p):
    p.add_argument("--mode", choices=MODES, default="worstcase")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--sample-rate", type=int, default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="dynidx", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build an index from a directory of documents")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=0, help="insertion order shuffle")
    p.add_argument("--alphabet", choices=("bytes", "dense"), default="bytes")
    _add_index_flags(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("replay", help="run a workload script")
    p.add_argument("snapshot", nargs="?")
    p.add_argument("script")
    p.add_argument("--fresh", action="store_true", help="start from an empty index")
    p.add_argument("--verify-oracle", action="store_true")
    p.add_argument("--stats-out")
    _add_index_flags(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("graph", help="run an edge stream")
    p.add_argument("edges")
    p.add_argument("--verify-oracle", action="store_true")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--tau", type=int, default=None)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("fuzz", help="random session checked against the oracle")
    p.add_argument("--ops", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--doc-len", type=int, default=40)
    p.add_argument("--alphabet", type=int, default=4, help="symbols per document")
    _add_index_flags(p)
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    if args.command == "replay" and (args.snapshot is None) == (not args.fresh):
        sys.stderr.write("replay: give a snapshot or --fresh, not both\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"dynidx {args.command}: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
