import os
import subprocess
import sys

import pytest

from dynidx import cli


@pytest.fixture
def corpus(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    (d / "a.txt").write_bytes(b"abracadabra")
    (d / "b.txt").write_bytes(b"cabbage")
    (tmp_path / "extra.txt").write_bytes(b"new doc abra")
    return tmp_path


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("mode", cli.MODES)
def test_index_and_replay(corpus, capsys, mode):
    snap = str(corpus / "snap.dix")
    code, out, _ = run(["index", str(corpus / "corpus"), "-o", snap, "--mode", mode], capsys)
    assert code == 0 and "reconciled=1" in out
    script = corpus / "s.txt"
    script.write_text("QUERY abra\nINSERT extra.txt\nCOUNT ab\nQUERY ab\nDELETE 0\nQUERY ab\n")
    stats = corpus / "stats.txt"
    code, out, _ = run(["replay", snap, str(script), "--verify-oracle",
                        "--stats-out", str(stats)], capsys)
    assert code == 0
    assert out.splitlines() == ["0:0 0:7", "4", "0:0 0:7 1:1 2:8", "1:1 2:8"]
    kv = dict(line.split("=", 1) for line in stats.read_text().splitlines())
    assert kv["reconciled"] == "1" and kv["n"] == kv["holder_alive_sum"]


def test_three_command_script_two_docs(corpus, capsys):
    snap = str(corpus / "snap.dix")
    run(["index", str(corpus / "corpus"), "-o", snap], capsys)
    script = corpus / "three.txt"
    script.write_text("QUERY ab\nDELETE 1\nCOUNT a\n")
    code, out, _ = run(["replay", snap, str(script)], capsys)
    assert code == 0 and out.splitlines() == ["0:0 0:7 1:1", "5"]


def test_parse_errors(corpus, capsys):
    bad = corpus / "bad.txt"
    bad.write_text("QUERY a\n\nFROB x\n")
    code, _, err = run(["replay", "--fresh", str(bad)], capsys)
    assert code == cli.EXIT_PARSE and "line 3" in err
    bad.write_text("DELETE x\n")
    assert run(["replay", "--fresh", str(bad)], capsys)[0] == cli.EXIT_PARSE
    bad.write_text("DELETE 4\n")
    assert run(["replay", "--fresh", str(bad)], capsys)[0] == cli.EXIT_PARSE
    (corpus / "junk.dix").write_bytes(b"nope")
    assert run(["replay", str(corpus / "junk.dix"), str(bad)], capsys)[0] == cli.EXIT_PARSE


def test_usage_errors(corpus, capsys):
    assert run([], capsys)[0] == cli.EXIT_USAGE
    assert run(["replay", "--fresh", str(corpus / "missing.txt")], capsys)[0] == cli.EXIT_USAGE
    assert run(["index", str(corpus / "nodir"), "-o", "x"], capsys)[0] == cli.EXIT_USAGE


def test_dense_alphabet(corpus, capsys):
    snap = str(corpus / "d.dix")
    run(["index", str(corpus / "corpus"), "-o", snap, "--alphabet", "dense"], capsys)
    q = corpus / "q.txt"
    q.write_text("QUERY zz\nQUERY ab\nCOUNT zz\n")
    code, out, _ = run(["replay", snap, str(q), "--verify-oracle"], capsys)
    assert code == 0 and out.split("\n") == ["", "0:0 0:7 1:1", "0", ""]


def test_verification_failure_dumps_reproducer(corpus, capsys, monkeypatch):
    from dynidx.amortized import AmortizedDynamicIndex

    real = AmortizedDynamicIndex.query
    monkeypatch.setattr(AmortizedDynamicIndex, "query",
                        lambda self, p: set(list(real(self, p))[1:]))
    script = corpus / "s.txt"
    script.write_text("INSERTHEX 616261\nQUERY a\nQUERY b\n")
    code, _, err = run(["replay", "--fresh", "--mode", "amortized", str(script),
                        "--verify-oracle"], capsys)
    assert code == cli.EXIT_VERIFY
    assert "line 2" in err and "QUERY a" in err and "QUERY b" not in err


def test_graph_stream(tmp_path, capsys):
    e = tmp_path / "e.txt"
    e.write_text("A 0 1\nA 1 2\nA 2 0\nA 1 1\nQ out 1\nQ in 0\nQ has 2 0\nQ outdeg 1\n"
                 "R 1 2\nQ out 1\nQ indeg 1\n")
    code, out, _ = run(["graph", str(e), "--verify-oracle"], capsys)
    assert code == 0
    assert out.splitlines() == ["1 2", "2", "1", "2", "1", "2"]
    e.write_text("A 0\n")
    assert run(["graph", str(e)], capsys)[0] == cli.EXIT_PARSE


def test_fuzz_reproducible(capsys):
    a = run(["fuzz", "--ops", "300", "--seed", "5"], capsys)
    b = run(["fuzz", "--ops", "300", "--seed", "5"], capsys)
    assert a == b and a[0] == 0 and a[1].startswith("PASS")


def test_fuzz_minimizes_failures(capsys, monkeypatch):
    from dynidx.worstcase import WorstCaseDynamicIndex

    real = WorstCaseDynamicIndex.count
    # wrong whenever a pattern of length >= 3 has a match
    monkeypatch.setattr(WorstCaseDynamicIndex, "count",
                        lambda self, p: real(self, p) + (len(p) >= 3 and real(self, p) > 0))
    code, out, _ = run(["fuzz", "--ops", "200", "--seed", "1", "--alphabet", "2"], capsys)
    assert code == cli.EXIT_VERIFY
    lines = out.splitlines()
    assert lines[0].startswith("FAIL")
    body = lines[1:]
    assert len(body) <= 3
    assert body[-1].startswith("COUNTHEX")
    # the reproducer is itself a valid script
    ops = cli.parse_script(body)
    assert ops[-1][1] == "COUNT"


def test_minimize_is_greedy_and_small():
    ops = list(range(50))
    small = cli.minimize(ops, lambda seq: 17 in seq and 33 in seq)
    assert small == [17, 33]


def test_console_entry_point(corpus):
    env = dict(os.environ)
    res = subprocess.run([sys.executable, "-m", "dynidx.cli", "fuzz", "--ops", "50"],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0 and res.stdout.startswith("PASS")
