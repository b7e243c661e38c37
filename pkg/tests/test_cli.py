import hashlib
import io
import json

import pytest

from symtsp.cli import main


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def test_gen_is_reproducible(tmp_path):
    code, text = run(["gen", "8", "--seed", "1"])
    assert code == 0
    assert hashlib.sha256(text.encode()).hexdigest() == \
        "0e0b0bf30bb4837468d64d310c633f663a370405482d64a187b7491042359c63"
    path = tmp_path / "m.txt"
    assert run(["gen", "8", "--seed", "1", "-o", str(path)])[0] == 0
    assert path.read_text() == text


def test_solve_json(tmp_path):
    path = tmp_path / "m.txt"
    run(["gen", "8", "--seed", "3", "-o", str(path)])
    code, text = run(["solve", str(path)])
    rep = json.loads(text)
    assert code == 0 and rep["n"] == 8
    assert sorted(rep["tour"]) == list(range(1, 9))
    assert run(["solve", str(path)])[1] == text


def test_solve_trace_file(tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, _ = run(["solve", "fixture:example4", "--trace-level", "summary", "--trace-file", str(trace)])
    assert code == 0
    events = [json.loads(line) for line in trace.read_text().splitlines()]
    assert events and {e["event"] for e in events} <= {"phase", "round"}


def test_oracle_json(tmp_path):
    path = tmp_path / "m.txt"
    run(["gen", "6", "--seed", "2", "-o", str(path)])
    for which in ("tsp", "pm", "derangement", "cycles"):
        code, text = run(["oracle", str(path), "--which", which])
        body = json.loads(text)
        assert code == 0 and body["oracle"] == which


@pytest.mark.parametrize("name", ["example3", "example4"])
def test_verify_passes(name):
    code, text = run(["verify", name])
    assert code == 0, text
    assert all(line.startswith("PASS") for line in text.splitlines())


def test_trace_table(ex4):
    from symtsp import EXAMPLE4_START_TOUR
    code, text = run(["trace", "fixture:example4", "--table", " ".join(map(str, EXAMPLE4_START_TOUR))])
    assert code == 0 and text.strip()


def test_trace_vertex():
    code, text = run(["trace", "fixture:example3", "--vertex", "15", "--trial", "2"])
    assert code == 0
    events = [json.loads(line) for line in text.splitlines()]
    assert events


def test_errors_exit_2(tmp_path, capsys):
    assert run(["solve", str(tmp_path / "missing.txt")])[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n0 1 2\n1 0 3\n2 4 0\n")
    assert run(["solve", str(bad)])[0] == 2
    assert run(["gen", "1"])[0] == 2
    assert run(["verify", "nope"])[0] == 2
    assert "error" in capsys.readouterr().err
