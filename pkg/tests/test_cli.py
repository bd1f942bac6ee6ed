import csv
import json
from importlib import resources

import pytest

from bnpin.cli import main
from bnpin.generate import bench_corpus

DATA = resources.files("bnpin").joinpath("data")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_tlgl(capsys):
    code, out, err = run(capsys, "check", str(DATA / "tlgl.bn"), "--format", "json")
    report = json.loads(out)
    assert code == 2
    assert "X8" in report["structural"]["p1_violations"]
    assert report["oracle"]["observable"] is False
    assert report["oracle"]["witness"] is not None
    assert "MiB" in err


def test_check_tcell_skips_oracle(capsys):
    code, out, _ = run(capsys, "check", str(DATA / "tcell.bn"), "--format", "json")
    report = json.loads(out)
    assert report["oracle"]["run"] is False
    assert "2^37" in report["oracle"]["reason"]
    assert report["verdict"] == "undetermined"
    assert report["network"]["omega"] == 5 and report["network"]["omega_at"] == "PLCg(act)"
    assert code == 2


def test_check_chain(tmp_path, capsys):
    f = tmp_path / "chain.bn"
    f.write_text("X1 = X1 | X2\nX2 = X1\nX3 = !X2\noutput Y = X3\n")
    code, out, _ = run(capsys, "check", str(f))
    assert code == 0
    assert "decomposes into observed paths; observable" in out


def test_pin_cover_tlgl(tmp_path, capsys):
    out_file = tmp_path / "pinned.bn"
    code, out, _ = run(capsys, "pin", str(DATA / "tlgl.bn"), "--planner", "cover", "--out", str(out_file), "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert report["plan"]["cover"]["size"] == 4
    assert report["plan"]["cost"]["type1"] + report["plan"]["cost"]["type3"] == 1
    assert report["verification"]["oracle"]["observable"] is True
    code, out, _ = run(capsys, "check", str(out_file))
    assert code == 0 and "decomposes" in out


def test_pin_tcell(tmp_path, capsys):
    code, out, _ = run(capsys, "pin", str(DATA / "tcell.bn"), "--format", "json", "--out", str(tmp_path / "t.bn"))
    report = json.loads(out)
    assert code == 0
    assert report["plan"]["pinned_fraction"] == {"pins": 13, "states": 37, "percent": 35.1}
    code, out, _ = run(capsys, "check", str(tmp_path / "t.bn"), "--format", "json")
    assert json.loads(out)["structural"]["decomposes"] is True


def test_pin_already_observed(tmp_path, capsys):
    f = tmp_path / "obs.bn"
    f.write_text("X1 = X2\nX2 = !X1 & X2\noutput Y = X1\n")
    out_file = tmp_path / "o.bn"
    code, out, _ = run(capsys, "pin", str(f), "--out", str(out_file))
    assert code == 0
    assert "network is observable; no pins required" in out
    from bnpin.network import load_network

    assert load_network(out_file) == load_network(f)


def test_reports_are_deterministic(tmp_path, capsys):
    outputs = []
    for i in range(2):
        target = tmp_path / f"p{i}.bn"
        _, out, _ = run(capsys, "pin", str(DATA / "tlgl.bn"), "--planner", "greedy", "--out", str(target))
        outputs.append((out.replace(str(target), "OUT"), target.read_text()))
    assert outputs[0] == outputs[1]


def test_graph(tmp_path, capsys):
    code, dot, _ = run(capsys, "graph", str(DATA / "tlgl.bn"))
    assert code == 0
    assert dot.count("[kind=") == 21
    assert "color=red" not in dot
    code, overlay, _ = run(capsys, "graph", str(DATA / "tlgl.bn"), "--planner", "cover")
    assert 'pin="type 1"' in overlay and 'pin="type 2"' in overlay
    _, again, _ = run(capsys, "graph", str(DATA / "tlgl.bn"), "--planner", "cover")
    assert overlay == again


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", str(DATA / "bn5.bn"), "--format", "json")
    report = json.loads(out)
    assert code == 2
    assert len(report["oracle"]["witness_bits"]) == 2
    code, _, err = run(capsys, "oracle", str(DATA / "tcell.bn"))
    assert code == 1


def test_oracle_with_inputs(tmp_path, capsys):
    f = tmp_path / "in.bn"
    f.write_text("input U\nX1 = U ^ X1\noutput Y = X1\n")
    code, out, _ = run(capsys, "oracle", str(f), "--inputs", "U=1", "--format", "json")
    assert json.loads(out)["oracle"]["inputs"] == {"U": True}
    code, _, err = run(capsys, "oracle", str(f), "--inputs", "U=2")
    assert code == 1 and "error" in err


def test_parse_error_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.bn"
    f.write_text("X1 = X1 &&\n")
    code, _, err = run(capsys, "check", str(f))
    assert code == 1 and "line 1" in err


def test_bench(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code, out, _ = run(capsys, "bench", str(empty))
    assert code == 0 and out.strip().split(",")[0] == "file" and len(out.strip().splitlines()) == 1
    corpus = tmp_path / "corpus"
    bench_corpus(corpus, sizes=(6, 8, 30), seed=1)
    code, out, _ = run(capsys, "bench", str(corpus), "--repeats", "1", "--oracle-cap", "10")
    rows = list(csv.DictReader(out.splitlines()))
    assert [r["n"] for r in rows] == ["6", "8", "30"]
    assert rows[2]["oracle_s"] == "" and rows[0]["oracle_s"] != ""


def test_timings_flag(capsys):
    _, out, _ = run(capsys, "check", str(DATA / "bn5.bn"), "--format", "json", "--timings")
    assert "timings" in json.loads(out)
