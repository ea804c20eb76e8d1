import io
import json

import pytest

from sigcover.cli import main, parse_cover_file
from sigcover.euler_tree import build_euler_tree
from sigcover.generators import petersen
from sigcover.graph import format_graph, parse_graph

LONG_BARBELL = "3 4\n0 0 -\n0 1 +\n1 2 +\n2 2 -\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCover:
    def test_petersen(self, capsys, files):
        path = files("petersen5.sg", format_graph(petersen()))
        code, out, _ = run(capsys, "cover", path)
        assert code == 0
        rows = dict(line.split(" ", 1) for line in out.splitlines() if not line.startswith("#"))
        assert int(rows["achieved"]) <= 46 and rows["certified"] == "yes"

    def test_one_loop_not_admissible(self, capsys, files):
        code, _, err = run(capsys, "cover", files("oneloop.sg", "1 1\n0 0 -\n"))
        assert code == 2 and "not flow-admissible" in err

    def test_empty_file(self, capsys, files):
        code, _, err = run(capsys, "cover", files("empty.sg", ""))
        assert code == 1 and "parse error" in err

    def test_unreadable_path(self, capsys, tmp_path):
        code, _, err = run(capsys, "cover", str(tmp_path))
        assert code == 1 and "cannot read" in err

    def test_parse_error_line(self, capsys, files):
        code, _, err = run(capsys, "cover", files("bad.sg", "2 1\n0 7 +\n"))
        assert code == 1 and "line 2" in err

    def test_json_record(self, capsys, files):
        code, out, _ = run(capsys, "cover", "--format", "json", files("lb.sg", LONG_BARBELL))
        rec = json.loads(out)
        assert code == 0 and rec["bound"] == "34/3" and rec["achieved"] == 8
        assert {"m", "n", "eps_N", "x_size", "strategy", "elements", "widths"} <= set(rec)

    def test_stdin(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(LONG_BARBELL))
        code, out, _ = run(capsys, "cover", "-")
        assert code == 0 and "achieved 8" in out

    def test_several_files_with_jobs(self, capsys, files):
        a = files("a.sg", LONG_BARBELL)
        b = files("b.sg", format_graph(petersen()))
        code1, out1, _ = run(capsys, "cover", "--format", "json", a, b)
        code2, out2, _ = run(capsys, "cover", "--format", "json", "--jobs", "2", a, b)
        assert code1 == code2 == 0 and out1 == out2 and len(out1.splitlines()) == 2

    def test_strategy_from_environment(self, capsys, files, monkeypatch):
        monkeypatch.setenv("SIGCOVER_STRATEGY", "alt2")
        code, out, _ = run(capsys, "cover", files("lb.sg", LONG_BARBELL))
        assert code == 0 and "strategy alt2" in out and "bound 12" in out.splitlines()

    def test_deterministic(self, capsys, files):
        path = files("p.sg", format_graph(petersen()))
        assert run(capsys, "cover", path) == run(capsys, "cover", path)


class TestVerify:
    def test_round_trip(self, capsys, files):
        g = files("lb.sg", LONG_BARBELL)
        _, out, _ = run(capsys, "cover", g)
        code, vout, _ = run(capsys, "verify", g, files("lb.cover", out), "--loops-twice", "--max-width", "2")
        assert code == 0 and "valid yes" in vout

    def test_json_round_trip(self, capsys, files):
        g = files("p.sg", format_graph(petersen()))
        _, out, _ = run(capsys, "cover", "--format", "json", g)
        code, _, _ = run(capsys, "verify", g, files("p.json", out))
        assert code == 0

    def test_tampered_cover(self, capsys, files):
        g = files("lb.sg", LONG_BARBELL)
        code, out, _ = run(capsys, "verify", g, files("c", "0 1 2\n"))
        assert code == 3 and "violation" in out

    def test_bound_breach(self, capsys, files):
        g = files("lb.sg", LONG_BARBELL)
        code, out, _ = run(capsys, "verify", g, files("c", "0 1 2 3\n0 1 2 3\n"), "--bound", "20/3")
        assert code == 3 and "bound breach" in out

    def test_malformed_cover(self, capsys, files):
        code, _, err = run(capsys, "verify", files("lb.sg", LONG_BARBELL), files("c", "0 x\n"))
        assert code == 1 and "cover file error" in err

    def test_parse_cover_file_forms(self):
        assert parse_cover_file("element long_barbell 0 1\nwidth 0 2\n")[0] == [[0, 1]]
        assert parse_cover_file('{"elements": [{"edges": [3, 4]}]}')[0] == [[3, 4]]
        assert parse_cover_file("# c\n5 6 7\n")[0] == [[5, 6, 7]]


class TestSmallCommands:
    def test_minimize(self, capsys, files):
        code, out, _ = run(capsys, "minimize-signature", files("t.sg", "3 3\n0 1 -\n1 2 -\n0 2 +\n"))
        assert code == 0 and "eps_N 0" in out
        assert parse_graph(out).negative_count() == 0

    def test_check_admissible(self, capsys, files):
        assert run(capsys, "check-admissible", files("a.sg", LONG_BARBELL))[0] == 0
        code, out, _ = run(capsys, "check-admissible", files("b.sg", "1 1\n0 0 -\n"))
        assert code == 2 and "edge 0" in out

    def test_bounds_petersen(self, capsys, files):
        code, out, _ = run(capsys, "bounds", "--format", "json", files("p.sg", format_graph(petersen())))
        rec = json.loads(out)
        assert code == 0 and rec["components"][0]["eps_N"] == 3 and rec["total"]["main"] == "50"

    def test_bounds_balanced(self, capsys, files):
        code, out, _ = run(capsys, "bounds", files("b.sg", "3 3\n0 1 +\n1 2 +\n2 0 +\n"))
        row = out.splitlines()[1].split()
        assert code == 0 and row[3] == "0" and row[4] == "11"

    def test_bounds_disconnected(self, capsys, files):
        text = "6 8\n0 0 -\n0 1 +\n1 2 +\n2 2 -\n3 3 -\n3 4 +\n4 5 +\n5 5 -\n"
        code, out, _ = run(capsys, "bounds", "--format", "json", files("d.sg", text))
        rec = json.loads(out)
        assert code == 0 and len(rec["components"]) == 2 and rec["total"]["main"] == "68/3"

    def test_oracle(self, capsys, files):
        code, out, _ = run(capsys, "oracle", files("lb.sg", LONG_BARBELL))
        assert code == 0 and "optimum 4" in out
        assert run(capsys, "oracle", "--oracle-limit", "2", files("lb2.sg", LONG_BARBELL))[0] == 3
        assert run(capsys, "oracle", files("x.sg", "1 1\n0 0 -\n"))[0] == 2


class TestGen:
    def test_seed_is_reproducible(self, capsys):
        a = run(capsys, "gen", "--seed", "1", "--n", "6", "--m", "9")
        b = run(capsys, "gen", "--seed", "1", "--n", "6", "--m", "9")
        assert a == b and a[0] == 0
        g = parse_graph(a[1])
        assert (g.n, g.m) == (6, 9)

    def test_euler_tree_model(self, capsys):
        for seed in range(10):
            code, out, _ = run(capsys, "gen", "--model", "euler-tree", "--seed", str(seed), "--m", "12")
            assert code == 0
            build_euler_tree(parse_graph(out))

    def test_too_few_edges(self, capsys):
        code, _, err = run(capsys, "gen", "--n", "6", "--m", "3")
        assert code == 1 and "cannot generate" in err
