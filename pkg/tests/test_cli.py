import json

import pytest

from conftest import complete
from twcount.cli import main
from twcount.instance import format_graph, format_td, make_nice, random_instance, single_bag_decomposition
from twcount.verify import check_counts, corrupt_node, per_node_steiner


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    k4 = complete(4)
    return {
        "tri.gr": write("tri.gr", "p tw 3 3\n1 2\n2 3\n1 3\n"),
        "tri.td": write("tri.td", "s td 1 3 3\nb 1 1 2 3\n"),
        "t.txt": write("t.txt", "# terminals\n1\n2\n"),
        "k4.gr": write("k4.gr", format_graph(k4)),
        "k4.td": write("k4.td", format_td(single_bag_decomposition(k4), 4)),
        "bad.td": write("bad.td", "s td 1 2 3\nb 1 1 2\n"),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_steiner(files, capsys):
    code, out, _ = run(capsys, "count", "steiner", "--graph", files["tri.gr"], "--td", files["tri.td"], "--terminals", files["t.txt"])
    assert code == 0 and out == "1 1\n2 3\n"
    code, out, _ = run(capsys, "count", "steiner", "--graph", files["tri.gr"], "--td", files["tri.td"], "--terminals", files["t.txt"], "--json", "--join", "naive")
    assert code == 0 and json.loads(out) == {"sizes": {"1": "1", "2": "3"}}


def test_count_hamiltonian(files, capsys):
    code, out, _ = run(capsys, "count", "hamiltonian", "--graph", files["k4.gr"], "--td", files["k4.td"])
    assert code == 0 and out == "3\n"
    code, out, _ = run(capsys, "count", "hamiltonian", "--graph", files["k4.gr"], "--td", files["k4.td"], "--mod", "7", "--json")
    assert code == 0 and json.loads(out) == {"count": "3"}


def test_input_errors(files, capsys):
    code, _, err = run(capsys, "count", "steiner", "--graph", files["tri.gr"], "--td", files["tri.td"])
    assert code == 2 and "terminals" in err
    code, _, err = run(capsys, "count", "steiner", "--graph", files["tri.gr"], "--td", files["bad.td"], "--terminals", files["t.txt"])
    assert code == 2 and "uncovered edge" in err
    code, _, err = run(capsys, "count", "hamiltonian", "--graph", str(files["dir"] / "missing.gr"), "--td", files["tri.td"])
    assert code == 2 and "cannot read" in err
    code, _, err = run(capsys, "count", "hamiltonian", "--graph", files["k4.gr"], "--td", files["k4.td"], "--mod", "2")
    assert code == 2 and "inverse" in err


def test_verify_commands(files, capsys):
    code, out, _ = run(capsys, "verify", "--problem", "hamiltonian", "--random", "8,3,42", "--trials", "20")
    assert code == 0 and out.strip().endswith("ok")
    code, out, _ = run(capsys, "verify", "--problem", "steiner", "--per-node", "--graph", files["tri.gr"], "--td", files["tri.td"], "--terminals", files["t.txt"])
    assert code == 0


def test_verify_reports_corrupted_node(files, capsys):
    code, out, _ = run(capsys, "verify", "--problem", "steiner", "--per-node", "--graph", files["k4.gr"], "--td", files["k4.td"], "--terminals", files["t.txt"], "--corrupt-node", "5")
    assert code == 1
    assert "node 5 (naive join)" in out and "node 5 (fast join)" in out


def test_verify_library_hook():
    g, td = random_instance(6, 2, 1)
    nd = make_nice(td, g)
    assert check_counts("steiner", g, nd, {1, 4}) == []
    assert check_counts("steiner", g, nd, {1, 4}, corrupt=corrupt_node()) != []
    found = per_node_steiner(g, {1, 4}, nd, modes=("fast",), corrupt=corrupt_node(3))
    assert [m.node for m in found] == [3] and "node 3" in found[0].describe()
    with pytest.raises(ValueError):
        check_counts("other", g, nd)


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "1")
    assert code == 0 and "FAIL" not in out and out.count("PASS") == 5


def test_bench_and_report(files, capsys):
    code, out, _ = run(capsys, "bench", "--bag", "1-2", "--problem", "hamiltonian", "--report", str(files["dir"] / "rep"))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "bag,naive_ns,fast_ns" and [ln.split(",")[0] for ln in lines[1:]] == ["1", "2"]
    assert (files["dir"] / "rep" / "hamiltonian_bench.csv").read_text() == out
    assert (files["dir"] / "rep" / "hamiltonian_bench.png").stat().st_size > 0
    code, out, _ = run(capsys, "bench", "--bag", "2", "--problem", "steiner")
    assert code == 0 and len(out.splitlines()) == 2


def test_bench_capacity_guard(capsys):
    code, _, err = run(capsys, "bench", "--bag", "99")
    assert code == 3 and "cap" in err
    code, _, _ = run(capsys, "bench", "--bag", "x")
    assert code == 2


def test_output_is_deterministic(files, capsys):
    argv = ("count", "steiner", "--graph", files["k4.gr"], "--td", files["k4.td"], "--terminals", files["t.txt"], "--json")
    first = run(capsys, *argv)
    assert run(capsys, *argv) == first
