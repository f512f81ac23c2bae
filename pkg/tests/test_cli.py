from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from minorverify.cli import main
from minorverify.corpus import CorpusItem, read_dot
from minorverify.graph_core import Graph
from minorverify.witness import MinorWitness, validate_witness


@pytest.fixture
def runner():
    return CliRunner()


def test_gen_writes_items(runner):
    res = runner.invoke(main, ["gen", "random_wing1", "--n-range", "3", "8", "--seed", "4", "--count", "5"])
    assert res.exit_code == 0
    items = [CorpusItem.from_json(x) for x in res.output.splitlines()]
    assert len(items) == 5 and all(it.wing().is_valid() for it in items)
    again = runner.invoke(main, ["gen", "random_wing1", "--n-range", "3", "8", "--seed", "4", "--count", "5"])
    assert again.output == res.output


def test_gen_needs_a_size(runner):
    assert runner.invoke(main, ["gen", "maximal_planar"]).exit_code != 0


def test_check_clean_and_dirty(runner, tmp_path):
    good = tmp_path / "good.jsonl"
    good.write_text(runner.invoke(main, ["gen", "random_wing1", "--n", "6", "--count", "4"]).output)
    res = runner.invoke(main, ["check", "min-degree", "--corpus", str(good), "--json"])
    assert res.exit_code == 0 and json.loads(res.output)["clean"]
    bad = tmp_path / "bad.jsonl"
    item = CorpusItem(Graph.path(4).add_edges([(0, 2), (1, 3)]), "file", {}, None, 0, {"order": [0, 1, 2, 3]})
    bad.write_text(item.dumps() + "\n")
    report = tmp_path / "report.jsonl"
    res = runner.invoke(main, ["check", "min-degree", "--corpus", str(bad), "--report", str(report), "--archive", str(tmp_path / "arch")])
    assert res.exit_code == 1 and "invalid=1" in res.output
    assert json.loads(report.read_text().splitlines()[0])["verdict"] == "invalid"
    assert (tmp_path / "arch" / "min-degree").is_dir()


def test_color_outer_two(runner, tmp_path):
    f = tmp_path / "c6.txt"
    f.write_text("0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3\n")
    res = runner.invoke(main, ["color", str(f), "--json"])
    assert res.exit_code == 0
    cols = json.loads(res.output)["coloring"]["colors"]
    assert len(set(cols.values())) <= 3


def test_color_with_system(runner, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2]]}))
    sys_file = tmp_path / "s.json"
    sys_file.write_text(json.dumps({"mode": "p3a2", "clusters": [[0], [1]], "relations": [[0, 1, "neq"]], "divisions": [[0], [1]]}))
    res = runner.invoke(main, ["color", str(g), "--system", str(sys_file), "--json"])
    assert res.exit_code == 0, res.output
    cols = json.loads(res.output)["coloring"]["colors"]
    assert cols["0"] != cols["1"]


def test_color_planar_boundary(runner, tmp_path):
    f = tmp_path / "k4.txt"
    f.write_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    res = runner.invoke(main, ["color", str(f), "--boundary", "0,1,2", "--json"])
    out = json.loads(res.output)
    assert out["format"] == 1 and (out["coloring"] is not None) == (res.exit_code == 0)


def test_color_rejects_non_outerplanar(runner, tmp_path):
    f = tmp_path / "k4.txt"
    f.write_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    res = runner.invoke(main, ["color", str(f)])
    assert res.exit_code != 0 and "not outerplanar" in res.output


def test_reduce_commands(runner, tmp_path):
    w5 = tmp_path / "w5.json"
    w5.write_text(Graph.wheel(5).dumps())
    res = runner.invoke(main, ["reduce", str(w5), "--dirac", "--json"])
    assert res.exit_code == 0
    w = MinorWitness.from_json(json.loads(res.output)["witness"])
    assert validate_witness(Graph.wheel(5), w, pattern=Graph.complete(4))
    res = runner.invoke(main, ["reduce", str(w5), "--json"])
    assert json.loads(res.output)["kind"] == "reduced"
    k6 = tmp_path / "k6.json"
    k6.write_text(Graph.complete(6).dumps())
    res = runner.invoke(main, ["reduce", str(k6), "--wheel", "0", "--json"])
    assert json.loads(res.output)["kind"] == "k5_minor"
    res = runner.invoke(main, ["reduce", str(w5), "--k", "3"])
    assert res.exit_code != 0


def test_draw(runner, tmp_path):
    f = tmp_path / "c5.txt"
    f.write_text("0 1\n1 2\n2 3\n3 4\n4 0\n")
    res = runner.invoke(main, ["draw", str(f)])
    assert res.exit_code == 0 and read_dot(res.output) == Graph.cycle(5)
    res = runner.invoke(main, ["draw", str(f), "--format", "svg-arc"])
    assert res.exit_code == 0 and res.output.count('class="arc"') == 5
    k4 = tmp_path / "k4.txt"
    k4.write_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    assert runner.invoke(main, ["draw", str(k4), "--format", "svg-arc"]).exit_code != 0


def test_load_rejects_bad_side_data(runner, tmp_path):
    item = CorpusItem(Graph.path(4).add_edges([(0, 2), (1, 3)]), "file", {}, None, 0, {"order": [0, 1, 2, 3]})
    f = tmp_path / "item.json"
    f.write_text(item.dumps())
    res = runner.invoke(main, ["draw", str(f)])
    assert res.exit_code != 0 and "side data rejected" in res.output
