import json

import pytest

from bao.cli import EXIT_BUDGET, EXIT_FAILED, EXIT_INVALID, EXIT_OK, bundled_configs, load_config, main, run
from bao.graphs import petersen_graph
from bao.relalg import basic_matrices, maddux, matrix_rows


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bundled_configs_present():
    assert {"rainbow-n3", "cartesian-sanity"} <= set(bundled_configs())
    assert load_config("cartesian-sanity")["name"] == "cartesian-sanity"


def test_empty_pipeline(tmp_path, capsys):
    cfg = tmp_path / "empty.json"
    cfg.write_text("{}")
    code, out, _ = call(capsys, "run", "--config", str(cfg), "--json")
    assert code == EXIT_OK
    report = json.loads(out[out.index("{"):])
    assert report["verdicts"] == {"budget_exhausted": False, "checks": [], "games": [], "required_failed": []}


def test_cartesian_sanity_passes(tmp_path, capsys):
    out_file = tmp_path / "report.json"
    code, out, _ = call(capsys, "run", "--config", "cartesian-sanity", "--out", str(out_file))
    assert code == EXIT_OK
    assert "check ca_axioms: pass" in out
    report = json.loads(out_file.read_text())
    assert len(report["verdicts"]["games"]) == 8
    assert all(g["winner"] == "Exists" for g in report["verdicts"]["games"])


def test_required_failure_and_budget_exit_codes(tmp_path):
    base = {"name": "t", "generator": {"kind": "rainbow", "params": {"greens": 2, "reds": 1, "n": 3}}}
    failing = dict(base, games=[{"nodes": 4, "rounds": 2, "expect": "Exists"}])
    assert run(failing).exit_code == EXIT_FAILED
    optional = dict(base, games=[{"nodes": 4, "rounds": 2, "expect": "Exists", "required": False}])
    assert run(optional).exit_code == EXIT_OK
    starved = dict(base, games=[{"nodes": 4, "rounds": 3, "reuse": True, "budget": 3}])
    rep = run(starved)
    assert rep.exit_code == EXIT_BUDGET and rep.budget_exhausted
    assert rep.games[0]["winner"] == "UndeterminedAtBound"


def test_invalid_configs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    for body in ('{"bogus": 1}', '{"games": [{"nodes": 3, "rounds": 1}]}', "[1]", "{not json",
                 '{"generator": {"kind": "cartesian"}, "checks": [{"check": "ca_axioms", "samples": 10}]}'):
        bad.write_text(body)
        code, _, err = call(capsys, "run", "--config", str(bad))
        assert code == EXIT_INVALID, body
        assert "invalid input" in err
    code, _, _ = call(capsys, "run", "--config", "no-such-config")
    assert code == EXIT_INVALID
    with pytest.raises(SystemExit) as exc:
        main(["game", "solve"])
    assert exc.value.code == EXIT_INVALID


def test_ra_commands(tmp_path, capsys):
    ra_file = tmp_path / "m3.json"
    assert call(capsys, "ra", "maddux", "--k", "3", "--out", str(ra_file))[0] == EXIT_OK
    code, out, _ = call(capsys, "ra", "redgreen", "--greens", "2", "--reds", "1")
    assert code == EXIT_OK and "g0^1" in out
    mat_file = tmp_path / "mat.json"
    assert call(capsys, "ra", "matn", "--at", str(ra_file), "--n", "3", "--out", str(mat_file))[0] == EXIT_OK
    assert len(json.loads(mat_file.read_text())["atoms"]) == 34
    rows = [matrix_rows(f) for f in basic_matrices(maddux(3), 3)]
    mats_file = tmp_path / "rows.json"
    mats_file.write_text(json.dumps(rows))
    code, out, _ = call(capsys, "ra", "basis-check", "--matrices", str(mats_file), "--at", str(ra_file))
    assert code == EXIT_OK and json.loads(out)["ok"]
    mats_file.write_text(json.dumps(rows[1:]))
    code, out, _ = call(capsys, "ra", "basis-check", "--matrices", str(mats_file), "--at", str(ra_file))
    assert code == EXIT_FAILED and json.loads(out)["failure"] == "triangle"


def test_game_solve_with_trace(tmp_path, capsys):
    at_file = tmp_path / "at.json"
    call(capsys, "rainbow", "gen", "--greens", "2", "--reds", "1", "--n", "3", "--out", str(at_file))
    trace = tmp_path / "trace.json"
    code, out, _ = call(capsys, "game", "solve", "--at", str(at_file), "--nodes", "4", "--rounds", "3",
                        "--trace", str(trace))
    assert code == EXIT_OK
    assert json.loads(out)["winner"] == "Forall"
    steps = json.loads(trace.read_text())
    assert [s["round"] for s in steps] == [0, 1]
    assert {"forall", "exists"} <= set(steps[0])


def test_rainbow_ef(capsys):
    code, out, _ = call(capsys, "rainbow", "ef", "--pebbles", "4", "--rounds", "4", "--left", "4", "--right", "3")
    assert code == EXIT_OK and json.loads(out) == {"winner": "Forall", "rounds": 4}


def test_blur_and_split_commands(tmp_path, capsys):
    ra_file, j_file = tmp_path / "ra.json", tmp_path / "j.json"
    call(capsys, "ra", "maddux", "--k", "9", "--out", str(ra_file))
    j_file.write_text(json.dumps([["a1", "a2", "a3"], ["a4", "a5", "a6"], ["a7", "a8", "a9"]]))
    code, out, _ = call(capsys, "blur", "check", "--ra", str(ra_file), "--J", str(j_file), "--n", "3")
    assert code == EXIT_OK and json.loads(out)["ok"]
    code, _, _ = call(capsys, "blur", "check", "--ra", str(ra_file), "--J", str(j_file), "--n", "3", "--strong")
    assert code == EXIT_FAILED
    x, y = tmp_path / "x.json", tmp_path / "y.json"
    x.write_text(json.dumps({"id": False, "blocks": {"a1+a2+a3": {"finite": [[0, "a1"]]}}}))
    y.write_text(json.dumps({"id": False, "blocks": {"a4+a5+a6": {"finite": [[1, "a4"]]}}}))
    code, out, _ = call(capsys, "split", "compose", "--ra", str(ra_file), "--J", str(j_file),
                        "--x", str(x), "--y", str(y))
    assert code == EXIT_OK
    result = json.loads(out)
    assert result["id"] is False
    assert result["blocks"]["a1+a2+a3"] == {"cofinite_except": []}
    x.write_text(json.dumps({"blocks": {"nope": {"finite": []}}}))
    code, _, _ = call(capsys, "split", "compose", "--ra", str(ra_file), "--J", str(j_file),
                      "--x", str(x), "--y", str(y))
    assert code == EXIT_INVALID


def test_graph_commands(tmp_path, capsys):
    g = tmp_path / "g.json"
    g.write_text(json.dumps(petersen_graph().to_json()))
    assert json.loads(call(capsys, "graph", "chi", "--in", str(g))[1]) == {"chromatic_number": 3}
    assert json.loads(call(capsys, "graph", "girth", "--in", str(g))[1]) == {"girth": 5}
    g.write_text(json.dumps({"vertices": 3, "edges": []}))
    assert json.loads(call(capsys, "graph", "girth", "--in", str(g))[1]) == {"girth": "inf"}
    g.write_text(json.dumps({"vertices": 2, "edges": [[0, 0]]}))
    assert call(capsys, "graph", "chi", "--in", str(g))[0] == EXIT_INVALID
