import csv
import io
import json

import pytest

from multistage.cli import main
from multistage.core import complete_graph_board
from multistage.engine import MatchTrace, replay_trace
from multistage.errors import InvalidArgument
from multistage.experiments import (
    ExperimentConfig,
    build_game,
    config_from_trace,
    family_from_json,
    family_to_json,
    game_seeds,
    run,
    summary_csv,
)
from multistage.families import coloring_family, copies_family
from multistage.graphs import SimpleGraph, chromatic_number_at_most


@pytest.mark.parametrize("field,kwargs", [
    ("game", {"game": "chess"}),
    ("maker", {"maker": "oracle"}),
    ("breaker", {"breaker": "oracle"}),
    ("variant", {"variant": "fast"}),
    ("n", {"n": 1}),
    ("b", {"b": 0}),
    ("reps", {"reps": 0}),
    ("seed", {"seed": -1}),
    ("k", {"game": "coloring"}),
    ("graph_h", {"game": "hgame"}),
    ("maker", {"maker": "lehman", "b": 2}),
    ("maker", {"maker": "potential"}),
    ("maker", {"maker": "discrepancy"}),
])
def test_config_errors_name_the_field(field, kwargs):
    with pytest.raises(InvalidArgument, match=rf"config\.{field}"):
        ExperimentConfig(**kwargs).validate()


def test_game_seeds_deterministic_and_distinct():
    a = game_seeds(7, 20)
    assert a == game_seeds(7, 20)
    assert len(set(a)) == 20
    assert game_seeds(8, 20) != a
    assert game_seeds(7, 25)[:20] == a


def test_runs_are_byte_identical(tmp_path):
    cfg = ExperimentConfig(game="hgame", graph_h="K3", n=6, maker="random", breaker="beck", reps=4, seed=3)
    first = [t.dumps() for t in run(cfg, tmp_path / "a")]
    second = [t.dumps() for t in run(cfg, tmp_path / "b")]
    assert first == second
    for name in ("summary.csv", "traces/game_0000.json", "traces/game_0003.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_summary_csv_columns():
    traces = run(ExperimentConfig(n=6, reps=3, seed=1))
    rows = list(csv.DictReader(io.StringIO(summary_csv(traces))))
    assert [r["game_index"] for r in rows] == ["0", "1", "2"]
    assert all(int(r["tau_observed"]) == t.tau_observed for r, t in zip(rows, traces))


def test_traces_replay_through_config_echo():
    for cfg in (ExperimentConfig(game="connectivity", n=7, maker="greedy", breaker="greedy"),
                ExperimentConfig(game="coloring", n=8, k=2, maker="random", breaker="forest", seed=2),
                ExperimentConfig(game="hgame", graph_h="K3", n=6, maker="greedy", breaker="random",
                                 variant="stop")):
        trace = run(cfg)[0]
        again = MatchTrace.from_json(json.loads(trace.dumps()))
        board, fam = build_game(config_from_trace(again))
        assert len(replay_trace(again, board, fam)) == len(trace.stages)


def test_lehman_connectivity_n8():
    traces = run(ExperimentConfig(game="connectivity", n=8, maker="lehman", breaker="random", reps=100, seed=0))
    assert min(t.tau_observed for t in traces) >= 2


def test_forest_breaker_coloring_n8_bipartite():
    traces = run(ExperimentConfig(game="coloring", n=8, k=2, maker="random", breaker="forest", reps=10))
    for t in traces:
        # ceil(log2 8) + 1 = 4 stages suffice for the board to be a forest.
        board = complete_graph_board(8)
        mask = board.mask
        for stage in t.stages[:4]:
            mask = stage.maker_mask
        g = SimpleGraph.from_edges(8, [board.labels[e] for e in range(board.size) if (mask >> e) & 1])
        assert chromatic_number_at_most(g, 2)


def test_family_json_round_trip():
    board = complete_graph_board(5)
    fam = copies_family(SimpleGraph.complete(3), 5)
    b2, f2 = family_from_json(json.loads(json.dumps(family_to_json(fam, board))))
    assert b2.size == board.size and sorted(f2.masks()) == sorted(fam.masks())
    with pytest.raises(InvalidArgument):
        family_from_json({"size": 3})


# -- command line ---------------------------------------------------------------


def _run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_simulate_and_replay(capsys, tmp_path):
    code, out, _ = _run_cli(capsys, "simulate", "--game", "connectivity", "--n", "6", "--maker", "lehman",
                            "--breaker", "greedy", "--reps", "2", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["tau_min"] >= 1
    assert (tmp_path / "summary.csv").exists()
    code, out, _ = _run_cli(capsys, "replay", str(tmp_path / "traces" / "game_0000.json"))
    assert code == 0 and json.loads(out)["ok"]


def test_cli_replay_rejects_tampered_trace(capsys, tmp_path):
    _run_cli(capsys, "simulate", "--n", "6", "--out", str(tmp_path))
    path = tmp_path / "traces" / "game_0000.json"
    data = json.loads(path.read_text())
    data["tau_observed"] += 1
    path.write_text(json.dumps(data))
    code, _, err = _run_cli(capsys, "replay", str(path))
    assert code == 4 and "invariant" in err


def test_cli_exit_codes(capsys, tmp_path):
    assert _run_cli(capsys, "simulate", "--b", "0")[0] == 2
    assert _run_cli(capsys, "replay", str(tmp_path / "missing.json"))[0] == 2
    assert _run_cli(capsys, "families", "--kind", "trees", "--n", "9", "--cap", "10")[0] == 3
    assert _run_cli(capsys, "solve", "--game", "connectivity", "--n", "7")[0] == 3


def test_cli_density(capsys):
    code, out, _ = _run_cli(capsys, "density", "--graph-h", "K4")
    data = json.loads(out)
    assert code == 0 and data["m2"] == "5/2" and data["m"] == "3/2"
    assert json.loads(_run_cli(capsys, "density", "--graph-h", "K3")[1])["m2"] == "2"


def test_cli_families_counts(capsys):
    code, out, _ = _run_cli(capsys, "families", "--kind", "coloring", "--n", "8", "--k", "2", "--counts-only")
    assert code == 0
    assert sum(g["count"] for g in json.loads(out)["groups"]) == len(coloring_family(8, 2))
    code, out, _ = _run_cli(capsys, "families", "--kind", "copies", "--graph-h", "K3", "--n", "5")
    assert len(json.loads(out)["groups"][0]["sets"]) == 10


def test_cli_solve(capsys):
    code, out, _ = _run_cli(capsys, "solve", "--game", "hgame", "--graph-h", "K3", "--n", "5", "--single-stage")
    assert code == 0 and json.loads(out)["winner"] == "maker"
    code, out, _ = _run_cli(capsys, "solve", "--game", "connectivity", "--n", "4")
    assert json.loads(out)["tau"] == 1


def test_cli_verify(capsys, tmp_path):
    code, out, _ = _run_cli(capsys, "verify", "--graph", "K4", "--check", "hamiltonian")
    assert code == 0 and json.loads(out)["pass"]
    path = tmp_path / "c5.json"
    path.write_text(json.dumps(SimpleGraph.cycle(5).to_json()))
    assert not json.loads(_run_cli(capsys, "verify", "--graph", str(path), "--check", "colorable")[1])["pass"]
    assert json.loads(_run_cli(capsys, "verify", "--graph", str(path), "--check", "colorable",
                               "--k", "3")[1])["pass"]
