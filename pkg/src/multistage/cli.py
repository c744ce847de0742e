"""Command-line front end.

Exit codes: 0 ok, 2 configuration error, 3 cap or size limit exceeded,
4 invariant violation (including a trace that fails replay).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import Variant, complete_graph_board
from .engine import MatchTrace, replay_trace
from .errors import FamilyTooLarge, InvalidArgument, InvalidState, InvariantViolation, SizeLimitExceeded
from .experiments import (
    BREAKERS,
    GAMES,
    MAKERS,
    ExperimentConfig,
    build_game,
    config_from_trace,
    family_from_json,
    family_to_json,
    load_graph,
    run,
    stage_bound_summary,
)
from .families import (
    coloring_family,
    copies_family,
    hamilton_cycle_family,
    hamilton_families,
    pancyclicity_families,
    spanning_tree_family,
)
from .graphs import (
    SimpleGraph,
    check_hamilton_conditions,
    check_pancyclicity_conditions,
    choose_k,
    chromatic_number_at_most,
    is_connected,
    is_hamiltonian,
    is_pancyclic,
    max_2_density,
    max_density,
)
from .solver import solve_single_stage, solve_tau_exact

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_INVARIANT = 0, 2, 3, 4


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", choices=GAMES, default="connectivity")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--graph-h", dest="graph_h", help="graph name (K3, K4, C4, ...) or graph JSON file")
    p.add_argument("--family", dest="family_file", help="family JSON file for --game custom")
    p.add_argument("--variant", choices=("standard", "stop"), default="standard")
    p.add_argument("--cap", type=int, default=2_000_000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multistage", description="Multistage Maker-Breaker games.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("simulate", help="play repeated multistage games")
    _common(p)
    p.add_argument("--maker", choices=MAKERS, default="random")
    p.add_argument("--breaker", choices=BREAKERS, default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", help="output directory for traces and summary.csv")
    p.add_argument("--max-stages", dest="max_stages", type=int, default=64)
    p.add_argument("--continue-when-empty", dest="continue_when_empty", action="store_true")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--delta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("solve", help="exact values on tiny boards")
    _common(p)
    p.add_argument("--single-stage", action="store_true", help="report the single-stage winner")
    p.add_argument("--limit", type=int, default=None)

    p = sub.add_parser("families", help="emit a winning or auxiliary family as JSON")
    p.add_argument("--kind", choices=("coloring", "hamilton", "pancyclicity", "trees", "cycles", "copies"),
                   required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--c", type=float, default=700.0)
    p.add_argument("--graph-h", dest="graph_h")
    p.add_argument("--cap", type=int, default=2_000_000)
    p.add_argument("--counts-only", action="store_true")

    p = sub.add_parser("density", help="m(H), m2(H) and the chosen K")
    p.add_argument("--graph-h", dest="graph_h", required=True)

    p = sub.add_parser("verify", help="check a graph property or a sufficient condition")
    p.add_argument("--graph", required=True, help="graph JSON file or name")
    p.add_argument("--check", required=True,
                   choices=("connected", "hamiltonian", "pancyclic", "colorable", "hamilton-conditions",
                            "pancyclicity-conditions"))
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--exp-factor", dest="exp_factor", type=float)
    p.add_argument("--cut-size", dest="cut_size", type=int)
    p.add_argument("--c", type=float, default=600.0)

    p = sub.add_parser("replay", help="re-validate a trace through the core rules")
    p.add_argument("trace")
    return ap


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


def cmd_simulate(a) -> int:
    keys = ExperimentConfig.__dataclass_fields__
    cfg = ExperimentConfig(**{k: v for k, v in vars(a).items() if k in keys})
    traces = run(cfg, a.out)
    _emit(stage_bound_summary(traces))
    return EXIT_OK


def _explicit_game(a):
    if a.game == "custom":
        return family_from_json(json.loads(Path(a.family_file).read_text()))
    board = complete_graph_board(a.n)
    if a.game == "connectivity":
        return board, spanning_tree_family(a.n, a.cap)
    if a.game == "hamilton":
        return board, hamilton_cycle_family(a.n, a.cap)
    if a.game == "hgame":
        if not a.graph_h:
            raise InvalidArgument("config.graph_h: hgame needs a graph H")
        return board, copies_family(load_graph(a.graph_h), a.n, a.cap)
    raise InvalidArgument(f"config.game: {a.game} has no explicit family for the solver")


def cmd_solve(a) -> int:
    board, fam = _explicit_game(a)
    if a.single_stage:
        winner = solve_single_stage(board, fam, a.b, limit=a.limit or 24)
        _emit({"winner": winner.value, "board_size": board.size, "sets": len(fam)})
    else:
        tau = solve_tau_exact(board, fam, a.b, Variant(a.variant), limit=a.limit or 12)
        _emit({"tau": tau, "variant": a.variant, "board_size": board.size, "sets": len(fam)})
    return EXIT_OK


def cmd_families(a) -> int:
    board = complete_graph_board(a.n)
    if a.kind == "coloring":
        if a.k is None:
            raise InvalidArgument("config.k: coloring needs k")
        fam = coloring_family(a.n, a.k, a.cap)
    elif a.kind == "hamilton":
        fam = hamilton_families(a.n, a.eps, a.cap)
    elif a.kind == "pancyclicity":
        fam = pancyclicity_families(a.n, a.c, a.cap)
    elif a.kind == "trees":
        fam = spanning_tree_family(a.n, a.cap)
    elif a.kind == "cycles":
        fam = hamilton_cycle_family(a.n, a.cap)
    else:
        if not a.graph_h:
            raise InvalidArgument("config.graph_h: copies needs a graph H")
        fam = copies_family(load_graph(a.graph_h), a.n, a.cap)
    if a.counts_only:
        _emit({"n": a.n, "groups": [{"name": nm, "count": len(g)} for nm, g in zip(fam.names, fam.groups)]})
    else:
        print(json.dumps(family_to_json(fam, board), sort_keys=True))
    return EXIT_OK


def cmd_density(a) -> int:
    h = load_graph(a.graph_h)
    k = choose_k(h)
    _emit({"m": str(max_density(h)), "m2": str(max_2_density(h)), "K": k.to_json()})
    return EXIT_OK


def cmd_verify(a) -> int:
    g = load_graph(a.graph) if not Path(a.graph).exists() else SimpleGraph.from_json(
        json.loads(Path(a.graph).read_text()))
    if a.check == "hamilton-conditions":
        rep = check_hamilton_conditions(g, exp_factor=a.exp_factor, cut_size=a.cut_size)
        out = {"pass": rep.ok, "p1": rep.p1, "p2": rep.p2, "witness_p1": rep.witness_p1,
               "witness_p2": rep.witness_p2, "params": rep.params}
    elif a.check == "pancyclicity-conditions":
        rep = check_pancyclicity_conditions(g, c=a.c)
        out = {"pass": rep.ok, "p1": rep.p1, "p2": rep.p2, "witness_p1": rep.witness_p1,
               "witness_p2": rep.witness_p2, "params": rep.params}
    else:
        fn = {"connected": is_connected, "hamiltonian": is_hamiltonian, "pancyclic": is_pancyclic,
              "colorable": lambda x: chromatic_number_at_most(x, a.k)}[a.check]
        out = {"pass": bool(fn(g))}
    _emit(out)
    return EXIT_OK


def cmd_replay(a) -> int:
    trace = MatchTrace.from_json(json.loads(Path(a.trace).read_text()))
    board, fam = build_game(config_from_trace(trace))
    reds = replay_trace(trace, board, fam)
    _emit({"ok": True, "stages": len(reds), "tau_observed": trace.tau_observed})
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "solve": cmd_solve, "families": cmd_families,
            "density": cmd_density, "verify": cmd_verify, "replay": cmd_replay}


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return COMMANDS[a.cmd](a)
    except (FamilyTooLarge, SizeLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InvariantViolation, InvalidState) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InvalidArgument, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
