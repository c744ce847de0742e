"""Experiment configuration, strategy registry, and the repetition runner."""

from __future__ import annotations

import csv
import io
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ._bits import bits
from .baselines import GreedyBreaker, GreedyMaker, RandomBreaker, RandomMaker
from .beck import BeckBreaker
from .core import Board, Family, Variant, complete_graph_board
from .engine import MatchTrace, play_multistage
from .errors import FamilyTooLarge, InvalidArgument
from .families import (
    coloring_family,
    connectivity_family,
    copies_family,
    h_game_family,
    hamilton_families,
    hamilton_family,
    non_colorability_family,
    pancyclicity_families,
    pancyclicity_family,
)
from .forests import ForestBreaker
from .graphs import SimpleGraph
from .hgame import HGameBreaker
from .lehman import LehmanMaker
from .potential import (
    PotentialConfig,
    PotentialMaker,
    biased_discrepancy_config,
    multistage_discrepancy_controller,
)

GAMES = ("connectivity", "hamilton", "coloring", "hgame", "pancyclicity", "custom")
MAKERS = ("random", "greedy", "potential", "discrepancy", "lehman")
BREAKERS = ("random", "greedy", "beck", "forest", "hgame")

NAMED_GRAPHS = {
    "K3": SimpleGraph.complete(3),
    "K4": SimpleGraph.complete(4),
    "C4": SimpleGraph.cycle(4),
    "C5": SimpleGraph.cycle(5),
    "P3": SimpleGraph.path(3),
    "K4-e": SimpleGraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
}


def load_graph(spec: str) -> SimpleGraph:
    """A named graph (K3, K4, C4, ...) or a path to graph JSON."""
    if spec in NAMED_GRAPHS:
        return NAMED_GRAPHS[spec]
    path = Path(spec)
    if not path.exists():
        raise InvalidArgument(f"graph_h: {spec!r} is neither a known name nor a file")
    return SimpleGraph.from_json(json.loads(path.read_text()))


# -- family JSON -----------------------------------------------------------------


def family_to_json(family: Family, board: Board) -> dict:
    return {
        "version": 1,
        "n": board.n if board.is_graph else None,
        "size": board.size,
        "groups": [{"name": name, "sets": [list(bits(m)) for m in g]}
                   for name, g in zip(family.names, family.groups)],
        "meta": {k: v for k, v in family.meta.items() if _jsonable(v)},
    }


def family_from_json(d: dict) -> tuple[Board, Family]:
    try:
        n = d.get("n")
        board = complete_graph_board(n) if n else Board.abstract(int(d["size"]))
        fam = Family.from_sets([g["sets"] for g in d["groups"]], [g["name"] for g in d["groups"]],
                               **d.get("meta", {}))
    except (KeyError, TypeError) as exc:
        raise InvalidArgument(f"family: malformed family JSON ({exc})") from None
    fam.validate_on(board)
    return board, fam


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False


# -- configuration ---------------------------------------------------------------


@dataclass
class ExperimentConfig:
    game: str = "connectivity"
    n: int = 8
    b: int = 1
    k: int | None = None
    graph_h: str | None = None
    family_file: str | None = None
    maker: str = "random"
    breaker: str = "random"
    variant: str = "standard"
    seed: int = 0
    reps: int = 1
    cap: int = 2_000_000
    max_stages: int = 64
    continue_when_empty: bool = False
    eps: float = 0.5
    gamma: float = 0.5
    delta: float | None = None
    alpha: float | None = None
    mu: float | None = None
    workers: int = 1

    def validate(self) -> None:
        def bad(name, msg):
            raise InvalidArgument(f"config.{name}: {msg}")

        if self.game not in GAMES:
            bad("game", f"unknown game {self.game!r}; choose from {', '.join(GAMES)}")
        if self.maker not in MAKERS:
            bad("maker", f"unknown maker {self.maker!r}; choose from {', '.join(MAKERS)}")
        if self.breaker not in BREAKERS:
            bad("breaker", f"unknown breaker {self.breaker!r}; choose from {', '.join(BREAKERS)}")
        if self.variant not in ("standard", "stop"):
            bad("variant", "must be 'standard' or 'stop'")
        if self.game != "custom" and self.n < 2:
            bad("n", "must be at least 2")
        if self.b < 1:
            bad("b", "must be a positive integer")
        if self.reps < 1:
            bad("reps", "must be positive")
        if self.max_stages < 1:
            bad("max_stages", "must be positive")
        if not 0 <= self.seed < 2 ** 64:
            bad("seed", "must be a 64-bit unsigned integer")
        if self.game == "coloring" and (self.k is None or self.k < 2):
            bad("k", "coloring needs k >= 2")
        if self.game == "hgame" and not self.graph_h:
            bad("graph_h", "hgame needs a graph H")
        if self.game == "custom" and not self.family_file:
            bad("family_file", "custom games need a family file")
        if self.maker == "lehman" and (self.b != 1 or self.game == "custom"):
            bad("maker", "lehman needs b = 1 on a K_n board")
        if self.breaker in ("forest", "hgame") and self.game == "custom":
            bad("breaker", f"{self.breaker} needs a K_n board")
        if self.breaker == "hgame" and not self.graph_h:
            bad("graph_h", "the hgame breaker needs a graph H")
        if self.maker == "potential" and (self.alpha is None or self.mu is None) and self.delta is None:
            bad("maker", "potential needs alpha and mu, or delta")
        if self.maker == "discrepancy" and self.game not in ("coloring", "hamilton", "pancyclicity"):
            bad("maker", "discrepancy is defined for coloring, hamilton and pancyclicity")
        if self.workers < 1:
            bad("workers", "must be positive")


def game_seeds(master: int, reps: int) -> list[int]:
    """Independent 64-bit per-game seeds derived from the master seed."""
    children = np.random.SeedSequence(master).spawn(reps)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def build_game(cfg: ExperimentConfig):
    """Board and game family for a configuration."""
    if cfg.game == "custom":
        return family_from_json(json.loads(Path(cfg.family_file).read_text()))
    board = complete_graph_board(cfg.n)
    if cfg.game == "connectivity":
        return board, connectivity_family(cfg.n)
    if cfg.game == "hamilton":
        return board, hamilton_family(cfg.n)
    if cfg.game == "coloring":
        return board, non_colorability_family(cfg.n, cfg.k)
    if cfg.game == "pancyclicity":
        return board, pancyclicity_family(cfg.n)
    h = load_graph(cfg.graph_h)
    try:
        return board, copies_family(h, cfg.n, cfg.cap)
    except FamilyTooLarge:
        return board, h_game_family(cfg.n, h)


def _aux_family(cfg: ExperimentConfig):
    if cfg.game == "coloring":
        return coloring_family(cfg.n, cfg.k, cfg.cap)
    if cfg.game == "hamilton":
        return hamilton_families(cfg.n, cfg.eps, cfg.cap)
    return pancyclicity_families(cfg.n, cap=cfg.cap)


def build_maker(cfg: ExperimentConfig, seed: int):
    if cfg.maker == "random":
        return RandomMaker(seed)
    if cfg.maker == "greedy":
        return GreedyMaker()
    if cfg.maker == "lehman":
        return LehmanMaker()
    if cfg.maker == "potential":
        if cfg.delta is not None:
            conf = biased_discrepancy_config(cfg.delta, cfg.b)
        else:
            conf = PotentialConfig(cfg.alpha, cfg.mu, cfg.b)
        return PotentialMaker(conf)
    return multistage_discrepancy_controller(_aux_family(cfg), cfg.gamma, cfg.b, cfg.delta)


def build_breaker(cfg: ExperimentConfig, seed: int):
    if cfg.breaker == "random":
        return RandomBreaker(seed)
    if cfg.breaker == "greedy":
        return GreedyBreaker()
    if cfg.breaker == "beck":
        return BeckBreaker(rng=random.Random(seed))
    if cfg.breaker == "forest":
        return ForestBreaker()
    return HGameBreaker(cfg.n, load_graph(cfg.graph_h), cfg.b, cfg.eps, cap=cfg.cap)


def run_one(cfg: ExperimentConfig, index: int, seed: int) -> MatchTrace:
    board, family = build_game(cfg)
    maker = build_maker(cfg, seed)
    breaker = build_breaker(cfg, seed ^ 0x9E3779B97F4A7C15)
    echo = {k: v for k, v in asdict(cfg).items() if k not in ("reps", "workers")}
    echo.update(game_index=index, game_seed=seed)
    return play_multistage(board, family, cfg.b, maker, breaker, Variant(cfg.variant), cfg.max_stages,
                           cfg.continue_when_empty, echo)


def _run_star(args):
    return run_one(*args)


SUMMARY_FIELDS = ["game_index", "game", "n", "b", "maker", "breaker", "variant", "game_seed",
                  "tau_observed", "stages", "stage_lengths", "truncated", "forfeit"]


def summary_row(trace: MatchTrace) -> dict:
    c = trace.config
    return {
        "game_index": c["game_index"], "game": c["game"], "n": c["n"], "b": c["b"],
        "maker": c["maker"], "breaker": c["breaker"], "variant": trace.variant.value,
        "game_seed": c["game_seed"], "tau_observed": trace.tau_observed,
        "stages": len(trace.stages),
        "stage_lengths": " ".join(str(len(s.moves)) for s in trace.stages),
        "truncated": int(trace.truncated),
        "forfeit": trace.forfeit["player"] if trace.forfeit else "",
    }


def run(cfg: ExperimentConfig, out: str | Path | None = None) -> list[MatchTrace]:
    """Play ``cfg.reps`` games; write one JSON trace per game and a CSV
    summary under ``out``. Results are ordered by game index."""
    cfg.validate()
    seeds = game_seeds(cfg.seed, cfg.reps)
    jobs = [(cfg, i, s) for i, s in enumerate(seeds)]
    if cfg.workers > 1 and cfg.reps > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            traces = list(pool.map(_run_star, jobs))
    else:
        traces = [run_one(*j) for j in jobs]
    if out is not None:
        write_outputs(traces, Path(out))
    return traces


def summary_csv(traces: list[MatchTrace]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    for t in traces:
        w.writerow(summary_row(t))
    return buf.getvalue()


def write_outputs(traces: list[MatchTrace], out: Path) -> None:
    tdir = out / "traces"
    tdir.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(traces))))
    for t in traces:
        (tdir / f"game_{t.config['game_index']:0{width}d}.json").write_text(t.dumps() + "\n")
    (out / "summary.csv").write_text(summary_csv(traces))


def config_from_trace(trace: MatchTrace) -> ExperimentConfig:
    fields = {k: v for k, v in trace.config.items() if k in ExperimentConfig.__dataclass_fields__}
    return ExperimentConfig(**fields)


def stage_bound_summary(traces: list[MatchTrace]) -> dict:
    taus = [t.tau_observed for t in traces]
    return {"games": len(taus), "tau_min": min(taus), "tau_max": max(taus),
            "tau_mean": float(np.mean(taus)) if taus else math.nan}
