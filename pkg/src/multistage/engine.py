"""Stage and multistage game orchestration, traces and replay."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .core import (
    Board,
    GameState,
    Move,
    Player,
    StageReduction,
    Variant,
    apply_move,
    reduce_stage,
)
from .errors import IllegalMove, InvalidArgument, InvalidState

TRACE_VERSION = 1


class Strategy:
    """Base class for game agents.

    The engine calls ``start_stage`` once per stage, ``choose`` whenever the
    agent is to move and ``observe`` after every applied move (its own moves
    included), then ``end_stage`` with the reduction. ``markov`` declares that
    ``choose`` depends only on the current position, which lets the exact
    adversary memoize positions.
    """

    role: Player = Player.MAKER
    name = "strategy"
    markov = False

    def start_stage(self, board: Board, family, bias: int, stage: int) -> None:
        pass

    def observe(self, move: Move, state: GameState) -> None:
        pass

    def choose(self, state: GameState) -> tuple[int, ...]:
        raise NotImplementedError

    def end_stage(self, reduction: StageReduction, state: GameState) -> None:
        pass


@dataclass
class StageTrace:
    stage: int
    board_size: int
    moves: list[Move] = field(default_factory=list)
    survivors: tuple[int, ...] = ()
    next_board_size: int = 0
    completed: bool = False
    forfeit: dict | None = None

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "board_size": self.board_size,
            "moves": [m.to_json() for m in self.moves],
            "survivors": list(self.survivors),
            "next_board_size": self.next_board_size,
            "completed": self.completed,
            "forfeit": self.forfeit,
        }

    @classmethod
    def from_json(cls, d: dict) -> "StageTrace":
        return cls(d["stage"], d["board_size"], [Move.from_json(m) for m in d["moves"]],
                   tuple(d["survivors"]), d["next_board_size"], d.get("completed", False),
                   d.get("forfeit"))

    @property
    def maker_elements(self) -> int:
        return sum(len(m.elements) for m in self.moves if m.player is Player.MAKER)

    @property
    def maker_mask(self) -> int:
        """Bitmask of the elements Maker claimed in this stage."""
        out = 0
        for m in self.moves:
            if m.player is Player.MAKER:
                for e in m.elements:
                    out |= 1 << e
        return out


@dataclass
class MatchTrace:
    config: dict
    variant: Variant
    stages: list[StageTrace] = field(default_factory=list)
    tau_observed: int = 0
    truncated: bool = False

    @property
    def forfeit(self) -> dict | None:
        return self.stages[-1].forfeit if self.stages else None

    def to_json(self) -> dict:
        return {
            "version": TRACE_VERSION,
            "config": self.config,
            "variant": self.variant.value,
            "stages": [s.to_json() for s in self.stages],
            "tau_observed": self.tau_observed,
            "truncated": self.truncated,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, d: dict) -> "MatchTrace":
        if d.get("version") != TRACE_VERSION:
            raise InvalidArgument(f"unsupported trace version {d.get('version')!r}")
        return cls(d["config"], Variant(d["variant"]),
                   [StageTrace.from_json(s) for s in d["stages"]],
                   d["tau_observed"], d.get("truncated", False))


def play_stage(board: Board, family, b: int, maker: Strategy, breaker: Strategy,
               variant: Variant | str = Variant.STANDARD, stage: int = 1):
    """Play one stage. Returns ``(StageTrace, StageReduction | None)``; the
    reduction is ``None`` when a strategy forfeited by moving illegally."""
    variant = Variant(variant)
    if board.size == 0:
        raise InvalidState("stage board has no free element")
    state = GameState(board, b, stage)
    trace = StageTrace(stage, board.size)
    agents = {Player.MAKER: maker, Player.BREAKER: breaker}
    for agent in agents.values():
        agent.start_stage(board, family, b, stage)
    while state.free_mask:
        player = state.to_move
        try:
            els = agents[player].choose(state)
            state = apply_move(state, player, els)
        except IllegalMove as exc:
            trace.forfeit = {"player": player.value, "reason": str(exc)}
            return trace, None
        move = state.history[-1]
        trace.moves.append(move)
        for agent in agents.values():
            agent.observe(move, state)
        if (variant is Variant.STOP and player is Player.MAKER
                and family.completed_by(board, state.maker_mask)):
            trace.completed = True
            break
    red = reduce_stage(state, family, variant)
    trace.survivors = red.survivors_per_group
    trace.next_board_size = red.next_board.size
    for agent in agents.values():
        agent.end_stage(red, state)
    return trace, red


def play_multistage(board: Board, family, b: int, maker: Strategy, breaker: Strategy,
                    variant: Variant | str = Variant.STANDARD, max_stages: int = 64,
                    continue_when_empty: bool = False, config: dict | None = None) -> MatchTrace:
    """Play stages on successive reductions until the family is empty (or,
    with ``continue_when_empty``, the board is) or ``max_stages`` is reached."""
    variant = Variant(variant)
    trace = MatchTrace(dict(config or {}), variant)
    trace.config.setdefault("b", b)
    if family.is_empty() and not continue_when_empty:
        return trace
    cur_board, cur_family = board, family
    for stage in range(1, max_stages + 1):
        if cur_board.size == 0:
            break
        st, red = play_stage(cur_board, cur_family, b, maker, breaker, variant, stage)
        trace.stages.append(st)
        if red is None:
            return trace
        if red.alive:
            trace.tau_observed = stage
        cur_board, cur_family = red.next_board, red.next_family
        if cur_family.is_empty() and not continue_when_empty:
            return trace
    else:
        trace.truncated = not cur_family.is_empty() and cur_board.size > 0
    return trace


def replay_trace(trace: MatchTrace, board: Board, family) -> list[StageReduction]:
    """Re-apply every recorded move through the core rules and check that the
    recorded reductions and tau are reproduced."""
    reductions = []
    cur_board, cur_family = board, family
    tau = 0
    for st in trace.stages:
        if st.board_size != cur_board.size:
            raise InvalidState(f"stage {st.stage}: board size {cur_board.size} != recorded {st.board_size}")
        state = GameState(cur_board, trace.config["b"], st.stage)
        for mv in st.moves:
            state = apply_move(state, mv.player, mv.elements)
        if st.forfeit is not None:
            break
        red = reduce_stage(state, cur_family, trace.variant)
        if red.survivors_per_group != tuple(st.survivors) or red.next_board.size != st.next_board_size:
            raise InvalidState(f"stage {st.stage}: replayed reduction differs from the trace")
        if red.alive:
            tau = st.stage
        reductions.append(red)
        cur_board, cur_family = red.next_board, red.next_family
    if tau != trace.tau_observed:
        raise InvalidState(f"replayed tau {tau} != recorded {trace.tau_observed}")
    return reductions


def stage_upper_bound(board_size: int, min_size: int, b: int) -> int:
    """Largest s such that a board shrunk s times by ``ceil(x/(b+1))`` still
    holds ``min_size`` elements: no Maker can keep a winning set longer
    against a Breaker that always claims b elements."""
    if min_size < 1:
        raise InvalidArgument("min_size must be positive")
    s, x = 0, board_size
    while True:
        x = -(-x // (b + 1))
        if x < min_size:
            return s
        s += 1
        if x == 1:
            return math.inf if min_size <= 1 else s


def log_stage_bound(board_size: int, min_size: int, b: int) -> int:
    """The looser closed form ``floor(log_{b+1}(|X|/k)) + 1``."""
    return int(math.floor(math.log(board_size / min_size) / math.log(b + 1) + 1e-12)) + 1
