"""Engine, strategies and exact solver for (1:b) multistage Maker-Breaker games."""

from .core import (
    Board,
    Family,
    GameState,
    Move,
    Owner,
    Player,
    StageReduction,
    Variant,
    apply_move,
    complete_graph_board,
    family_stats,
    reduce_stage,
)
from .engine import MatchTrace, StageTrace, Strategy, play_multistage, play_stage, replay_trace
from .errors import (
    DegenerateParameters,
    FamilyTooLarge,
    GameError,
    IllegalMove,
    InvalidArgument,
    InvalidState,
    InvariantViolation,
    NoBunch,
    SizeLimitExceeded,
)
from .graphs import SimpleGraph

__all__ = [
    "Board", "Family", "GameState", "Move", "Owner", "Player", "StageReduction", "Variant",
    "apply_move", "complete_graph_board", "family_stats", "reduce_stage",
    "MatchTrace", "StageTrace", "Strategy", "play_multistage", "play_stage", "replay_trace",
    "DegenerateParameters", "FamilyTooLarge", "GameError", "IllegalMove", "InvalidArgument",
    "InvalidState", "InvariantViolation", "NoBunch", "SizeLimitExceeded", "SimpleGraph",
]
