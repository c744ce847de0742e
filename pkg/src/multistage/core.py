"""Boards, winning families, ownership state and the stage-reduction rule.

Winning sets are stored as Python ``int`` bitmasks over element ids. A board
produced by :func:`complete_graph_board` has dense ids ``0..C(n,2)-1`` in
lexicographic pair order; boards of later stages are restrictions of it and
keep the parent's ids, so one id space covers a whole multistage game.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

from ._bits import bits, iter_bits, mask_of, popcount
from .errors import IllegalMove, InvalidArgument, InvalidState
from .graphs import SimpleGraph


class Player(str, enum.Enum):
    MAKER = "maker"
    BREAKER = "breaker"

    @property
    def opponent(self) -> "Player":
        return Player.BREAKER if self is Player.MAKER else Player.MAKER


class Owner(str, enum.Enum):
    FREE = "free"
    MAKER = "maker"
    BREAKER = "breaker"


class Variant(str, enum.Enum):
    STANDARD = "standard"
    STOP = "stop"


@dataclass(frozen=True)
class Board:
    elements: tuple[int, ...]
    labels: tuple[tuple[int, int], ...] | None = None
    n: int = 0

    def __post_init__(self):
        els = tuple(self.elements)
        if list(els) != sorted(set(els)) or (els and els[0] < 0):
            raise InvalidArgument("board elements must be sorted, distinct and non-negative")
        object.__setattr__(self, "elements", els)
        if self.labels is not None:
            if els and els[-1] >= len(self.labels):
                raise InvalidArgument("labeling does not cover every element")
            if len(set(self.labels)) != len(self.labels):
                raise InvalidArgument("labels must be distinct vertex pairs")
            for u, v in self.labels:
                if not 0 <= u < v < self.n:
                    raise InvalidArgument(f"bad label ({u}, {v}) for n={self.n}")

    @classmethod
    def abstract(cls, size: int) -> "Board":
        return cls(tuple(range(size)))

    @cached_property
    def mask(self) -> int:
        return mask_of(self.elements)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e):
        return (self.mask >> e) & 1 == 1

    def restrict(self, mask: int) -> "Board":
        if mask & ~self.mask:
            raise InvalidArgument("restriction is not a subset of the board")
        return Board(bits(mask), self.labels, self.n)

    @property
    def is_graph(self) -> bool:
        return self.labels is not None

    def label(self, e: int) -> tuple[int, int]:
        if self.labels is None:
            raise InvalidArgument("board has no vertex-pair labeling")
        return self.labels[e]

    @cached_property
    def _edge_index(self) -> dict[tuple[int, int], int]:
        if self.labels is None:
            return {}
        return {pair: i for i, pair in enumerate(self.labels)}

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        try:
            return self._edge_index[(u, v)]
        except KeyError:
            raise InvalidArgument(f"no element labeled ({u}, {v})") from None

    def graph(self, mask: int | None = None) -> SimpleGraph:
        """The graph on ``n`` vertices formed by the elements in ``mask``."""
        if self.labels is None:
            raise InvalidArgument("board has no vertex-pair labeling")
        m = self.mask if mask is None else mask
        return SimpleGraph(self.n, frozenset(self.labels[e] for e in iter_bits(m)))


def complete_graph_board(n: int) -> Board:
    if n < 2:
        raise InvalidArgument(f"complete_graph_board needs n >= 2, got {n}")
    labels = tuple(combinations(range(n), 2))
    return Board(tuple(range(len(labels))), labels, n)


@dataclass(frozen=True)
class Family:
    """Winning sets grouped into sub-families ``F_1..F_s``.

    Sets are bitmasks. The same set may appear in several groups, never twice
    in one group.
    """

    groups: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        groups = tuple(tuple(g) for g in self.groups)
        names = tuple(self.names) or tuple(f"F{j + 1}" for j in range(len(groups)))
        if len(names) != len(groups):
            raise InvalidArgument("one name per group is required")
        for name, g in zip(names, groups):
            if any(m <= 0 for m in g):
                raise InvalidArgument(f"group {name!r} contains an empty winning set")
            if len(set(g)) != len(g):
                raise InvalidArgument(f"group {name!r} contains duplicate winning sets")
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "names", names)

    @classmethod
    def from_sets(cls, groups: Sequence[Iterable[Iterable[int]]], names: Sequence[str] = (), **meta):
        return cls(tuple(tuple(mask_of(s) for s in g) for g in groups), tuple(names), meta)

    @classmethod
    def single(cls, sets: Iterable[Iterable[int]], name: str = "F1", **meta):
        return cls.from_sets([list(sets)], [name], **meta)

    @classmethod
    def empty(cls) -> "Family":
        return cls((), ())

    def masks(self) -> list[int]:
        out: list[int] = []
        for g in self.groups:
            out.extend(g)
        return out

    def sets(self, group: int | None = None) -> list[frozenset[int]]:
        src = self.masks() if group is None else self.groups[group]
        return [frozenset(iter_bits(m)) for m in src]

    def __len__(self):
        return sum(len(g) for g in self.groups)

    def is_empty(self) -> bool:
        return all(not g for g in self.groups)

    def survivor_counts(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    def restrict(self, board: Board | int) -> "Family":
        """Keep the sets that lie entirely inside ``board``."""
        bm = board if isinstance(board, int) else board.mask
        out = tuple(tuple(m for m in g if not m & ~bm) for g in self.groups)
        return Family(out, self.names, self.meta)

    def completed_by(self, board: Board, maker_mask: int) -> bool:
        return any(not m & ~maker_mask for g in self.groups for m in g)

    def witnesses(self, board: Board, cap: int | None = None, rng=None) -> list[int]:
        bm = board.mask
        return [m for m in self.masks() if not m & ~bm]

    def validate_on(self, board: Board) -> None:
        bm = board.mask
        for name, g in zip(self.names, self.groups):
            if any(m & ~bm for m in g):
                raise InvalidArgument(f"group {name!r} has a set outside the board")

    def min_set_size(self) -> int | None:
        sizes = [popcount(m) for m in self.masks()]
        return min(sizes) if sizes else None


class GroupStats(NamedTuple):
    name: str
    k: int
    count: int


def family_stats(family: Family) -> list[GroupStats]:
    out = []
    for name, g in zip(family.names, family.groups):
        if not g:
            raise InvalidArgument(f"group {name!r} is empty")
        out.append(GroupStats(name, min(popcount(m) for m in g), len(g)))
    return out


@dataclass(frozen=True)
class Move:
    player: Player
    elements: tuple[int, ...]

    def to_json(self) -> dict:
        return {"player": self.player.value, "elements": list(self.elements)}

    @classmethod
    def from_json(cls, d: dict) -> "Move":
        return cls(Player(d["player"]), tuple(d["elements"]))


@dataclass(frozen=True)
class GameState:
    board: Board
    bias: int
    stage: int = 1
    maker_mask: int = 0
    breaker_mask: int = 0
    history: tuple[Move, ...] = ()

    def __post_init__(self):
        if self.bias < 1:
            raise InvalidArgument("bias must be a positive integer")
        if self.maker_mask & self.breaker_mask:
            raise InvalidArgument("an element cannot be owned by both players")

    @property
    def free_mask(self) -> int:
        return self.board.mask & ~(self.maker_mask | self.breaker_mask)

    @property
    def free(self) -> frozenset[int]:
        return frozenset(iter_bits(self.free_mask))

    @property
    def maker(self) -> frozenset[int]:
        return frozenset(iter_bits(self.maker_mask))

    @property
    def breaker(self) -> frozenset[int]:
        return frozenset(iter_bits(self.breaker_mask))

    @property
    def to_move(self) -> Player:
        if not self.history or self.history[-1].player is Player.BREAKER:
            return Player.MAKER
        return Player.BREAKER

    def owner(self, e: int) -> Owner:
        if e not in self.board:
            raise InvalidArgument(f"element {e} is not on the board")
        if (self.maker_mask >> e) & 1:
            return Owner.MAKER
        if (self.breaker_mask >> e) & 1:
            return Owner.BREAKER
        return Owner.FREE

    def exhausted(self) -> bool:
        return self.free_mask == 0


def apply_move(state: GameState, player: Player, elements: Iterable[int]) -> GameState:
    player = Player(player)
    els = tuple(sorted(set(elements)))
    if player is not state.to_move:
        raise IllegalMove(f"{player.value} moved out of turn")
    m = mask_of(els)
    if m & ~state.free_mask:
        raise IllegalMove(f"{player.value} claimed non-free element(s) {bits(m & ~state.free_mask)}")
    if player is Player.MAKER:
        if len(els) != 1:
            raise IllegalMove(f"maker must claim exactly one element, got {len(els)}")
        return GameState(state.board, state.bias, state.stage, state.maker_mask | m,
                         state.breaker_mask, state.history + (Move(player, els),))
    free = popcount(state.free_mask)
    if len(els) > state.bias:
        raise IllegalMove(f"breaker claimed {len(els)} > b={state.bias} elements")
    if not els and free:
        raise IllegalMove("breaker must claim at least one element while free elements remain")
    return GameState(state.board, state.bias, state.stage, state.maker_mask,
                     state.breaker_mask | m, state.history + (Move(player, els),))


@dataclass(frozen=True)
class StageReduction:
    next_board: Board
    next_family: object
    survivors_per_group: tuple[int, ...]

    @property
    def alive(self) -> bool:
        return any(self.survivors_per_group)


def reduce_stage(state: GameState, family, variant: Variant | str = Variant.STANDARD) -> StageReduction:
    variant = Variant(variant)
    if variant is Variant.STANDARD:
        if state.free_mask:
            raise InvalidState("standard reduction requires every element to be claimed")
        next_mask = state.maker_mask
    else:
        if state.free_mask and not family.completed_by(state.board, state.maker_mask):
            raise InvalidState("stop reduction requires a completed winning set or an exhausted board")
        next_mask = state.maker_mask | state.free_mask
    board = state.board.restrict(next_mask)
    nxt = family.restrict(board)
    return StageReduction(board, nxt, nxt.survivor_counts())
