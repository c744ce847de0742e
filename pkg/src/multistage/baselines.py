"""Baseline players: seeded uniform random and simple greedy heuristics."""

from __future__ import annotations

import random

from ._bits import bits, iter_bits, popcount
from .core import GameState, Player
from .engine import Strategy
from .errors import InvalidArgument


class RandomMaker(Strategy):
    role = Player.MAKER
    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def choose(self, state: GameState) -> tuple[int, ...]:
        return (self.rng.choice(bits(state.free_mask)),)


def random_breaker_move(state: GameState, b: int, rng: random.Random) -> tuple[int, ...]:
    """min(b, free) distinct free elements, uniformly at random."""
    free = bits(state.free_mask)
    return tuple(sorted(rng.sample(free, min(b, len(free)))))


class RandomBreaker(Strategy):
    role = Player.BREAKER
    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def choose(self, state: GameState) -> tuple[int, ...]:
        return random_breaker_move(state, state.bias, self.rng)


def _explicit_sets(family, board) -> list[int] | None:
    if family.is_empty():
        return []
    try:
        return family.witnesses(board, 256)
    except InvalidArgument:
        return None


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class GreedyMaker(Strategy):
    """Claims the free element lying in the most sets Breaker has not touched,
    preferring sets Maker has progressed in. On property families without
    witnesses it spreads its edges over low-degree vertices."""

    role = Player.MAKER
    name = "greedy"
    markov = True

    def start_stage(self, board, family, bias, stage):
        self.board = board
        self.sets = _explicit_sets(family, board)

    def choose(self, state: GameState) -> tuple[int, ...]:
        free = state.free_mask
        if self.sets is None:
            return (self._spread(state),)
        score: dict[int, float] = {}
        for m in self.sets:
            if m & state.breaker_mask:
                continue
            w = 2.0 ** popcount(m & state.maker_mask)
            for e in iter_bits(m & free):
                score[e] = score.get(e, 0.0) + w
        if not score:
            return (_lowest(free),)
        best = max(score.values())
        return (min(e for e, v in score.items() if v == best),)

    def _spread(self, state: GameState) -> int:
        deg = [0] * self.board.n
        for e in iter_bits(state.maker_mask):
            u, v = self.board.labels[e]
            deg[u] += 1
            deg[v] += 1
        return min(iter_bits(state.free_mask),
                   key=lambda e: (deg[self.board.labels[e][0]] + deg[self.board.labels[e][1]], e))


class GreedyBreaker(Strategy):
    """Explicit families: each pick kills the free element in the most live
    sets (weighted by Maker's progress). Property families: isolate the vertex
    with the fewest non-Breaker incident edges."""

    role = Player.BREAKER
    name = "greedy"
    markov = True

    def start_stage(self, board, family, bias, stage):
        self.board = board
        self.sets = _explicit_sets(family, board)

    def choose(self, state: GameState) -> tuple[int, ...]:
        picks: list[int] = []
        breaker = state.breaker_mask
        free = state.free_mask
        for _ in range(min(state.bias, popcount(free))):
            e = self._isolate(state, free, breaker) if self.sets is None else self._kill(state, free, breaker)
            picks.append(e)
            free &= ~(1 << e)
            breaker |= 1 << e
        return tuple(sorted(picks))

    def _kill(self, state, free, breaker) -> int:
        score: dict[int, float] = {}
        for m in self.sets:
            if m & breaker:
                continue
            w = 2.0 ** popcount(m & state.maker_mask)
            for e in iter_bits(m & free):
                score[e] = score.get(e, 0.0) + w
        if not score:
            return _lowest(free)
        best = max(score.values())
        return min(e for e, v in score.items() if v == best)

    def _isolate(self, state, free, breaker) -> int:
        if not self.board.is_graph:
            return _lowest(free)
        n = self.board.n
        avail = [0] * n
        has_free = [False] * n
        for e in iter_bits(self.board.mask & ~breaker):
            u, v = self.board.labels[e]
            avail[u] += 1
            avail[v] += 1
            if (free >> e) & 1:
                has_free[u] = has_free[v] = True
        target = min((v for v in range(n) if has_free[v]), key=lambda v: (avail[v], v))
        for e in iter_bits(free):
            if target in self.board.labels[e]:
                return e
        return _lowest(free)
