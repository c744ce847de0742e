"""Weight-greedy Breaker bounding the number of winning sets Maker completes.

A winning set F is alive while Breaker owns none of its elements and weighs
(1+b)^-u(F), u(F) being the number of its elements Maker does not own.
Breaker makes his b picks one at a time, each time taking the free element of
largest alive weight; the sets it hits die before the next pick.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ._bits import incidence_matrix, iter_bits, popcount
from .core import GameState, Move, Player
from .engine import Strategy
from .errors import InvalidState

TIE_RTOL = 1e-12


def beck_bound(sizes: Sequence[int], b: int) -> float:
    """sum over F of (1+b)^(1-|F|)."""
    return math.fsum((1 + b) ** (1 - s) for s in sizes)


class BeckState:
    """Alive flags and missing counts ``u`` per set, with element scores
    computed through a sparse incidence matrix."""

    def __init__(self, sets: Sequence[int], b: int, board_mask: int, maker_mask: int = 0,
                 breaker_mask: int = 0):
        self.sets = list(sets)
        self.b = b
        self.board_mask = board_mask
        self.maker_mask = maker_mask
        self.breaker_mask = breaker_mask
        self._inc_t = incidence_matrix(self.sets, board_mask.bit_length()).T.tocsr()
        missing = np.asarray(self._inc_t.sum(axis=0)).ravel()
        self.alive = np.ones(len(self.sets), dtype=bool)
        self.u = missing.astype(np.int64)
        for e in iter_bits(maker_mask):
            self.u[self._rows(e)] -= 1
        for e in iter_bits(breaker_mask):
            self.alive[self._rows(e)] = False

    @property
    def free_mask(self) -> int:
        return self.board_mask & ~(self.maker_mask | self.breaker_mask)

    def _rows(self, e: int) -> np.ndarray:
        # the transpose is stored row-per-element, so its row e lists the sets
        if e >= self._inc_t.shape[0]:
            return np.empty(0, dtype=np.int64)
        return self._inc_t.indices[self._inc_t.indptr[e]:self._inc_t.indptr[e + 1]]

    def weights(self) -> np.ndarray:
        return np.where(self.alive, (1.0 + self.b) ** (-self.u.astype(float)), 0.0)

    def weight(self, i: int) -> float:
        return float((1 + self.b) ** (-int(self.u[i]))) if self.alive[i] else 0.0

    def score(self, e: int) -> float:
        return math.fsum(self.weight(int(i)) for i in self._rows(e))

    def total(self) -> float:
        return math.fsum(self.weights())

    def claim_maker(self, e: int) -> None:
        if not (self.free_mask >> e) & 1:
            raise InvalidState(f"element {e} is not free")
        self.maker_mask |= 1 << e
        self.u[self._rows(e)] -= 1

    def claim_breaker(self, e: int) -> None:
        if not (self.free_mask >> e) & 1:
            raise InvalidState(f"element {e} is not free")
        self.breaker_mask |= 1 << e
        self.alive[self._rows(e)] = False

    def best_element(self) -> int:
        free = self.free_mask
        if not free:
            raise InvalidState("no free element")
        ids = np.fromiter(iter_bits(free), dtype=np.int64)
        inside = ids[ids < self._inc_t.shape[0]]
        if inside.size == 0 or not self.sets:
            return int(ids[0])
        scores = (self._inc_t @ self.weights())[inside]
        best = scores.max()
        if best <= 0:
            return int(ids[0])
        return int(inside[np.flatnonzero(scores >= best - TIE_RTOL * best)[0]])

    def completed(self) -> int:
        return sum(1 for m in self.sets if not m & ~self.maker_mask)


def beck_breaker_move(state: BeckState, b: int | None = None) -> tuple[int, ...]:
    """Choose (and apply) up to b elements greedily by alive weight."""
    b = state.b if b is None else b
    picks = []
    for _ in range(min(b, popcount(state.free_mask))):
        e = state.best_element()
        state.claim_breaker(e)
        picks.append(e)
    return tuple(picks)


class BeckBreaker(Strategy):
    """The weight-greedy Breaker on the stage family, or on witnesses when the
    family is a property family."""

    role = Player.BREAKER
    name = "beck"
    markov = True

    def __init__(self, witness_cap: int = 256, rng=None):
        self.witness_cap = witness_cap
        self.rng = rng

    def start_stage(self, board, family, bias, stage):
        sets = [] if family.is_empty() else family.witnesses(board, self.witness_cap, self.rng)
        self._state = BeckState(sets, bias, board.mask)

    def observe(self, move: Move, state: GameState) -> None:
        if move.player is Player.MAKER:
            for e in move.elements:
                self._state.claim_maker(e)

    def choose(self, state: GameState) -> tuple[int, ...]:
        return beck_breaker_move(self._state)


def simulate_random_maker(sets: Sequence[int], size: int, b: int, games: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Completed-set counts of ``games`` independent single-stage games of a
    uniformly random Maker against the weight-greedy Breaker, run side by side
    on the board {0..size-1}. Uses the same tie rule as :class:`BeckState`."""
    inc = np.zeros((len(sets), size))
    for i, m in enumerate(sets):
        for e in iter_bits(m):
            inc[i, e] = 1.0
    sizes = inc.sum(axis=1)
    owner = np.zeros((games, size), dtype=np.int8)  # 0 free, 1 maker, 2 breaker
    rows = np.arange(games)
    base = 1.0 + b
    while True:
        free = owner == 0
        active = free.any(axis=1)
        if not active.any():
            break
        noise = rng.random((games, size))
        noise[~free] = -1.0
        pick = noise.argmax(axis=1)
        owner[rows[active], pick[active]] = 1
        for _ in range(b):
            free = owner == 0
            active = free.any(axis=1)
            if not active.any():
                break
            maker = (owner == 1).astype(float)
            dead = ((owner == 2).astype(float) @ inc.T) > 0
            u = sizes[None, :] - maker @ inc.T
            w = np.where(dead, 0.0, base ** (-u))
            score = w @ inc
            score[~free] = -1.0
            best = score.max(axis=1, keepdims=True)
            tied = (score >= best - TIE_RTOL * np.abs(best)) & free
            choice = tied.argmax(axis=1)
            owner[rows[active], choice[active]] = 2
    maker = (owner == 1).astype(float)
    return ((maker @ inc.T) == sizes[None, :]).sum(axis=1)
