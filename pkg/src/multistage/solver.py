"""Exact minimax for single-stage games and for the multistage value tau on
tiny boards, optimal-policy agents, and an exhaustive Breaker adversary.

Positions are pairs of bitmasks (Maker's, Breaker's elements) with Maker to
move. By default Breaker only branches over claims of exactly min(b, free)
elements; ``full_subsets=True`` branches over every claim of 1..b elements.
"""

from __future__ import annotations

import copy
from itertools import combinations
from typing import Callable

from ._bits import bits, iter_bits, mask_of, popcount
from .core import Board, GameState, Player, StageReduction, Variant, apply_move, reduce_stage
from .engine import Strategy, stage_upper_bound
from .errors import InvalidArgument, SizeLimitExceeded


def _explicit_masks(family, board: Board) -> list[int]:
    if family.is_empty():
        return []
    if not hasattr(family, "masks"):
        raise InvalidArgument("the exact solver needs an explicit family")
    bm = board.mask
    return [m for m in family.masks() if not m & ~bm]


def breaker_claims(free: int, b: int, full_subsets: bool = False):
    """All Breaker claims from ``free`` (as masks), in lexicographic order."""
    els = bits(free)
    sizes = range(1, min(b, len(els)) + 1) if full_subsets else (min(b, len(els)),)
    for k in sizes:
        for combo in combinations(els, k):
            yield mask_of(combo)


def _complete(sets, mask: int) -> bool:
    return any(not s & ~mask for s in sets)


# -- single stage --------------------------------------------------------------


class StageSolver:
    def __init__(self, board: Board, family, b: int, *, full_subsets: bool = False, limit: int = 24):
        if board.size > limit:
            raise SizeLimitExceeded(f"board has {board.size} > {limit} elements")
        if b < 1:
            raise InvalidArgument("b must be positive")
        self.board, self.b, self.full = board, b, full_subsets
        self.sets = _explicit_masks(family, board)
        self.memo: dict[tuple[int, int], bool] = {}

    def maker_wins(self, maker: int = 0, breaker: int = 0) -> bool:
        """Maker to move at (maker, breaker); True if she can complete a set."""
        key = (maker, breaker)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        free = self.board.mask & ~(maker | breaker)
        alive = [s for s in self.sets if not s & breaker]
        result = False
        if alive and free:
            for e in iter_bits(free):
                if self._after_maker(alive, maker | (1 << e), breaker):
                    result = True
                    break
        self.memo[key] = result
        return result

    def _after_maker(self, alive, maker, breaker) -> bool:
        if _complete(alive, maker):
            return True
        free = self.board.mask & ~(maker | breaker)
        if not free:
            return False
        return all(self.maker_wins(maker, breaker | s) for s in breaker_claims(free, self.b, self.full))

    def maker_move(self, maker: int, breaker: int) -> int:
        """A winning move if one exists, else the lowest free element."""
        free = self.board.mask & ~(maker | breaker)
        alive = [s for s in self.sets if not s & breaker]
        for e in iter_bits(free):
            if self._after_maker(alive, maker | (1 << e), breaker):
                return e
        return (free & -free).bit_length() - 1

    def breaker_move(self, maker: int, breaker: int) -> int:
        free = self.board.mask & ~(maker | breaker)
        first = None
        for s in breaker_claims(free, self.b, self.full):
            first = s if first is None else first
            if not self.maker_wins(maker, breaker | s):
                return s
        return first


def solve_single_stage(board: Board, family, b: int, *, full_subsets: bool = False, limit: int = 24) -> Player:
    solver = StageSolver(board, family, b, full_subsets=full_subsets, limit=limit)
    return Player.MAKER if solver.maker_wins() else Player.BREAKER


# -- multistage ----------------------------------------------------------------


class TauSolver:
    """Value of the multistage game from any stage board.

    ``value(X, r)`` is the number of further stages Maker can make end with a
    nonempty family when at most ``r`` stages remain; the family on board X
    is {F : F a subset of X}. Values are capped at ``max_stages``.
    """

    def __init__(self, board: Board, family, b: int, variant: Variant | str = Variant.STANDARD, *,
                 full_subsets: bool = False, limit: int = 12, max_stages: int = 64, prune: bool = True):
        if board.size > limit:
            raise SizeLimitExceeded(f"board has {board.size} > {limit} elements")
        self.board, self.b = board, b
        self.variant = Variant(variant)
        self.full = full_subsets
        self.sets = _explicit_masks(family, board)
        self.max_stages = max_stages
        self.prune = prune and self.variant is Variant.STANDARD
        self.kmin = min((popcount(s) for s in self.sets), default=1)
        self.stage_memo: dict[tuple[int, int], int] = {}
        self.pos_memo: dict[tuple[int, int, int, int], int] = {}

    def family_on(self, x: int) -> list[int]:
        return [s for s in self.sets if not s & ~x]

    def upper(self, x: int, r: int) -> int:
        if not self.prune:
            return r
        ub = stage_upper_bound(popcount(x), self.kmin, self.b)
        return min(r, ub)

    def payoff(self, nxt: int, r: int) -> int:
        if not self.family_on(nxt):
            return 0
        return 1 + (self.value(nxt, r - 1) if r > 1 else 0)

    def value(self, x: int | None = None, r: int | None = None) -> int:
        x = self.board.mask if x is None else x
        r = self.max_stages if r is None else r
        if r <= 0 or not self.family_on(x):
            return 0
        key = (x, r)
        if key not in self.stage_memo:
            self.stage_memo[key] = self.maker_value(x, r, 0, 0)
        return self.stage_memo[key]

    def maker_value(self, x: int, r: int, maker: int, breaker: int) -> int:
        key = (x, r, maker, breaker)
        hit = self.pos_memo.get(key)
        if hit is not None:
            return hit
        free = x & ~(maker | breaker)
        if not free:
            val = self.payoff(maker, r)
        else:
            top = self.upper(x, r)
            val = -1
            for e in iter_bits(free):
                val = max(val, self.after_maker(x, r, maker | (1 << e), breaker))
                if val >= top:
                    break
        self.pos_memo[key] = val
        return val

    def after_maker(self, x: int, r: int, maker: int, breaker: int) -> int:
        free = x & ~(maker | breaker)
        if self.variant is Variant.STOP and _complete(self.family_on(x), maker):
            return self.payoff(maker | free, r)
        if not free:
            return self.payoff(maker, r)
        val = None
        for s in breaker_claims(free, self.b, self.full):
            v = self.maker_value(x, r, maker, breaker | s)
            val = v if val is None else min(val, v)
            if val == 0:
                break
        return val

    def maker_move(self, x: int, r: int, maker: int, breaker: int) -> int:
        target = self.maker_value(x, r, maker, breaker)
        for e in iter_bits(x & ~(maker | breaker)):
            if self.after_maker(x, r, maker | (1 << e), breaker) == target:
                return e
        raise AssertionError("no move attains the position value")

    def breaker_move(self, x: int, r: int, maker: int, breaker: int) -> int:
        target = self.after_maker(x, r, maker, breaker)
        free = x & ~(maker | breaker)
        for s in breaker_claims(free, self.b, self.full):
            if self.maker_value(x, r, maker, breaker | s) == target:
                return s
        raise AssertionError("no claim attains the position value")


def solve_tau_exact(board: Board, family, b: int, variant: Variant | str = Variant.STANDARD, *,
                    full_subsets: bool = False, limit: int = 12, max_stages: int = 64) -> int:
    """tau of the multistage game (``max_stages`` stands for unbounded)."""
    if family.is_empty():
        return 0
    return TauSolver(board, family, b, variant, full_subsets=full_subsets, limit=limit,
                     max_stages=max_stages).value()


# -- optimal agents ------------------------------------------------------------


class _TauAgent(Strategy):
    markov = True

    def __init__(self, solver: TauSolver):
        self.solver = solver

    def start_stage(self, board, family, bias, stage):
        self.x = board.mask
        self.r = self.solver.max_stages - stage + 1


class OptimalMaker(_TauAgent):
    role = Player.MAKER
    name = "optimal"

    def choose(self, state: GameState) -> tuple[int, ...]:
        return (self.solver.maker_move(self.x, self.r, state.maker_mask, state.breaker_mask),)


class OptimalBreaker(_TauAgent):
    role = Player.BREAKER
    name = "optimal"

    def choose(self, state: GameState) -> tuple[int, ...]:
        return bits(self.solver.breaker_move(self.x, self.r, state.maker_mask, state.breaker_mask))


# -- exhaustive adversary ----------------------------------------------------


def worst_case_single_stage(board: Board, b: int, maker_choice: Callable[[int, int, int], int],
                            evaluate: Callable[[int], float], *, full_subsets: bool = False,
                            limit: int = 16) -> float:
    """Minimum of ``evaluate(maker_mask)`` at the end of a stage over every
    Breaker strategy, against a Maker whose move is
    ``maker_choice(free, maker, breaker)``."""
    if board.size > limit:
        raise SizeLimitExceeded(f"board has {board.size} > {limit} elements")
    memo: dict[tuple[int, int], float] = {}

    def rec(maker: int, breaker: int) -> float:
        key = (maker, breaker)
        if key in memo:
            return memo[key]
        free = board.mask & ~(maker | breaker)
        if not free:
            val = evaluate(maker)
        else:
            e = maker_choice(free, maker, breaker)
            m2 = maker | (1 << e)
            free2 = free & ~(1 << e)
            if not free2:
                val = evaluate(m2)
            else:
                val = min(rec(m2, breaker | s) for s in breaker_claims(free2, b, full_subsets))
        memo[key] = val
        return val

    return rec(0, 0)


def worst_case_against(board: Board, family, b: int, maker: Strategy,
                       variant: Variant | str = Variant.STANDARD, *, max_stages: int = 16,
                       full_subsets: bool = False, limit: int = 12) -> int:
    """Smallest number of surviving stages ``maker`` reaches over every
    Breaker strategy. The strategy object is copied at every branch."""
    variant = Variant(variant)
    if board.size > limit:
        raise SizeLimitExceeded(f"board has {board.size} > {limit} elements")

    def stage(bd: Board, fam, idx: int, agent: Strategy) -> int:
        if idx > max_stages or fam.is_empty():
            return 0
        agent.start_stage(bd, fam, b, idx)
        return maker_turn(bd, fam, idx, GameState(bd, b, idx), agent)

    def finish(fam, idx: int, state: GameState, agent: Strategy) -> int:
        red: StageReduction = reduce_stage(state, fam, variant)
        agent.end_stage(red, state)
        if not red.alive:
            return 0
        return 1 + stage(red.next_board, red.next_family, idx + 1, agent)

    def maker_turn(bd, fam, idx, state, agent) -> int:
        e = agent.choose(state)
        state = apply_move(state, Player.MAKER, e)
        agent.observe(state.history[-1], state)
        if variant is Variant.STOP and fam.completed_by(bd, state.maker_mask):
            return finish(fam, idx, state, agent)
        if not state.free_mask:
            return finish(fam, idx, state, agent)
        best = None
        for s in breaker_claims(state.free_mask, b, full_subsets):
            clone = copy.deepcopy(agent)
            st = apply_move(state, Player.BREAKER, bits(s))
            clone.observe(st.history[-1], st)
            if not st.free_mask:
                v = finish(fam, idx, st, clone)
            else:
                v = maker_turn(bd, fam, idx, st, clone)
            best = v if best is None else min(best, v)
            if best == 0:
                break
        return best

    return stage(board, family, 1, copy.deepcopy(maker))
