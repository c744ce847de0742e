"""Two-phase Breaker for the multistage H-game.

Phase one runs the weight-greedy Breaker against the family of s-bunches of
copies of K (a densest-2-density subgraph of H) on t*v(K)..(t+1)*v(K)
vertices, so that no large K-collection survives. Phase two fixes the
K-collections of the board it starts on and answers every Maker edge inside
a collection with further edges of that collection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._bits import iter_bits, mask_of, popcount
from .beck import BeckState
from .core import Family, GameState, Move, Player, complete_graph_board
from .engine import Strategy
from .errors import FamilyTooLarge, InvalidArgument
from .graphs import SimpleGraph, choose_k, copies, is_connected, k_collections, max_2_density


@dataclass(frozen=True)
class BunchParameters:
    delta: float
    t: int
    feasible: bool
    derived: bool
    m2: Fraction


def _bunch_density_holds(k: SimpleGraph, m2: Fraction, delta: float, t: int) -> bool:
    # (e + m2 x)/(v + x) is monotone in x and tends to m2, so x = t-1 decides.
    x = t - 1
    return (k.m + m2 * x) / (k.n + x) >= m2 - Fraction(delta).limit_denominator(10 ** 12) - Fraction(1, 10 ** 12)


def min_delta_for(k: SimpleGraph, t: int) -> Fraction:
    """Smallest delta for which every s-bunch with s >= t has density >= m2(K) - delta."""
    m2 = max_2_density(k)
    x = t - 1
    return max(Fraction(0), m2 - (k.m + m2 * x) / (k.n + x))


def derive_bunch_parameters(k: SimpleGraph, eps: float, n: int, *, t_default: int = 2,
                            t_max: int = 10_000) -> BunchParameters:
    """(delta, t) from the two defining inequalities when t*v(K) <= n,
    otherwise ``t_default`` with the smallest admissible delta."""
    if eps <= 0:
        raise InvalidArgument("eps must be positive")
    m2 = max_2_density(k)
    m2f = float(m2)
    bound = m2f - 1 / (1 / m2f + eps / 4)
    delta = bound / 2
    t_found = None
    for t in range(1, t_max + 1):
        lhs = (t + 2) * k.n / ((m2f - delta) * t * k.n - 1) if (m2f - delta) * t * k.n > 1 else math.inf
        if _bunch_density_holds(k, m2, delta, t) and lhs < 1 / (m2f - delta) + eps / 4:
            t_found = t
            break
    if t_found is not None and t_found * k.n <= n:
        return BunchParameters(delta, t_found, True, True, m2)
    return BunchParameters(float(min_delta_for(k, t_default)), t_default, False, False, m2)


@dataclass(frozen=True)
class BunchFamily:
    n: int
    k: SimpleGraph
    t: int
    delta: float
    minimal_only: bool
    masks: tuple[int, ...]
    min_density: Fraction | None

    @property
    def density_ok(self) -> bool:
        m2 = max_2_density(self.k)
        return self.min_density is None or float(self.min_density) >= float(m2) - self.delta - 1e-12

    def as_family(self) -> Family:
        return Family((self.masks,), ("bunches",), {"kind": "bunches", "t": self.t})


def enumerate_bunch_family(n: int, k: SimpleGraph, t: int, delta: float, *, minimal_only: bool = False,
                           cap: int = 2_000_000) -> BunchFamily:
    """Edge sets of all s-bunches B of copies of K in K_n with
    t*v(K) <= v(B) <= (t+1)*v(K) (s >= t is then automatic).

    With ``minimal_only`` only bunches whose last copy first reaches t*v(K)
    vertices are kept; every K-collection on at least t*v(K) vertices still
    contains one of them.
    """
    if k.n < 3 or not is_connected(k):
        raise InvalidArgument("K must be connected with at least 3 vertices")
    if t < 1:
        raise InvalidArgument("t must be positive")
    lo, hi = t * k.n, (t + 1) * k.n
    board = complete_graph_board(n) if n >= 2 else None
    if board is None or lo > n:
        return BunchFamily(n, k, t, delta, minimal_only, (), None)
    cps = [(mask_of(c.vertices), mask_of(board.edge_id(u, v) for u, v in c.edges))
           for c in copies(k, SimpleGraph.complete(n))]
    seen: set[int] = set()
    out: dict[int, int] = {}
    frontier = []
    for vm, em in cps:
        if em not in seen:
            seen.add(em)
            frontier.append((vm, em))
    while frontier:
        nxt = []
        for vm, em in frontier:
            nv = popcount(vm)
            if lo <= nv <= hi:
                out[em] = nv
            if nv >= lo and minimal_only:
                continue
            for cv, ce in cps:
                if popcount(cv & vm) < 2 or not cv & ~vm:
                    continue
                v2, e2 = vm | cv, em | ce
                nv2 = popcount(v2)
                if nv2 > hi or e2 in seen:
                    continue
                seen.add(e2)
                nxt.append((v2, e2))
            if len(out) > cap or len(seen) > 4 * cap:
                raise FamilyTooLarge(f"bunch enumeration exceeded cap {cap}", estimate=len(out))
        frontier = nxt
    masks = tuple(sorted(out))
    dens = min((Fraction(popcount(m), out[m]) for m in masks), default=None)
    return BunchFamily(n, k, t, delta, minimal_only, masks, dens)


class HGameBreaker(Strategy):
    """Two-phase Breaker; ``phase1_stages`` is the ceiling of
    (1/m2(K) + eps/2) * log_{b+1}(n)."""

    role = Player.BREAKER
    name = "hgame"

    def __init__(self, n: int, h: SimpleGraph, b: int, eps: float = 0.5, *, delta: float | None = None,
                 t: int | None = None, minimal_only: bool = True, cap: int = 2_000_000):
        self.n, self.h, self.b, self.eps = n, h, b, eps
        self.k = choose_k(h)
        params = derive_bunch_parameters(self.k, eps, n)
        if t is not None or delta is not None:
            tt = t if t is not None else params.t
            dd = delta if delta is not None else float(min_delta_for(self.k, tt))
            params = BunchParameters(dd, tt, params.feasible, False, params.m2)
        self.params = params
        self.phase1_stages = max(1, math.ceil((1 / float(params.m2) + eps / 2) * math.log(n) / math.log(b + 1)))
        self.bunches = enumerate_bunch_family(n, self.k, params.t, params.delta, minimal_only=minimal_only,
                                              cap=cap)
        self._aux = self.bunches.masks
        self.collections: list[int] | None = None
        self.phase2_start_largest: int | None = None
        self.stage = 0

    @property
    def phase(self) -> int:
        return 1 if self.stage <= self.phase1_stages else 2

    def start_stage(self, board, family, bias, stage):
        if bias != self.b:
            raise InvalidArgument(f"strategy built for b={self.b}, game has b={bias}")
        self.stage = stage
        self.board = board
        if self.phase == 1:
            self._aux = tuple(m for m in self._aux if not m & ~board.mask)
            self._beck = BeckState(self._aux, bias, board.mask)
        else:
            if self.collections is None:
                rep = k_collections(board.graph(), self.k)
                self.phase2_start_largest = rep.largest()
                self.collections = [mask_of(board.edge_id(u, v) for u, v in c.edges) for c in rep]
            self.collections = [c & board.mask for c in self.collections if c & board.mask]
        self._pending: tuple[int, ...] = ()

    def observe(self, move: Move, state: GameState) -> None:
        if self.phase == 1:
            for e in move.elements:
                if move.player is Player.MAKER:
                    self._beck.claim_maker(e)
                elif (self._beck.free_mask >> e) & 1:
                    self._beck.claim_breaker(e)
            return
        if move.player is Player.MAKER:
            self._pending = self._answer(move.elements[0], state.free_mask, state.bias)

    def _answer(self, e: int, free: int, b: int) -> tuple[int, ...]:
        picks: list[int] = []
        for c in self.collections:
            if (c >> e) & 1:
                picks = list(iter_bits(c & free))[:b]
                break
        if len(picks) < b:
            for x in iter_bits(free):
                if len(picks) == b:
                    break
                if x not in picks:
                    picks.append(x)
        return tuple(sorted(picks))

    def choose(self, state: GameState) -> tuple[int, ...]:
        if self.phase == 1:
            picks = []
            for _ in range(min(state.bias, popcount(state.free_mask))):
                picks.append(self._beck.best_element())
                self._beck.claim_breaker(picks[-1])
            return tuple(picks)
        return self._pending
