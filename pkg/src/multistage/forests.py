"""Forest-partition Breaker for the multistage non-k-colorability game.

The board is split into edge-disjoint forests, and the forests into groups of
at most b+1. Within a group Breaker keeps Maker's edges acyclic: the group's
free edges stay split into its forests, each a forest in the graph obtained by
contracting Maker's group edges. When Maker claims an edge of one forest, its
endpoints merge, and each other forest of the group that already joined those
two components now holds exactly one cycle. Breaker claims the lowest-id edge
of every such cycle, at most b edges. Consequently no free group edge ever has
both ends in one of Maker's components (the locking invariant), Maker's edges
in each group form a forest, and the next board splits into one forest per
group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from ._bits import DSU, iter_bits
from .core import Board, GameState, Move, Player, StageReduction
from .engine import Strategy
from .errors import InvalidArgument, InvariantViolation
from .lehman import initial_forest_partition


def is_forest_edges(labels, n: int, edges) -> bool:
    dsu = DSU(n)
    return all(dsu.union(*labels[e]) for e in edges)


def greedy_forest_partition(board: Board, mask: int | None = None) -> list[list[int]]:
    """Peel maximal forests off the board by Kruskal passes in id order."""
    remaining = sorted(iter_bits(board.mask if mask is None else mask))
    out = []
    while remaining:
        dsu = DSU(board.n)
        forest, rest = [], []
        for e in remaining:
            (forest if dsu.union(*board.labels[e]) else rest).append(e)
        out.append(forest)
        remaining = rest
    return out


@dataclass
class ForestGroup:
    forests: list[set[int]]
    dsu: DSU
    maker_edges: list[int] = field(default_factory=list)


class ForestGroups:
    def __init__(self, board: Board, forests: Sequence[Sequence[int]], b: int):
        self.board = board
        self.labels = board.labels
        self.n = board.n
        self.b = b
        self.k = len(forests)
        self.groups: list[ForestGroup] = []
        self.where: dict[int, tuple[int, int]] = {}
        for start in range(0, len(forests), b + 1):
            chunk = [set(f) for f in forests[start:start + b + 1]]
            gi = len(self.groups)
            for fi, f in enumerate(chunk):
                for e in f:
                    if e in self.where:
                        raise InvalidArgument(f"edge {e} lies in two forests")
                    self.where[e] = (gi, fi)
            self.groups.append(ForestGroup(chunk, DSU(self.n)))
        if set(self.where) != set(board.elements):
            raise InvalidArgument("forests do not partition the board")

    def _root_pair(self, g: ForestGroup, e: int) -> tuple[int, int]:
        u, v = self.labels[e]
        return g.dsu.find(u), g.dsu.find(v)

    def _path(self, g: ForestGroup, forest: set[int], src: int, dst: int) -> list[int] | None:
        adj: dict[int, list[tuple[int, int]]] = {}
        for e in forest:
            a, c = self._root_pair(g, e)
            adj.setdefault(a, []).append((c, e))
            adj.setdefault(c, []).append((a, e))
        prev = {src: None}
        q = deque([src])
        while q:
            x = q.popleft()
            if x == dst:
                break
            for y, e in adj.get(x, ()):
                if y not in prev:
                    prev[y] = (x, e)
                    q.append(y)
        if dst not in prev:
            return None
        out, x = [], dst
        while prev[x] is not None:
            x, e = prev[x]
            out.append(e)
        return out

    def remove(self, e: int) -> None:
        loc = self.where.pop(e, None)
        if loc is not None:
            self.groups[loc[0]].forests[loc[1]].discard(e)

    def maker_claims(self, e: int) -> list[int]:
        """Record Maker's edge; return the cycle-breaking edges Breaker must take."""
        loc = self.where.pop(e, None)
        if loc is None:
            return []
        gi, fi = loc
        g = self.groups[gi]
        g.forests[fi].discard(e)
        a, c = self._root_pair(g, e)
        if a == c:
            raise InvariantViolation(f"maker edge {e} closes a cycle in group {gi}")
        urgent = []
        for fj, forest in enumerate(g.forests):
            if fj == fi:
                continue
            path = self._path(g, forest, a, c)
            if path:
                urgent.append(min(path))
        g.dsu.union(a, c)
        g.maker_edges.append(e)
        if len(urgent) > self.b:
            raise InvariantViolation(f"{len(urgent)} cycle edges exceed b={self.b}")
        return urgent

    def group_of(self, e: int) -> int | None:
        loc = self.where.get(e)
        return None if loc is None else loc[0]

    def check_locking(self) -> None:
        for gi, g in enumerate(self.groups):
            for forest in g.forests:
                for e in forest:
                    a, c = self._root_pair(g, e)
                    if a == c:
                        raise InvariantViolation(
                            f"free edge {e} of group {gi} lies inside a Maker component")

    def next_forests(self) -> list[list[int]]:
        out = [list(g.maker_edges) for g in self.groups if g.maker_edges]
        for f in out:
            if not is_forest_edges(self.labels, self.n, f):
                raise InvariantViolation("Maker's edges in a group contain a cycle")
        return out


def forest_breaker_move(groups: ForestGroups, maker_edge: int, b: int, free_mask: int) -> tuple[int, ...]:
    """Breaker's answer to ``maker_edge``: every cycle-breaking edge first,
    then the lowest free edges of the same group, then the lowest free edges
    anywhere. ``free_mask`` is the free set after Maker's move."""
    gi = groups.group_of(maker_edge)
    picks = groups.maker_claims(maker_edge)
    taken = set(picks)
    quota = b - len(picks)
    if quota > 0 and gi is not None:
        same = sorted(e for f in groups.groups[gi].forests for e in f
                      if (free_mask >> e) & 1 and e not in taken)
        for e in same[:quota]:
            picks.append(e)
            taken.add(e)
        quota = b - len(picks)
    if quota > 0:
        for e in iter_bits(free_mask):
            if quota == 0:
                break
            if e not in taken:
                picks.append(e)
                taken.add(e)
                quota -= 1
    for e in picks:
        groups.remove(e)
    return tuple(sorted(picks))


def regroup_forests(groups: ForestGroups, reduction: StageReduction, b: int) -> ForestGroups:
    return ForestGroups(reduction.next_board, groups.next_forests(), b)


class ForestBreaker(Strategy):
    """Breaker that makes the board a forest after about log_{b+1}(n) + 1 stages.

    ``k_history`` lists the number of forests at the start of every stage.
    """

    role = Player.BREAKER
    name = "forest"

    def __init__(self, check_invariants: bool = True):
        self.check_invariants = check_invariants
        self._next: list[list[int]] | None = None
        self.k_history: list[int] = []
        self.checks = 0

    def _forests_for(self, board: Board) -> list[list[int]]:
        if self._next is not None and set(e for f in self._next for e in f) == set(board.elements):
            return self._next
        if self._next is None and board.size == board.n * (board.n - 1) // 2:
            return [[board.edge_id(u, v) for u, v in f] for f in initial_forest_partition(board.n)]
        return greedy_forest_partition(board)

    def start_stage(self, board, family, bias, stage):
        if not board.is_graph:
            raise InvalidArgument("the forest Breaker needs an edge board")
        self.groups = ForestGroups(board, self._forests_for(board), bias)
        self.k_history.append(self.groups.k)
        self._pending: tuple[int, ...] = ()

    def observe(self, move: Move, state: GameState) -> None:
        if move.player is Player.MAKER:
            self._pending = forest_breaker_move(self.groups, move.elements[0], state.bias, state.free_mask)
        else:
            for e in move.elements:
                self.groups.remove(e)
            if self.check_invariants:
                self.groups.check_locking()
                self.checks += 1

    def choose(self, state: GameState) -> tuple[int, ...]:
        return self._pending

    def end_stage(self, reduction: StageReduction, state: GameState) -> None:
        self._next = self.groups.next_forests()
