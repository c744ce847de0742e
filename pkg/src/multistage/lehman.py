"""Maker's tree-pair strategy for the unbiased multistage connectivity game.

K_n splits into floor(n/2) edge-disjoint spanning trees. Maker pairs them up
and, inside each pair, repairs every cut Breaker makes in one tree with an
edge of the partner tree, contracting the edges she claims. A pair is
finished once its contraction is a single vertex; Maker's contraction edges
then form a spanning tree, and those trees seed the next stage.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from ._bits import DSU, iter_bits
from .core import Board, GameState, Move, Player, StageReduction
from .engine import Strategy
from .errors import InvalidArgument, InvariantViolation


def _zigzag_path(start: int, m: int) -> list[int]:
    """Hamiltonian path start, start+1, start-1, start+2, ... over Z_m (m even)."""
    order = [start]
    for j in range(1, m):
        step = (j + 1) // 2
        order.append((start + step) % m if j % 2 else (start - step) % m)
    return order


def _path_edges(order: Sequence[int]) -> list[tuple[int, int]]:
    return [tuple(sorted((order[i], order[i + 1]))) for i in range(len(order) - 1)]


def spanning_tree_packing(n: int) -> list[list[tuple[int, int]]]:
    """floor(n/2) edge-disjoint spanning trees of K_n, as vertex-pair lists.

    Even n: the n/2 zigzag Hamiltonian paths. Odd n: the zigzag paths of
    K_{n-1}, each extended by vertex n-1 at its starting end.
    """
    if n < 2:
        raise InvalidArgument("n must be at least 2")
    if n % 2 == 0:
        return [_path_edges(_zigzag_path(i, n)) for i in range(n // 2)]
    if n == 3:
        return [[(0, 1), (0, 2)]]
    m = n - 1
    out = []
    for i in range(m // 2):
        order = _zigzag_path(i, m)
        out.append(_path_edges(order) + [(order[0], n - 1)])
    return out


def initial_forest_partition(n: int) -> list[list[tuple[int, int]]]:
    """ceil(n/2) edge-disjoint forests covering E(K_n).

    Even n: zigzag Hamiltonian paths. Odd n: the paths of K_{n+1} with vertex
    n deleted, each of which breaks into at most two paths.
    """
    if n < 2:
        raise InvalidArgument("n must be at least 2")
    if n % 2 == 0:
        return [_path_edges(_zigzag_path(i, n)) for i in range(n // 2)]
    m = n + 1
    out = []
    for i in range(m // 2):
        out.append([e for e in _path_edges(_zigzag_path(i, m)) if n not in e])
    return out


def greedy_tree_packing(board: Board, mask: int | None = None) -> list[list[int]]:
    """Edge-disjoint spanning trees peeled off by repeated Kruskal in id order."""
    remaining = sorted(iter_bits(board.mask if mask is None else mask))
    trees = []
    while True:
        dsu = DSU(board.n)
        tree = []
        for e in remaining:
            u, v = board.labels[e]
            if dsu.union(u, v):
                tree.append(e)
        if len(tree) != board.n - 1:
            return trees
        trees.append(tree)
        used = set(tree)
        remaining = [e for e in remaining if e not in used]


class TreePairState:
    """Two edge-disjoint trees of free edges spanning the contraction of
    Maker's claimed edges within this pair."""

    def __init__(self, labels, n: int, tree_a: Sequence[int], tree_b: Sequence[int]):
        self.labels = labels
        self.n = n
        self.dsu = DSU(n)
        self.trees = [set(tree_a), set(tree_b)]
        self.claimed: list[int] = []
        if self.trees[0] & self.trees[1]:
            raise InvalidArgument("pair trees must be edge-disjoint")
        self.check()

    @property
    def done(self) -> bool:
        return self.dsu.components == 1

    @property
    def uncontracted(self) -> int:
        return self.dsu.components

    def tree_of(self, e: int) -> int | None:
        for i, t in enumerate(self.trees):
            if e in t:
                return i
        return None

    def _ends(self, e: int) -> tuple[int, int]:
        u, v = self.labels[e]
        return self.dsu.find(u), self.dsu.find(v)

    def _contract(self, f: int) -> None:
        u, v = self.labels[f]
        if not self.dsu.union(u, v):
            raise InvariantViolation(f"edge {f} is a loop in the contraction")
        self.claimed.append(f)
        for t in self.trees:
            t.discard(f)
            for g in [g for g in t if self._ends(g)[0] == self._ends(g)[1]]:
                t.discard(g)

    def _side(self, tree: set[int], root: int) -> set[int]:
        adj: dict[int, list[int]] = {}
        for g in tree:
            a, b = self._ends(g)
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        seen = {root}
        todo = [root]
        while todo:
            x = todo.pop()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def _path(self, tree: set[int], src: int, dst: int) -> list[int]:
        adj: dict[int, list[tuple[int, int]]] = {}
        for g in tree:
            a, b = self._ends(g)
            adj.setdefault(a, []).append((b, g))
            adj.setdefault(b, []).append((a, g))
        prev = {src: None}
        q = deque([src])
        while q:
            x = q.popleft()
            if x == dst:
                break
            for y, g in adj.get(x, ()):
                if y not in prev:
                    prev[y] = (x, g)
                    q.append(y)
        if dst not in prev:
            raise InvariantViolation("pair tree does not span the contraction")
        out = []
        x = dst
        while prev[x] is not None:
            x, g = prev[x]
            out.append(g)
        return out

    def repair(self, e: int, tree_index: int) -> int:
        """Breaker took ``e`` from tree ``tree_index``: claim the lowest-id
        partner edge crossing the cut and contract it."""
        self.trees[tree_index].discard(e)
        side = self._side(self.trees[tree_index], self._ends(e)[0])
        partner = self.trees[1 - tree_index]
        cross = [f for f in partner if (self._ends(f)[0] in side) != (self._ends(f)[1] in side)]
        if not cross:
            raise InvariantViolation(f"no partner edge repairs the cut made by edge {e}")
        f = min(cross)
        self._contract(f)
        return f

    def free_move(self) -> int:
        """Claim the lowest-id tree edge; the partner tree drops the lowest-id
        edge of the cycle the contraction creates in it."""
        f = min(self.trees[0] | self.trees[1])
        i = self.tree_of(f)
        other = self.trees[1 - i]
        a, b = self._ends(f)
        cycle = self._path(other, a, b)
        other.discard(min(cycle))
        self._contract(f)
        return f

    def discard(self, e: int) -> None:
        for t in self.trees:
            t.discard(e)

    def check(self) -> None:
        """Both trees span the contraction with exactly components-1 edges."""
        k = self.dsu.components
        for t in self.trees:
            if len(t) != k - 1:
                raise InvariantViolation(f"pair tree has {len(t)} edges, expected {k - 1}")
            roots = {self.dsu.find(v) for v in range(self.n)}
            if roots and len(self._side(t, next(iter(roots)))) != k:
                raise InvariantViolation("pair tree does not span the contraction")


class LehmanMaker(Strategy):
    """Tree-pair Maker for b = 1 on E(K_n) boards.

    When Breaker's edge lies in a pair tree, Maker answers in that pair. On
    her first move, or when Breaker's edge lies in no tree, she plays a free
    move in the unfinished pair with the most uncontracted vertices (lowest
    index on ties). With every pair finished she claims the lowest free edge.
    """

    role = Player.MAKER
    name = "lehman"

    def __init__(self, check_invariants: bool = True):
        self.check_invariants = check_invariants
        self._next_trees: list[list[int]] | None = None
        self.pairs: list[TreePairState] = []

    def _trees_for(self, board: Board) -> list[list[int]]:
        full = board.size == board.n * (board.n - 1) // 2
        if self._next_trees is None and full:
            return [[board.edge_id(u, v) for u, v in t] for t in spanning_tree_packing(board.n)]
        if self._next_trees is not None:
            trees = self._next_trees
            if all(all(e in board for e in t) for t in trees):
                return trees
        return greedy_tree_packing(board)

    def start_stage(self, board, family, bias, stage):
        if bias != 1:
            raise InvalidArgument("the tree-pair strategy is defined for b = 1")
        if not board.is_graph:
            raise InvalidArgument("the tree-pair strategy needs an edge board")
        self.board = board
        trees = self._trees_for(board)
        self.pairs = [TreePairState(board.labels, board.n, trees[2 * i], trees[2 * i + 1])
                      for i in range(len(trees) // 2)]
        self._pending: int | None = None

    def observe(self, move: Move, state: GameState) -> None:
        if move.player is Player.BREAKER:
            self._pending = move.elements[0] if move.elements else None

    def _free_move(self) -> int | None:
        open_pairs = [p for p in self.pairs if not p.done]
        if not open_pairs:
            return None
        best = max(open_pairs, key=lambda p: (p.uncontracted, -self.pairs.index(p)))
        return best.free_move()

    def choose(self, state: GameState) -> tuple[int, ...]:
        e, self._pending = self._pending, None
        f = None
        if e is not None:
            for p in self.pairs:
                i = p.tree_of(e)
                if i is not None:
                    f = p.repair(e, i)
                    break
        if f is None:
            f = self._free_move()
        if f is None:
            free = state.free_mask
            f = (free & -free).bit_length() - 1
        for p in self.pairs:
            p.discard(f)
            if self.check_invariants:
                p.check()
        return (f,)

    def end_stage(self, reduction: StageReduction, state: GameState) -> None:
        self._next_trees = [list(p.claimed) for p in self.pairs if p.done]
