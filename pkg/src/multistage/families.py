"""Winning families on E(K_n): explicit builders and monotone property families.

Two kinds of family objects share one duck-typed interface (``restrict``,
``is_empty``, ``survivor_counts``, ``completed_by``, ``witnesses``):

* :class:`~multistage.core.Family` holds explicit bitmask sets.
* :class:`GraphPropertyFamily` stands for "all edge sets of K_n with a
  monotone property". Such a family restricted to a board is nonempty exactly
  when the board graph has the property, so it never has to be enumerated.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations, permutations
from math import comb
from typing import Callable, NamedTuple, Sequence

import networkx as nx

from ._bits import mask_of
from .core import Board, Family, complete_graph_board
from .errors import FamilyTooLarge, InvalidArgument
from .graphs import (
    SimpleGraph,
    chromatic_number_at_most,
    contains_copy,
    copies,
    is_connected,
    is_hamiltonian,
    is_pancyclic,
)

DEFAULT_CAP = 2_000_000


def _round(x: float) -> int:
    return max(1, int(math.floor(x + 0.5)))


def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise FamilyTooLarge(f"{what} has {count} sets, cap is {cap}", estimate=count)


class _Stars:
    """Per-vertex incident-edge masks for a complete-graph board."""

    def __init__(self, board: Board):
        self.star = [0] * board.n
        for e in board.elements:
            u, v = board.labels[e]
            self.star[u] |= 1 << e
            self.star[v] |= 1 << e

    def touching(self, vertices) -> int:
        m = 0
        for v in vertices:
            m |= self.star[v]
        return m

    def inside(self, a, n: int) -> int:
        aset = set(a)
        return self.touching(a) & ~self.touching(v for v in range(n) if v not in aset)

    def between(self, a, b) -> int:
        return self.touching(a) & self.touching(b)


def _bipartite_group(board: Board, stars: _Stars, a_size: int, b_size: int) -> list[int]:
    n = board.n
    out = []
    for a in combinations(range(n), a_size):
        ta = stars.touching(a)
        rest = [v for v in range(n) if v not in a]
        for b in combinations(rest, b_size):
            if a_size == b_size and b < a:
                continue
            out.append(ta & stars.touching(b))
    return out


def _bipartite_count(n: int, a: int, b: int) -> int:
    c = comb(n, a) * comb(n - a, b)
    return c // 2 if a == b else c


# -- auxiliary families used by Maker's discrepancy strategy ---------------------


class HamiltonGroupSize(NamedTuple):
    a: int
    b: int
    exact_a: float
    exact_b: float


def hamilton_parameters(n: int, eps: float) -> tuple[int, list[HamiltonGroupSize]]:
    """Group count ``s = 2/eps`` and the rounded part sizes of every group."""
    if not 0 < eps < 1:
        raise InvalidArgument("eps must lie in (0, 1)")
    s = _round(2 / eps)
    if s < 2:
        raise InvalidArgument(f"eps={eps} gives fewer than two groups")
    sizes = []
    for j in range(1, s):
        ea = n ** ((j - 1) * eps / 2)
        eb = n - 0.5 * n ** ((j + 1) * eps / 2)
        sizes.append(HamiltonGroupSize(_round(ea), _round(eb), ea, eb))
    last = n / math.log(n)
    sizes.append(HamiltonGroupSize(_round(last), _round(last), last, last))
    for g in sizes:
        if g.exact_b < 0.5 or g.a + g.b > n:
            raise InvalidArgument(f"group sizes {g.a},{g.b} infeasible for n={n}, eps={eps}")
    return s, sizes


def hamilton_families(n: int, eps: float, cap: int = DEFAULT_CAP) -> Family:
    s, sizes = hamilton_parameters(n, eps)
    total = sum(_bipartite_count(n, g.a, g.b) for g in sizes)
    _check_cap(total, cap, f"hamilton families (n={n}, eps={eps})")
    board = complete_graph_board(n)
    stars = _Stars(board)
    groups = [_bipartite_group(board, stars, g.a, g.b) for g in sizes]
    names = [f"F{j + 1}" for j in range(s)]
    return Family(tuple(map(tuple, groups)), tuple(names),
                  {"kind": "hamilton", "n": n, "eps": eps, "rounding": "nearest>=1",
                   "sizes": [tuple(g[:2]) for g in sizes]})


def coloring_family(n: int, k: int, cap: int = DEFAULT_CAP) -> Family:
    """All E(A) with |A| = ceil(n/k): a graph hitting each of them is not k-colorable."""
    if k < 2:
        raise InvalidArgument("k must be at least 2")
    a = -(-n // k)
    if a < 2:
        raise InvalidArgument(f"ceil(n/k) = {a} < 2: sets would be empty")
    _check_cap(comb(n, a), cap, f"coloring family (n={n}, k={k})")
    board = complete_graph_board(n)
    stars = _Stars(board)
    sets = tuple(stars.inside(A, n) for A in combinations(range(n), a))
    return Family((sets,), ("F1",), {"kind": "coloring", "n": n, "k": k})


def pancyclicity_families(n: int, c: float = 700.0, cap: int = DEFAULT_CAP) -> Family:
    """Three groups: E(A) with |A|=sqrt n, stars E(a, B) with |B| = n - c sqrt n,
    and E(A, B) with |A|=|B|=sqrt n.

    ``sqrt n`` is rounded up. When ``c`` makes the second group empty it is
    lowered to 1 (then to the largest feasible value) and the family's
    ``meta["c_lowered"]`` is set.
    """
    root = math.isqrt(n - 1) + 1 if n > 1 else 1
    c_used, lowered = c, False

    def b_size(cc):
        return n - _round(cc * math.sqrt(n))

    if b_size(c_used) < 1:
        lowered = True
        c_used = 1.0
        if b_size(c_used) < 1:
            c_used = (n - 1) / math.sqrt(n)
            while b_size(c_used) < 1:
                c_used *= 0.9
    bsz = b_size(c_used)
    if root < 2 or 2 * root > n:
        raise InvalidArgument(f"n={n} too small for the pancyclicity families")
    counts = [comb(n, root), n * comb(n - 1, bsz), _bipartite_count(n, root, root)]
    _check_cap(sum(counts), cap, f"pancyclicity families (n={n})")
    board = complete_graph_board(n)
    stars = _Stars(board)
    f1 = tuple(stars.inside(A, n) for A in combinations(range(n), root))
    f2 = tuple(_bipartite_group(board, stars, 1, bsz))
    f3 = tuple(_bipartite_group(board, stars, root, root))
    return Family((f1, f2, f3), ("F1", "F2", "F3"),
                  {"kind": "pancyclicity", "n": n, "c": c, "c_used": c_used,
                   "c_lowered": lowered, "root": root, "b_size": bsz})


# -- explicit winning families --------------------------------------------------


def _prufer_edges(seq, n):
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [v for v in range(n) if degree[v] == 1]
    edges.append((u, w))
    return edges


def spanning_tree_family(n: int, cap: int = DEFAULT_CAP) -> Family:
    """Every spanning tree of K_n (decoded from Pruefer sequences)."""
    board = complete_graph_board(n)
    if n == 2:
        return Family(((1,),), ("trees",), {"kind": "connectivity", "n": n})
    _check_cap(n ** (n - 2), cap, f"spanning trees of K_{n}")
    from itertools import product

    sets = tuple(mask_of(board.edge_id(u, v) for u, v in _prufer_edges(seq, n))
                 for seq in product(range(n), repeat=n - 2))
    return Family((sets,), ("trees",), {"kind": "connectivity", "n": n})


def hamilton_cycle_family(n: int, cap: int = DEFAULT_CAP) -> Family:
    if n < 3:
        raise InvalidArgument("Hamilton cycles need n >= 3")
    _check_cap(math.factorial(n - 1) // 2, cap, f"Hamilton cycles of K_{n}")
    board = complete_graph_board(n)
    sets = []
    for perm in permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        cyc = (0,) + perm
        sets.append(mask_of(board.edge_id(cyc[i], cyc[(i + 1) % n]) for i in range(n)))
    return Family((tuple(sets),), ("cycles",), {"kind": "hamilton", "n": n})


def copies_family(h: SimpleGraph, n: int, cap: int = DEFAULT_CAP) -> Family:
    """All copies of ``h`` in K_n."""
    board = complete_graph_board(n)
    cps = copies(h, SimpleGraph.complete(n))
    _check_cap(len(cps), cap, f"copies of H in K_{n}")
    sets = tuple(mask_of(board.edge_id(u, v) for u, v in c.edges) for c in cps)
    return Family((sets,), ("copies",), {"kind": "hgame", "n": n, "H": h.to_json()})


# -- monotone property families ------------------------------------------------


def _nx_graph(g: SimpleGraph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from(g.edges)
    return out


def _edges_to_mask(board: Board, edges) -> int:
    return mask_of(board.edge_id(u, v) for u, v in edges)


def wilson_tree(adj: Sequence[Sequence[int]], rng: random.Random) -> list[tuple[int, int]]:
    """A uniform spanning tree of a connected graph via loop-erased random
    walks (Wilson's algorithm). networkx's sampler is far slower here."""
    n = len(adj)
    in_tree = [False] * n
    nxt = [-1] * n
    root = rng.randrange(n)
    in_tree[root] = True
    for start in range(n):
        u = start
        while not in_tree[u]:
            nxt[u] = rng.choice(adj[u])
            u = nxt[u]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    return [(min(v, nxt[v]), max(v, nxt[v])) for v in range(n) if v != root]


def spanning_tree_witnesses(board: Board, cap: int = 256, rng: random.Random | None = None) -> list[int]:
    """All spanning trees of the board graph if there are at most ``cap`` of
    them, otherwise ``cap`` uniform samples (duplicates dropped)."""
    g = board.graph()
    if not is_connected(g):
        return []
    G = _nx_graph(g)
    count = round(nx.number_of_spanning_trees(G))
    if count <= cap:
        return sorted({_edges_to_mask(board, t.edges()) for t in nx.SpanningTreeIterator(G)})
    rng = rng or random.Random(0)
    adj = [sorted(G.neighbors(v)) for v in range(g.n)]
    return sorted({_edges_to_mask(board, wilson_tree(adj, rng)) for _ in range(cap)})


def hamilton_cycle_witnesses(board: Board, cap: int = 256, rng=None) -> list[int]:
    g = board.graph()
    out = []
    for cyc in nx.simple_cycles(_nx_graph(g), length_bound=g.n):
        if len(cyc) == g.n:
            out.append(_edges_to_mask(board, ((cyc[i], cyc[(i + 1) % g.n]) for i in range(g.n))))
            if len(out) >= cap:
                break
    return sorted(set(out))


def copy_witnesses(board: Board, h: SimpleGraph, cap: int = 100_000, rng=None) -> list[int]:
    cps = copies(h, board.graph())
    return sorted({_edges_to_mask(board, c.edges) for c in cps[:cap]})


def _not_colorable(k: int, g: SimpleGraph) -> bool:
    return not chromatic_number_at_most(g, k)


def _has_copy(h: SimpleGraph, g: SimpleGraph) -> bool:
    return contains_copy(h, g)[0]


@dataclass(frozen=True)
class GraphPropertyFamily:
    name: str
    n: int
    predicate: Callable[[SimpleGraph], bool]
    witness_fn: Callable | None = None
    min_size: int | None = None
    params: dict = field(default_factory=dict, compare=False, hash=False)

    names = ("witnesses",)

    def holds(self, board: Board, mask: int | None = None) -> bool:
        return self.predicate(board.graph(mask))

    def restrict(self, board: Board):
        return self if self.holds(board) else Family.empty()

    def is_empty(self) -> bool:
        return False

    def survivor_counts(self) -> tuple[int, ...]:
        return (1,)

    def completed_by(self, board: Board, maker_mask: int) -> bool:
        return self.holds(board, maker_mask)

    def witnesses(self, board: Board, cap: int = 256, rng=None) -> list[int]:
        if self.witness_fn is None:
            raise InvalidArgument(f"{self.name} family has no explicit witnesses")
        return self.witness_fn(board, cap=cap, rng=rng)

    def validate_on(self, board: Board) -> None:
        if board.n != self.n or not board.is_graph:
            raise InvalidArgument(f"{self.name} family needs a K_{self.n} edge board")

    def min_set_size(self) -> int | None:
        return self.min_size


def connectivity_family(n: int) -> GraphPropertyFamily:
    return GraphPropertyFamily("connectivity", n, is_connected, spanning_tree_witnesses, n - 1)


def hamilton_family(n: int) -> GraphPropertyFamily:
    return GraphPropertyFamily("hamilton", n, is_hamiltonian, hamilton_cycle_witnesses, n)


def non_colorability_family(n: int, k: int) -> GraphPropertyFamily:
    return GraphPropertyFamily(f"non-{k}-colorability", n, partial(_not_colorable, k), None, 3,
                               {"k": k})


def h_game_family(n: int, h: SimpleGraph) -> GraphPropertyFamily:
    return GraphPropertyFamily("hgame", n, partial(_has_copy, h), partial(copy_witnesses, h=h),
                               h.m, {"H": h.to_json()})


def pancyclicity_family(n: int) -> GraphPropertyFamily:
    return GraphPropertyFamily("pancyclicity", n, is_pancyclic, None, n)


# -- parameter formulas --------------------------------------------------------


class GammaResult(NamedTuple):
    game: str
    gamma: float
    valid: bool


def gamma_calculator(game: str, n: float, b: int, *, eps: float | None = None,
                     k: int | None = None, m2: float | None = None) -> GammaResult:
    """The stage-loss exponent used by Maker's multistage strategy for each game.

    ``valid`` is true when the value lies in (0, 1); at small ``n`` it does not.
    """
    logb = math.log(n) / math.log(b + 1)
    common = math.log(b) + math.log(logb) + 5
    ln = math.log(n)
    if game == "hamilton":
        if eps is None:
            raise InvalidArgument("hamilton needs eps")
        den = (1 - eps) * ln - 2 * math.log(ln) - math.log(2)
        num = 2 * common
    elif game == "coloring":
        if k is None:
            raise InvalidArgument("coloring needs k")
        den = ln - 2 * math.log(k) - math.log(4) - math.log(math.log(2))
        num = 2 * common
    elif game == "hgame":
        if m2 is None:
            raise InvalidArgument("hgame needs m2")
        den = ln - 2 * float(m2) * math.log(ln)
        num = 2 * float(m2) * common
    elif game == "pancyclicity":
        den = math.log(math.sqrt(n)) - math.log(ln) - math.log(3000)
        num = 2 * common
    else:
        raise InvalidArgument(f"unknown game {game!r}")
    gamma = num / den if den != 0 else math.inf
    return GammaResult(game, gamma, den > 0 and 0 < gamma < 1)
