"""Exact graph predicates, density functionals and K-collection machinery.

Everything here is exact and guarded by hard size limits; these functions are
used as oracles by the strategy tests, so none of them is heuristic.
Vertex sets are handled as int bitmasks internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

from ._bits import DSU, iter_bits, popcount
from .errors import InvalidArgument, NoBunch, SizeLimitExceeded


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise InvalidArgument(f"loop at vertex {u}")
            if u > v:
                u, v = v, u
            if not 0 <= u < v < self.n:
                raise InvalidArgument(f"edge ({u}, {v}) out of range for n={self.n}")
            norm.add((u, v))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "SimpleGraph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def complete(cls, n: int) -> "SimpleGraph":
        return cls(n, frozenset(combinations(range(n), 2)))

    @classmethod
    def empty(cls, n: int) -> "SimpleGraph":
        return cls(n, frozenset())

    @classmethod
    def cycle(cls, n: int) -> "SimpleGraph":
        return cls(n, frozenset((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> "SimpleGraph":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def star(cls, leaves: int) -> "SimpleGraph":
        return cls(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)))

    @cached_property
    def adj(self) -> tuple[int, ...]:
        a = [0] * self.n
        for u, v in self.edges:
            a[u] |= 1 << v
            a[v] |= 1 << u
        return tuple(a)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (self.adj[u] >> v) & 1 == 1

    def induced_edge_count(self, vmask: int) -> int:
        return sum(popcount(self.adj[v] & vmask) for v in iter_bits(vmask)) // 2

    def induced(self, vertices: Iterable[int]) -> "SimpleGraph":
        """Induced subgraph relabeled to ``0..k-1`` in increasing vertex order."""
        vs = sorted(vertices)
        idx = {v: i for i, v in enumerate(vs)}
        return SimpleGraph(len(vs), frozenset((idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, d: dict) -> "SimpleGraph":
        return cls.from_edges(int(d["n"]), d["edges"])


def _check_limit(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise SizeLimitExceeded(f"{what} is exact only up to {limit} vertices (got {n})")


def _component(adj, start: int, allowed: int) -> int:
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= adj[v]
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_connected(g: SimpleGraph) -> bool:
    if g.n <= 1:
        return True
    full = (1 << g.n) - 1
    return _component(g.adj, 0, full) == full


def has_spanning_tree(g: SimpleGraph) -> bool:
    return is_connected(g)


def is_forest(g: SimpleGraph) -> bool:
    dsu = DSU(g.n)
    return all(dsu.union(u, v) for u, v in g.edges)


def is_bipartite(g: SimpleGraph) -> bool:
    return chromatic_number_at_most(g, 2, limit=max(g.n, 1))


def is_hamiltonian(g: SimpleGraph, limit: int = 20) -> bool:
    _check_limit(g.n, limit, "is_hamiltonian")
    n = g.n
    if n < 3:
        return False
    adj = g.adj
    if any(popcount(a) < 2 for a in adj) or not is_connected(g):
        return False
    full = (1 << n) - 1
    dead: set[tuple[int, int]] = set()

    def extend(v: int, visited: int) -> bool:
        if visited == full:
            return adj[v] & 1 == 1
        if (v, visited) in dead:
            return False
        rest = full & ~visited
        # every unvisited vertex still needs two usable neighbours
        usable = rest | 1 | (1 << v)
        for w in iter_bits(rest):
            if popcount(adj[w] & usable) < 2:
                dead.add((v, visited))
                return False
        for w in iter_bits(adj[v] & rest):
            if extend(w, visited | (1 << w)):
                return True
        dead.add((v, visited))
        return False

    return extend(0, 1)


def _bipartite(g: SimpleGraph) -> bool:
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for w in iter_bits(g.adj[v]):
                if side[w] < 0:
                    side[w] = 1 - side[v]
                    stack.append(w)
                elif side[w] == side[v]:
                    return False
    return True


def chromatic_number_at_most(g: SimpleGraph, k: int, limit: int = 20) -> bool:
    """Exact k-colourability; k = 2 is a linear-time bipartiteness test with
    no size limit, larger k backtracks on graphs up to ``limit`` vertices."""
    if k == 2:
        return _bipartite(g)
    _check_limit(g.n, limit, "chromatic_number_at_most")
    if k < 1:
        return g.n == 0
    if k >= g.n:
        return True
    order = sorted(range(g.n), key=lambda v: -g.degree(v))
    colors = [-1] * g.n
    adj = g.adj

    def assign(i: int, used: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        taken = {colors[w] for w in iter_bits(adj[v]) if colors[w] >= 0}
        for c in range(min(used + 1, k)):
            if c not in taken:
                colors[v] = c
                if assign(i + 1, max(used, c + 1)):
                    return True
                colors[v] = -1
        return False

    return assign(0, 0)


def independence_number(g: SimpleGraph, limit: int = 24) -> int:
    _check_limit(g.n, limit, "independence_number")
    adj = g.adj

    def best(cand: int) -> int:
        if not cand:
            return 0
        v = max(iter_bits(cand), key=lambda x: popcount(adj[x] & cand))
        if popcount(adj[v] & cand) == 0:
            return popcount(cand)
        without = best(cand & ~(1 << v))
        with_v = 1 + best(cand & ~(1 << v) & ~adj[v])
        return max(without, with_v)

    return best((1 << g.n) - 1)


def vertex_connectivity(g: SimpleGraph, limit: int = 14) -> int:
    """Smallest number of vertices whose removal disconnects ``g``; ``n-1`` for K_n."""
    _check_limit(g.n, limit, "vertex_connectivity")
    n = g.n
    if n <= 1:
        return 0
    full = (1 << n) - 1
    for k in range(0, n - 1):
        for cut in combinations(range(n), k):
            cmask = sum(1 << c for c in cut)
            rest = full & ~cmask
            start = (rest & -rest).bit_length() - 1
            if _component(g.adj, start, rest) != rest:
                return k
    return n - 1


def has_cycle_of_length(g: SimpleGraph, length: int) -> bool:
    n, adj = g.n, g.adj
    if length < 3 or length > n:
        return False

    def walk(start: int, v: int, visited: int, depth: int) -> bool:
        if depth == length:
            return (adj[v] >> start) & 1 == 1
        allowed = adj[v] & ~visited & ~((1 << (start + 1)) - 1)
        for w in iter_bits(allowed):
            if walk(start, w, visited | (1 << w), depth + 1):
                return True
        return False

    return any(walk(s, s, 1 << s, 1) for s in range(n - length + 1))


def is_pancyclic(g: SimpleGraph, limit: int = 14) -> bool:
    _check_limit(g.n, limit, "is_pancyclic")
    if g.n < 3:
        return False
    return all(has_cycle_of_length(g, length) for length in range(3, g.n + 1))


# -- subgraph containment ---------------------------------------------------


class Copy(NamedTuple):
    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]]


def _search_order(h: SimpleGraph) -> list[int]:
    order: list[int] = []
    placed = 0
    remaining = set(range(h.n))
    while remaining:
        linked = [v for v in remaining if h.adj[v] & placed]
        pool = linked or list(remaining)
        v = max(pool, key=lambda x: (popcount(h.adj[x] & placed), h.degree(x), -x))
        order.append(v)
        placed |= 1 << v
        remaining.discard(v)
    return order


def embeddings(h: SimpleGraph, g: SimpleGraph, limit: int = 8) -> Iterator[dict[int, int]]:
    """All injective maps V(h) -> V(g) sending edges to edges."""
    _check_limit(h.n, limit, "subgraph search (pattern)")
    if h.n > g.n:
        return
    order = _search_order(h)
    gdeg = [g.degree(v) for v in range(g.n)]
    allg = (1 << g.n) - 1
    image = [-1] * h.n

    def rec(i: int, used: int):
        if i == len(order):
            yield dict(enumerate(image))
            return
        x = order[i]
        cand = allg & ~used
        for y in iter_bits(h.adj[x]):
            if image[y] >= 0:
                cand &= g.adj[image[y]]
        dx = h.degree(x)
        for v in iter_bits(cand):
            if gdeg[v] >= dx:
                image[x] = v
                yield from rec(i + 1, used | (1 << v))
                image[x] = -1

    yield from rec(0, 0)


def contains_copy(h: SimpleGraph, g: SimpleGraph, limit: int = 8) -> tuple[bool, dict[int, int] | None]:
    for emb in embeddings(h, g, limit):
        return True, emb
    return False, None


def count_embeddings(h: SimpleGraph, g: SimpleGraph, limit: int = 8) -> int:
    return sum(1 for _ in embeddings(h, g, limit))


def copies(h: SimpleGraph, g: SimpleGraph, limit: int = 8) -> list[Copy]:
    """Distinct copies of ``h`` in ``g`` (as vertex set + edge set), sorted."""
    seen: set[Copy] = set()
    for emb in embeddings(h, g, limit):
        es = frozenset(tuple(sorted((emb[u], emb[v]))) for u, v in h.edges)
        seen.add(Copy(frozenset(emb.values()), es))
    return sorted(seen, key=lambda c: (sorted(c.vertices), sorted(c.edges)))


# -- densities ---------------------------------------------------------------


def max_density(h: SimpleGraph, limit: int = 12) -> Fraction:
    _check_limit(h.n, limit, "max_density")
    if h.n == 0:
        raise InvalidArgument("max_density needs at least one vertex")
    best = Fraction(0)
    for vmask in range(1, 1 << h.n):
        best = max(best, Fraction(h.induced_edge_count(vmask), popcount(vmask)))
    return best


def two_density(h: SimpleGraph) -> Fraction:
    if h.n < 3:
        raise InvalidArgument("2-density needs at least three vertices")
    return Fraction(h.m - 1, h.n - 2)


def max_2_density(h: SimpleGraph, limit: int = 12) -> Fraction:
    _check_limit(h.n, limit, "max_2_density")
    if h.n < 3:
        raise InvalidArgument("max_2_density needs at least three vertices")
    best = None
    for vmask in range(1, 1 << h.n):
        v = popcount(vmask)
        if v >= 3:
            d = Fraction(h.induced_edge_count(vmask) - 1, v - 2)
            if best is None or d > best:
                best = d
    return best


def choose_k(h: SimpleGraph, limit: int = 12) -> SimpleGraph:
    """A connected subgraph ``K`` of ``h`` with ``d_2(K) = m_2(h)``, as small as possible."""
    target = max_2_density(h, limit)
    found = []
    for vmask in range(1, 1 << h.n):
        v = popcount(vmask)
        if v < 3 or Fraction(h.induced_edge_count(vmask) - 1, v - 2) != target:
            continue
        sub = h.induced(iter_bits(vmask))
        found.append((not is_connected(sub), v, tuple(iter_bits(vmask)), sub))
    found.sort(key=lambda t: t[:3])
    return found[0][3]


# -- K-collections and bunches -------------------------------------------------


@dataclass(frozen=True)
class Collection:
    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]]
    copies: tuple[Copy, ...]

    @property
    def v(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class CollectionReport:
    collections: tuple[Collection, ...]

    def __len__(self):
        return len(self.collections)

    def __iter__(self):
        return iter(self.collections)

    def largest(self) -> int:
        return max((c.v for c in self.collections), default=0)


def k_collections(g: SimpleGraph, k: SimpleGraph, limit: int = 8) -> CollectionReport:
    cps = copies(k, g, limit)
    dsu = DSU(len(cps))
    for i, j in combinations(range(len(cps)), 2):
        if len(cps[i].vertices & cps[j].vertices) >= 2:
            dsu.union(i, j)
    comps: dict[int, list[Copy]] = {}
    for i, c in enumerate(cps):
        comps.setdefault(dsu.find(i), []).append(c)
    out = []
    for members in comps.values():
        vs = frozenset().union(*(c.vertices for c in members))
        es = frozenset().union(*(c.edges for c in members))
        out.append(Collection(vs, es, tuple(members)))
    out.sort(key=lambda c: sorted(c.vertices))
    return CollectionReport(tuple(out))


@dataclass(frozen=True)
class BunchCertificate:
    copies: tuple[Copy, ...]

    @property
    def s(self) -> int:
        return len(self.copies)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset().union(*(c.vertices for c in self.copies))

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset().union(*(c.edges for c in self.copies))

    @property
    def v(self) -> int:
        return len(self.vertices)

    @property
    def e(self) -> int:
        return len(self.edges)

    def is_valid(self) -> bool:
        """Check the chain condition copy by copy."""
        if not self.copies:
            return False
        seen = set(self.copies[0].vertices)
        for c in self.copies[1:]:
            if not (c.vertices - seen) or len(c.vertices & seen) < 2:
                return False
            seen |= c.vertices
        return True


def extract_bunch(collection: Collection, k: SimpleGraph, t: int) -> BunchCertificate:
    target = t * k.n
    if collection.v < target:
        raise NoBunch(f"collection has {collection.v} < t*v(K) = {target} vertices")
    pool = list(collection.copies)
    chain = [pool[0]]
    covered = set(pool[0].vertices)
    while len(covered) < target:
        for c in pool:
            if c.vertices - covered and len(c.vertices & covered) >= 2:
                chain.append(c)
                covered |= c.vertices
                break
        else:
            raise NoBunch("collection copies do not chain; not a K-collection")
    return BunchCertificate(tuple(chain))


def bunch_density(bunch: BunchCertificate | SimpleGraph) -> Fraction:
    if isinstance(bunch, BunchCertificate):
        return Fraction(bunch.e, bunch.v)
    touched = {x for e in bunch.edges for x in e}
    return Fraction(bunch.m, len(touched))


# -- sufficient conditions -----------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    p1: bool
    p2: bool
    witness_p1: object = None
    witness_p2: object = None
    params: dict | None = None

    @property
    def ok(self) -> bool:
        return self.p1 and self.p2


def _neighbourhood(adj, smask: int) -> int:
    out = 0
    for v in iter_bits(smask):
        out |= adj[v]
    return out & ~smask


def check_hamilton_conditions(g: SimpleGraph, exp_factor: float | None = None,
                              set_bound: float | None = None, cut_size: int | None = None,
                              limit: int = 14) -> ConditionReport:
    """Expansion (P1) and cut (P2) conditions, enumerated exactly.

    Defaults follow the large-n choices ``ln ln n``, ``n / ln n`` and
    ``round(n / ln n)``; pass explicit values for desk-scale experiments.
    """
    _check_limit(g.n, limit, "check_hamilton_conditions")
    n = g.n
    if n < 3:
        raise InvalidArgument("conditions need n >= 3")
    ln = math.log(n)
    if exp_factor is None:
        exp_factor = math.log(ln)
    if set_bound is None:
        set_bound = n / ln
    if cut_size is None:
        cut_size = max(1, round(n / ln))
    adj = g.adj
    p1, w1 = True, None
    for size in range(1, min(n, math.floor(set_bound)) + 1):
        for s in combinations(range(n), size):
            smask = sum(1 << v for v in s)
            if popcount(_neighbourhood(adj, smask)) < exp_factor * size:
                p1, w1 = False, list(s)
                break
        if not p1:
            break
    p2, w2 = True, None
    full = (1 << n) - 1
    if 2 * cut_size <= n:
        for a in combinations(range(n), cut_size):
            amask = sum(1 << v for v in a)
            reach = 0
            for v in a:
                reach |= adj[v]
            avoid = full & ~amask & ~reach
            if popcount(avoid) >= cut_size:
                p2 = False
                w2 = (list(a), list(iter_bits(avoid))[:cut_size])
                break
    params = {"exp_factor": exp_factor, "set_bound": set_bound, "cut_size": cut_size}
    return ConditionReport(p1, p2, w1, w2, params)


def check_pancyclicity_conditions(g: SimpleGraph, c: float = 600.0, limit: int = 14) -> ConditionReport:
    """Independence (P1: alpha <= sqrt n) and connectivity (P2: kappa >= c sqrt n)."""
    _check_limit(g.n, limit, "check_pancyclicity_conditions")
    root = math.sqrt(g.n)
    alpha = independence_number(g, limit)
    kappa = vertex_connectivity(g, limit)
    params = {"c": c, "alpha": alpha, "kappa": kappa}
    return ConditionReport(alpha <= root, kappa >= c * root, alpha, kappa, params)
