import copy
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multistage._bits import bits, mask_of
from multistage.baselines import RandomMaker
from multistage.core import GameState, Player, apply_move, complete_graph_board, reduce_stage
from multistage.engine import play_multistage, replay_trace
from multistage.errors import InvariantViolation
from multistage.families import non_colorability_family
from multistage.forests import (
    ForestBreaker,
    ForestGroups,
    forest_breaker_move,
    greedy_forest_partition,
    is_forest_edges,
    regroup_forests,
)
from multistage.graphs import is_bipartite, is_forest
from multistage.lehman import initial_forest_partition


def cycle_board():
    board = complete_graph_board(4)
    e = board.edge_id
    return board, [[e(0, 1), e(2, 3)], [e(1, 2), e(0, 3)]]


def test_four_cycle_group_exhaustively():
    """Every Maker play on a 4-cycle split into two matchings leaves her acyclic."""
    full, forests = cycle_board()
    board = full.restrict(mask_of(forests[0] + forests[1]))

    def explore(groups, state):
        if not state.free_mask:
            assert is_forest(board.graph(state.maker_mask))
            return 1
        total = 0
        for e in bits(state.free_mask):
            g = _clone(groups, board)
            s = apply_move(state, Player.MAKER, [e])
            picks = forest_breaker_move(g, e, 1, s.free_mask)
            if s.free_mask:
                s = apply_move(s, Player.BREAKER, picks)
            g.check_locking()
            total += explore(g, s)
        return total

    groups = ForestGroups(board, forests, 1)
    assert len(groups.groups) == 1
    assert explore(groups, GameState(board, 1)) > 0


def _clone(groups, board):
    return copy.deepcopy(groups)


def test_four_cycle_answer_after_ab():
    full, forests = cycle_board()
    board = full.restrict(mask_of(forests[0] + forests[1]))
    groups = ForestGroups(board, forests, 1)
    ab = full.edge_id(0, 1)
    s = apply_move(GameState(board, 1), Player.MAKER, [ab])
    # no free edge lies inside {a, b}, so the leftover rule takes the lowest group edge
    assert forest_breaker_move(groups, ab, 1, s.free_mask) == (min(bits(s.free_mask)),)


def test_ignoring_the_urgent_edge_is_detected():
    board = complete_graph_board(3)
    e = board.edge_id
    groups = ForestGroups(board, [[e(0, 1), e(1, 2)], [e(0, 2)]], 1)
    assert groups.maker_claims(e(0, 1)) == []
    assert groups.maker_claims(e(1, 2)) == [e(0, 2)]
    with pytest.raises(InvariantViolation):
        groups.check_locking()
    with pytest.raises(InvariantViolation):
        groups.maker_claims(e(0, 2))


def test_each_other_forest_contributes_one_cycle_edge():
    board = complete_graph_board(4)
    e = board.edge_id
    sub = board.restrict(mask_of([e(0, 1), e(0, 2), e(1, 2), e(0, 3), e(1, 3)]))
    groups = ForestGroups(sub, [[e(0, 1)], [e(0, 2), e(1, 2)], [e(0, 3), e(1, 3)]], 2)
    assert groups.maker_claims(e(0, 1)) == [e(0, 2), e(0, 3)]


@pytest.mark.parametrize("k,b,groups_expected,next_bound", [(2, 1, 1, 1), (5, 2, 2, 2)])
def test_regroup_counts(k, b, groups_expected, next_bound):
    n = 2 * k
    board = complete_graph_board(n)
    forests = [[board.edge_id(u, v) for u, v in f] for f in initial_forest_partition(n)][:k]
    sub = board.restrict(mask_of(e for f in forests for e in f))
    groups = ForestGroups(sub, forests, b)
    assert len(groups.groups) == groups_expected
    assert [len(g.forests) for g in groups.groups] == [min(b + 1, k - i) for i in range(0, k, b + 1)]
    rng = random.Random(k)
    state = GameState(sub, b)
    while state.free_mask:
        e = rng.choice(bits(state.free_mask))
        state = apply_move(state, Player.MAKER, [e])
        picks = forest_breaker_move(groups, e, b, state.free_mask)
        if state.free_mask:
            state = apply_move(state, Player.BREAKER, picks)
        groups.check_locking()
    red = reduce_stage(state, non_colorability_family(n, 2))
    nxt = regroup_forests(groups, red, b)
    assert nxt.k <= math.ceil(k / (b + 1)) == next_bound
    assert all(is_forest_edges(board.labels, n, f) for f in groups.next_forests())


@pytest.mark.parametrize("n", [5, 8, 9, 12])
@pytest.mark.parametrize("b", [1, 2, 3])
def test_arboricity_bound_within_groups(n, b):
    board = complete_graph_board(n)
    forests = [[board.edge_id(u, v) for u, v in f] for f in initial_forest_partition(n)]
    groups = ForestGroups(board, forests, b)
    rng = random.Random(n * b)
    for g in groups.groups:
        edges = [board.labels[e] for f in g.forests for e in f]
        for _ in range(200):
            s = set(rng.sample(range(n), rng.randint(2, n)))
            spanned = sum(1 for u, v in edges if u in s and v in s)
            assert spanned <= len(g.forests) * (len(s) - 1) <= (b + 1) * (len(s) - 1)


def test_greedy_forest_partition_covers():
    board = complete_graph_board(7)
    fs = greedy_forest_partition(board)
    assert sorted(e for f in fs for e in f) == list(board.elements)
    assert all(is_forest_edges(board.labels, 7, f) for f in fs)


@given(st.integers(3, 13), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_forest_breaker_wins_non_colorability(n, b, seed):
    board = complete_graph_board(n)
    fam = non_colorability_family(n, 2)
    br = ForestBreaker()
    stages = math.ceil(math.log(n) / math.log(b + 1)) + 1
    tr = play_multistage(board, fam, b, RandomMaker(seed), br, max_stages=stages, continue_when_empty=True)
    reds = replay_trace(tr, board, fam)
    assert br.checks > 0 and tr.forfeit is None
    final = reds[-1].next_board.graph()
    assert is_forest(final) and is_bipartite(final)
    for k0, k1 in zip(br.k_history, br.k_history[1:]):
        assert k1 <= math.ceil(k0 / (b + 1))
