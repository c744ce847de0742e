import pytest
from hypothesis import given
from hypothesis import strategies as st

from multistage._bits import bits, mask_of
from multistage.core import (
    Board,
    Family,
    GameState,
    Owner,
    Player,
    Variant,
    apply_move,
    complete_graph_board,
    family_stats,
    reduce_stage,
)
from multistage.errors import IllegalMove, InvalidArgument, InvalidState
from multistage.families import coloring_family, hamilton_families


@pytest.mark.parametrize("n,size", [(2, 1), (4, 6), (16, 120)])
def test_complete_graph_board_sizes(n, size):
    b = complete_graph_board(n)
    assert b.size == size
    assert b.n == n


def test_complete_graph_board_order_is_lexicographic():
    b = complete_graph_board(4)
    assert list(b.labels) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert b.edge_id(3, 1) == 4
    assert complete_graph_board(2).labels == ((0, 1),)


def test_complete_graph_board_rejects_tiny():
    with pytest.raises(InvalidArgument):
        complete_graph_board(1)


def test_board_restrict_keeps_ids_and_labels():
    b = complete_graph_board(4)
    r = b.restrict(mask_of([1, 4]))
    assert r.elements == (1, 4)
    assert r.label(4) == (1, 3)
    assert r.graph().edges == frozenset({(0, 2), (1, 3)})


def test_apply_move_basic_claims():
    s = GameState(Board.abstract(4), bias=2)
    s = apply_move(s, Player.MAKER, [0])
    assert s.owner(0) is Owner.MAKER
    s = apply_move(s, Player.BREAKER, [1, 2])
    assert s.owner(1) is Owner.BREAKER and s.owner(2) is Owner.BREAKER
    assert s.free == frozenset({3})
    assert [m.player for m in s.history] == [Player.MAKER, Player.BREAKER]


def test_apply_move_illegal_cases():
    s = GameState(Board.abstract(4), bias=1)
    with pytest.raises(IllegalMove):
        apply_move(s, Player.MAKER, [0, 1])
    s = apply_move(s, Player.MAKER, [0])
    with pytest.raises(IllegalMove):
        apply_move(s, Player.BREAKER, [0])
    with pytest.raises(IllegalMove):
        apply_move(s, Player.BREAKER, [1, 2])
    with pytest.raises(IllegalMove):
        apply_move(s, Player.BREAKER, [])
    s = apply_move(s, Player.BREAKER, [1])
    with pytest.raises(IllegalMove):
        apply_move(s, Player.MAKER, [1])
    with pytest.raises(IllegalMove):
        apply_move(s, Player.BREAKER, [2])


def test_breaker_may_under_claim_only_at_the_end():
    s = GameState(Board.abstract(2), bias=3)
    s = apply_move(s, Player.MAKER, [0])
    s = apply_move(s, Player.BREAKER, [1])
    assert s.exhausted()


def test_reduce_stage_standard_filter():
    s = GameState(Board.abstract(4), 1, maker_mask=mask_of([0, 1, 2]), breaker_mask=mask_of([3]))
    fam = Family.single([[0, 1], [1, 3]])
    red = reduce_stage(s, fam)
    assert red.next_family.sets() == [frozenset({0, 1})]
    assert red.next_board.elements == (0, 1, 2)


def test_reduce_stage_maker_owns_nothing():
    s = GameState(Board.abstract(2), 1, breaker_mask=3)
    red = reduce_stage(s, Family.single([[0]]))
    assert not red.alive and red.next_board.size == 0


def test_reduce_stage_stop_variant():
    s = GameState(Board.abstract(3), 1, maker_mask=1, breaker_mask=2)
    fam = Family.single([[0, 2], [0, 1]])
    with pytest.raises(InvalidState):
        reduce_stage(s, fam, Variant.STOP)
    fam2 = Family.single([[0], [0, 2], [0, 1]])
    red = reduce_stage(s, fam2, Variant.STOP)
    assert red.next_board.elements == (0, 2)
    assert red.next_family.sets() == [frozenset({0}), frozenset({0, 2})]


def test_reduce_stage_standard_mid_stage_is_invalid():
    s = GameState(Board.abstract(3), 1, maker_mask=1)
    with pytest.raises(InvalidState):
        reduce_stage(s, Family.single([[0]]))


def test_family_invariants():
    with pytest.raises(InvalidArgument):
        Family.single([[0], [0]])
    with pytest.raises(InvalidArgument):
        Family.single([[]])
    f = Family.from_sets([[[0, 1]], [[0, 1]]])
    assert len(f) == 2
    with pytest.raises(InvalidArgument):
        f.validate_on(Board.abstract(1))


def test_family_stats_examples():
    assert [tuple(g) for g in family_stats(Family.single([[0, 1], [2, 3, 4]]))] == [("F1", 2, 2)]
    assert family_stats(coloring_family(8, 2))[0][1:] == (6, 70)
    with pytest.raises(InvalidArgument):
        family_stats(Family(((),), ("F1",)))


def test_family_stats_hamilton_first_group():
    st1 = family_stats(hamilton_families(16, 0.5))[0]
    assert st1.k == 14


@st.composite
def games(draw):
    size = draw(st.integers(1, 10))
    b = draw(st.integers(1, 3))
    order = draw(st.permutations(range(size)))
    return size, b, order


@given(games())
def test_ownership_monotone_and_standard_reduction_is_subset_filter(g):
    size, b, order = g
    sets = [mask_of(order[i:i + 2]) for i in range(0, size - 1)]
    fam = Family((tuple(dict.fromkeys(sets)),), ("F1",)) if sets else Family.empty()
    s = GameState(Board.abstract(size), b)
    prev_m = prev_b = 0
    while s.free_mask:
        if s.to_move is Player.MAKER:
            s = apply_move(s, Player.MAKER, [next(e for e in order if (s.free_mask >> e) & 1)])
        else:
            take = [e for e in order if (s.free_mask >> e) & 1][:b]
            s = apply_move(s, Player.BREAKER, take)
        assert s.maker_mask & prev_m == prev_m and s.breaker_mask & prev_b == prev_b
        prev_m, prev_b = s.maker_mask, s.breaker_mask
    red = reduce_stage(s, fam)
    expect = [m for m in fam.masks() if not m & ~s.maker_mask]
    assert red.next_family.masks() == expect
    # maximal play: Maker ends with ceil(|X|/(b+1)) elements
    assert len(bits(s.maker_mask)) == -(-size // (b + 1))
