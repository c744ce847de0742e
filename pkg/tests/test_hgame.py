import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multistage._bits import mask_of, popcount
from multistage.baselines import GreedyMaker, RandomMaker
from multistage.core import complete_graph_board
from multistage.engine import play_multistage, replay_trace
from multistage.errors import FamilyTooLarge, InvalidArgument
from multistage.families import copies_family
from multistage.graphs import SimpleGraph, copies, k_collections, max_2_density
from multistage.hgame import (
    HGameBreaker,
    derive_bunch_parameters,
    enumerate_bunch_family,
    min_delta_for,
)

K3 = SimpleGraph.complete(3)


def brute_bunches(n, k, t):
    """All chains of copies (any order), unpruned; returns the edge sets."""
    board = complete_graph_board(n)
    cps = [(frozenset(c.vertices), mask_of(board.edge_id(u, v) for u, v in c.edges))
           for c in copies(k, SimpleGraph.complete(n))]
    lo, hi = t * k.n, (t + 1) * k.n
    out = set()

    def grow(vs, em, used):
        if lo <= len(vs) <= hi:
            out.add(em)
        for i, (cv, ce) in enumerate(cps):
            if i in used or len(cv & vs) < 2 or not cv - vs or len(vs | cv) > hi:
                continue
            grow(vs | cv, em | ce, used | {i})

    for i, (cv, ce) in enumerate(cps):
        grow(cv, ce, {i})
    return out


def test_no_bunch_fits_small_board():
    fam = enumerate_bunch_family(5, K3, 2, 0.75)
    assert fam.masks == () and fam.density_ok


def test_t1_on_k4_matches_brute_force():
    fam = enumerate_bunch_family(4, K3, 1, 1.0)
    assert set(fam.masks) == brute_bunches(4, K3, 1)
    assert len(fam.masks) == 4 + 6
    assert {popcount(m) for m in fam.masks} == {3, 5}


@pytest.mark.parametrize("n,t", [(5, 1), (6, 1), (6, 2), (7, 2)])
def test_full_enumeration_matches_brute_force(n, t):
    fam = enumerate_bunch_family(n, K3, t, float(min_delta_for(K3, t)))
    assert set(fam.masks) == brute_bunches(n, K3, t)


@pytest.mark.parametrize("n,t", [(6, 2), (7, 2), (8, 2)])
def test_bunch_density_bound(n, t):
    delta = float(min_delta_for(K3, t))
    for minimal in ((False, True) if n <= 7 else (True,)):
        fam = enumerate_bunch_family(n, K3, t, delta, minimal_only=minimal)
        assert fam.masks and fam.density_ok
        assert fam.min_density >= max_2_density(K3) - Fraction(delta).limit_denominator(10 ** 9)


def test_minimal_bunches_are_subsets_of_full_ones():
    full = set(enumerate_bunch_family(7, K3, 2, 0.75).masks)
    mini = set(enumerate_bunch_family(7, K3, 2, 0.75, minimal_only=True).masks)
    assert mini <= full and len(mini) < len(full)


def test_min_delta_values():
    assert min_delta_for(K3, 2) == Fraction(3, 4)
    assert min_delta_for(K3, 1) == 1
    assert min_delta_for(SimpleGraph.complete(4), 2) == Fraction(5, 2) - Fraction(6 + Fraction(5, 2), 5)


def test_derived_parameters_fall_back_at_desk_scale():
    p = derive_bunch_parameters(K3, 0.5, 10)
    assert not p.feasible and not p.derived and p.t == 2 and p.delta == 0.75
    big = derive_bunch_parameters(K3, 0.5, 10 ** 6)
    assert big.feasible and big.derived
    m2 = 2.0
    lhs = (big.t + 2) * 3 / ((m2 - big.delta) * big.t * 3 - 1)
    assert lhs < 1 / (m2 - big.delta) + 0.5 / 4
    with pytest.raises(InvalidArgument):
        derive_bunch_parameters(K3, 0.0, 10)


def test_breaker_parameters():
    br = HGameBreaker(10, K3, 1, 0.5)
    assert br.phase1_stages == math.ceil((0.5 + 0.25) * math.log2(10)) == 3
    assert br.params.t == 2 and len(br.bunches.masks) > 0
    with pytest.raises(InvalidArgument):
        enumerate_bunch_family(6, SimpleGraph.from_edges(4, [(0, 1), (2, 3)]), 1, 0.5)


def test_full_enumeration_hits_cap():
    with pytest.raises(FamilyTooLarge):
        enumerate_bunch_family(8, K3, 2, 0.75, cap=1000)


@settings(max_examples=15)
@given(st.integers(6, 9), st.integers(0, 10 ** 6))
def test_phase_one_leaves_no_large_collection(n, seed):
    board = complete_graph_board(n)
    fam = copies_family(K3, n)
    br = HGameBreaker(n, K3, 1, 0.5)
    tr = play_multistage(board, fam, 1, RandomMaker(seed), br, max_stages=br.phase1_stages,
                         continue_when_empty=True)
    reds = replay_trace(tr, board, fam)
    g = reds[-1].next_board.graph()
    assert k_collections(g, K3).largest() < br.params.t * 3


def test_phase_two_on_planted_collections():
    n = 7
    board = complete_graph_board(n)
    strip = set()
    for i in range(n - 2):
        strip |= {(i, i + 1), (i, i + 2), (i + 1, i + 2)}
    sub = board.restrict(mask_of(board.edge_id(u, v) for u, v in strip))
    m = sub.size
    fam = copies_family(K3, n).restrict(sub)
    for seed in range(20):
        br = HGameBreaker(n, K3, 1, 0.5)
        br.phase1_stages = 0
        maker = RandomMaker(seed) if seed % 2 else GreedyMaker()
        tr = play_multistage(sub, fam, 1, maker, br)
        assert br.phase2_start_largest == n
        assert tr.tau_observed <= math.ceil(math.log2(m)) + 1
