import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from multistage._bits import bits, mask_of, popcount
from multistage.baselines import RandomBreaker
from multistage.core import Board, Family, complete_graph_board
from multistage.engine import play_multistage
from multistage.errors import DegenerateParameters, InvalidArgument, InvalidState
from multistage.families import coloring_family, non_colorability_family
from multistage.potential import (
    PotentialConfig,
    PotentialMaker,
    PotentialState,
    bd1_residual,
    biased_discrepancy_config,
    check_lemma22_criterion,
    discrepancy_parameters,
    epsilon_from_mu,
    retention_precondition,
    multistage_discrepancy_controller,
    potential_breaker_update,
    potential_choice,
    potential_maker_move,
    scratch_potentials,
)

from conftest import random_family

CONF = PotentialConfig(0.3, 0.5, 1)


def assert_matches_scratch(state, rel=1e-10):
    ref = scratch_potentials(state.sets, state.config, state.maker_mask, state.breaker_mask)
    np.testing.assert_allclose(state.phi, ref, rtol=rel)
    for e in range(len(state.elem)):
        expect = math.fsum(p for m, p in zip(state.sets, ref) if (m >> e) & 1)
        assert state.element_potential(e) == pytest.approx(expect, rel=rel, abs=1e-300)


def test_maker_prefers_shared_element():
    a, b, c = 0, 1, 2
    st_ = PotentialState([mask_of([a, b]), mask_of([b, c])], CONF, 0b111)
    assert potential_maker_move(st_) == b
    assert st_.maker_mask == 1 << b


def test_maker_tie_breaks_to_smallest_id():
    st_ = PotentialState([mask_of([3, 5, 7])], CONF, mask_of(range(8)))
    assert st_.best_element() == 3
    st_.claim_breaker(3)
    assert st_.best_element() == 5


def test_breaker_update_scales_and_matches_scratch():
    st_ = PotentialState([mask_of([0, 1]), mask_of([1, 2])], PotentialConfig(0.3, 0.5, 1), 0b1111)
    before = st_.phi.copy()
    potential_breaker_update(st_, 0)
    assert st_.phi[0] == pytest.approx(before[0] * 1.5, rel=1e-15)
    assert st_.phi[1] == before[1]
    assert_matches_scratch(st_, 1e-12)
    snap = st_.phi.copy()
    potential_breaker_update(st_, 3)  # in no set
    assert np.array_equal(snap, st_.phi)
    assert PotentialConfig(0.2, 0.37, 1).breaker_factor == 1.37
    with pytest.raises(InvalidState):
        potential_breaker_update(st_, 0)


@pytest.mark.parametrize("b", [1, 2, 3])
def test_breaker_updates_match_scratch(b):
    rng = random.Random(b)
    fam = random_family(rng, 12, 20, 2, 6)
    st_ = PotentialState(fam.masks(), PotentialConfig(0.2, 0.3, b), mask_of(range(12)))
    for e in rng.sample(range(12), 6):
        potential_breaker_update(st_, e)
        assert_matches_scratch(st_)


def test_no_free_element():
    st_ = PotentialState([1], CONF, 1)
    st_.claim_maker(0)
    with pytest.raises(InvalidState):
        potential_maker_move(st_)


@given(st.integers(2, 14), st.integers(1, 3), st.floats(0.05, 0.95), st.floats(0, 1), st.integers(0, 10 ** 6))
def test_incremental_equals_scratch_through_a_game(size, b, mu, alpha, seed):
    rng = random.Random(seed)
    fam = random_family(rng, size, rng.randint(1, 10), 1, size)
    conf = PotentialConfig(alpha, mu, b)
    st_ = PotentialState(fam.masks(), conf, mask_of(range(size)))
    while st_.free_mask:
        e = st_.best_element()
        assert e == potential_choice(st_.sets, conf, st_.free_mask, st_.maker_mask, st_.breaker_mask)
        total = st_.total
        st_.claim_maker(e)
        for _ in range(b):
            if st_.free_mask:
                st_.claim_breaker(rng.choice(bits(st_.free_mask)))
        assert_matches_scratch(st_)
        # greedy Maker: a full round never raises the total potential
        assert st_.total <= total * (1 + 1e-9)


def test_potential_criterion_examples():
    r = check_lemma22_criterion([10], PotentialConfig(0.0, 0.3, 1))
    assert r.holds and r.sum == pytest.approx(1.3 ** -10)
    assert not check_lemma22_criterion([2] * 1000, PotentialConfig(0.3, 0.25, 1)).holds
    conf = PotentialConfig(0.3, 0.25, 1)
    mpmath.mp.dps = 50
    lam = (1 + mpmath.mpf("0.25")) ** (1 - mpmath.mpf("0.3")) * (1 - mpmath.mpf("0.25")) ** mpmath.mpf("0.3")
    expect = float(lam ** -20)
    assert check_lemma22_criterion(Family.single([range(20)]), conf).sum == pytest.approx(expect, rel=1e-12)


def bd1_root(mu, b):
    def f(e):
        return (1 / (b + 1) + e / b) * math.log1p(mu) + (1 / (b + 1) - e) * math.log1p(-mu) - mu * mu
    return brentq(f, 0.0, 2 * mu + 1, xtol=1e-15)


def test_epsilon_from_mu_value():
    eps = epsilon_from_mu(0.25, 1)
    assert eps == pytest.approx(bd1_root(0.25, 1), abs=1e-12)
    assert round(eps, 4) == 0.1855
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(InvalidArgument):
            epsilon_from_mu(bad, 1)


@given(st.floats(1e-4, 0.999), st.integers(1, 50))
def test_epsilon_identity_and_bound(mu, b):
    eps = epsilon_from_mu(mu, b)
    assert 0 < eps < 2 * mu
    assert bd1_residual(mu, b, eps) < 1e-10
    assert eps == pytest.approx(bd1_root(mu, b), rel=1e-8)


def test_biased_discrepancy_config_values():
    conf = biased_discrepancy_config(0.5, 1)
    assert conf.mu == 0.25
    assert conf.alpha == pytest.approx(0.5 - bd1_root(0.25, 1), abs=1e-12)
    assert round(conf.alpha, 4) == 0.3145
    assert conf.lam == pytest.approx(math.exp(0.25 ** 2), rel=1e-12)
    assert biased_discrepancy_config(1e-4, 1).alpha == pytest.approx(0.5, abs=1e-3)
    with pytest.raises(DegenerateParameters) as exc:
        biased_discrepancy_config(0.9, 2)
    assert exc.value.diagnostics["alpha"] <= 0


def test_alpha_exceeds_target_on_grid():
    checked = 0
    for b in range(1, 8):
        for delta in np.linspace(0.01, 0.99, 50):
            try:
                conf = biased_discrepancy_config(float(delta), b)
            except DegenerateParameters:
                continue
            assert conf.alpha > 1 / (b + 1) - delta
            checked += 1
    assert checked > 150


@given(st.lists(st.tuples(st.integers(1, 40), st.integers(1, 400)), min_size=1, max_size=4),
       st.floats(0.1, 0.9), st.integers(1, 4))
def test_retention_precondition_implies_criterion(groups, delta, b):
    s = len(groups)
    sizes = []
    for count, bump in groups:
        k = math.floor(4 / delta ** 2 * math.log(s * count)) + 1
        sizes.append([k + (bump % 7) * (i % 2) for i in range(count)])
    assert retention_precondition(sizes, delta)
    try:
        conf = biased_discrepancy_config(delta, b)
    except DegenerateParameters:
        return
    assert check_lemma22_criterion([x for g in sizes for x in g], conf).holds


def test_discrepancy_parameters_coloring_n8():
    fam = coloring_family(8, 2)
    sizes = [[popcount(m) for m in g] for g in fam.groups]
    p = discrepancy_parameters(sizes, 0.5, 1)
    r = 6 / math.log(70)
    assert p.k == (6,) and p.counts == (70,)
    assert p.t == pytest.approx(0.5 * math.log2(r))
    assert p.delta == pytest.approx(4 * r ** -0.25)
    assert p.cond_a == (True,)
    assert p.cond_b == (r ** 0.25 >= 20 * max(1, math.log2(r)),) == (False,)
    with pytest.raises(DegenerateParameters) as exc:
        multistage_discrepancy_controller(fam, 0.5, 1)
    assert exc.value.diagnostics["delta"] >= 1


def test_controller_leftover_family_and_retention():
    fam = coloring_family(8, 2)
    maker = multistage_discrepancy_controller(fam, 0.5, 1, delta=0.5)
    board = complete_graph_board(8)
    tr = play_multistage(board, non_colorability_family(8, 2), 1, maker, RandomBreaker(3),
                         max_stages=3, continue_when_empty=True)
    assert len(maker.retention) == len(tr.stages)
    # leftover family on stage 2's board keeps one entry per original set
    x1 = 0
    for mv in tr.stages[0].moves:
        if mv.player.value == "maker":
            x1 |= mask_of(mv.elements)
    maker.start_stage(board.restrict(x1), None, 1, 2)
    left = [m & x1 for m in fam.masks()]
    assert maker._state.sets == [m for m in left if m]
    assert len(left) == 70
    for rec in maker.retention:
        if rec["precondition"]:
            a = maker.config.alpha
            assert all(ka >= kb * a for kb, ka in zip(rec["k_before"], rec["k_after"]))


def test_potential_maker_on_fixed_sets_reaches_alpha_fraction():
    conf = PotentialConfig(0.25, 0.3, 1)
    sets = [mask_of(range(i, i + 30)) for i in (0, 10)]
    assert check_lemma22_criterion([30, 30], conf).holds
    maker = PotentialMaker(conf, sets=sets)
    board = Board.abstract(40)
    tr = play_multistage(board, Family.single([range(40)]), 1, maker, RandomBreaker(1), max_stages=1,
                         continue_when_empty=True)
    owned = 0
    for mv in tr.stages[0].moves:
        if mv.player.value == "maker":
            owned |= mask_of(mv.elements)
    assert all(popcount(m & owned) >= conf.alpha * 30 for m in sets)


def test_potential_maker_rejects_wrong_bias():
    with pytest.raises(InvalidArgument):
        play_multistage(Board.abstract(4), Family.single([[0, 1]]), 2, PotentialMaker(CONF), RandomBreaker(0))
