"""Potential-function Maker: the alpha-fraction criterion, the discrepancy
parameters derived from a target loss delta, and the multistage controller.

For a configuration (alpha, mu, b) every winning set F carries the potential

    phi(F) = (1+mu)^((|F & Y| - (1-alpha)|F|) / b) * (1-mu)^(|F & X| - alpha|F|)

where X and Y are Maker's and Breaker's claims. Maker claims the free element
whose incident potentials sum highest. A Maker claim multiplies the potential
of each set containing it by (1 - mu), a Breaker claim by (1 + mu)^(1/b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._bits import incidence_matrix, iter_bits, popcount
from .core import Board, GameState, Move, Player, StageReduction
from .engine import Strategy
from .errors import DegenerateParameters, InvalidArgument, InvalidState

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PotentialConfig:
    alpha: float
    mu: float
    b: int

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise InvalidArgument(f"alpha={self.alpha} outside [0, 1]")
        if not 0 < self.mu < 1:
            raise InvalidArgument(f"mu={self.mu} outside (0, 1)")
        if self.b < 1:
            raise InvalidArgument("b must be a positive integer")

    @property
    def lam(self) -> float:
        return (1 + self.mu) ** ((1 - self.alpha) / self.b) * (1 - self.mu) ** self.alpha

    @property
    def maker_factor(self) -> float:
        return 1 - self.mu

    @property
    def breaker_factor(self) -> float:
        return (1 + self.mu) ** (1 / self.b)

    def log_phi(self, size, x, y):
        """Natural log of the potential of a set of ``size`` elements with
        ``x`` Maker and ``y`` Breaker elements (works on numpy arrays)."""
        return ((y - (1 - self.alpha) * size) / self.b * math.log1p(self.mu)
                + (x - self.alpha * size) * math.log1p(-self.mu))


class CriterionResult(dict):
    @property
    def holds(self) -> bool:
        return self["holds"]

    @property
    def sum(self) -> float:
        return self["sum"]


def check_lemma22_criterion(sizes_or_family, config: PotentialConfig) -> CriterionResult:
    """Evaluate ``sum lam^-|F|`` and whether it is below one.

    Accepts a family object or a plain sequence of set sizes.
    """
    if hasattr(sizes_or_family, "masks"):
        sizes = [popcount(m) for m in sizes_or_family.masks()]
    else:
        sizes = list(sizes_or_family)
    log_lam = math.log(config.lam)
    total = math.fsum(math.exp(-s * log_lam) for s in sizes)
    return CriterionResult(holds=total < 1, sum=total)


def epsilon_from_mu(mu: float, b: int) -> float:
    """The unique eps with exp(mu^2) = (1+mu)^(1/(b+1) + eps/b) (1-mu)^(1/(b+1) - eps)."""
    if not 0 < mu < 1:
        raise InvalidArgument(f"mu={mu} outside (0, 1)")
    if b < 1:
        raise InvalidArgument("b must be a positive integer")
    num = mu * mu - math.log1p(-mu * mu) / (b + 1)
    den = math.log1p(mu) / b - math.log1p(-mu)
    return num / den


def bd1_residual(mu: float, b: int, eps: float) -> float:
    """Relative residual of the defining identity of ``epsilon_from_mu``."""
    lhs = mu * mu
    rhs = (1 / (b + 1) + eps / b) * math.log1p(mu) + (1 / (b + 1) - eps) * math.log1p(-mu)
    return abs(math.expm1(rhs - lhs))


def biased_discrepancy_config(delta: float, b: int) -> PotentialConfig:
    """mu = delta/2 and alpha = 1/(b+1) - eps(mu, b)."""
    if not 0 < delta < 1:
        raise InvalidArgument(f"delta={delta} outside (0, 1)")
    mu = delta / 2
    eps = epsilon_from_mu(mu, b)
    alpha = 1 / (b + 1) - eps
    if alpha <= 0:
        raise DegenerateParameters(
            f"alpha = {alpha:.4g} <= 0 for delta={delta}, b={b}: infeasible at this scale",
            {"delta": delta, "b": b, "mu": mu, "eps": eps, "alpha": alpha})
    return PotentialConfig(alpha, mu, b)


def retention_precondition(sizes_by_group: Sequence[Sequence[int]], delta: float) -> bool:
    """k_i > 4 delta^-2 ln(s |F_i|) for every group."""
    s = len(sizes_by_group)
    return all(g and min(g) > 4 / delta ** 2 * math.log(s * len(g)) for g in sizes_by_group)


# -- scratch evaluation (also the oracle for the incremental state) ---------------


def scratch_potentials(sets: Sequence[int], config: PotentialConfig,
                       maker_mask: int, breaker_mask: int) -> list[float]:
    out = []
    for m in sets:
        out.append(math.exp(config.log_phi(popcount(m), popcount(m & maker_mask),
                                           popcount(m & breaker_mask))))
    return out


def potential_choice(sets: Sequence[int], config: PotentialConfig, free_mask: int,
                     maker_mask: int, breaker_mask: int) -> int:
    """Maker's move computed from scratch: free element of maximum potential,
    smallest id among (numerical) ties."""
    if not free_mask:
        raise InvalidState("no free element")
    phis = scratch_potentials(sets, config, maker_mask, breaker_mask)
    score: dict[int, float] = {}
    for m, p in zip(sets, phis):
        for e in iter_bits(m & free_mask):
            score[e] = score.get(e, 0.0) + p
    if not score:
        return (free_mask & -free_mask).bit_length() - 1
    best = max(score.values())
    tol = TIE_RTOL * best
    cands = [e for e, v in score.items() if v >= best - tol]
    return min(cands)


def _indicator(mask: int, width: int) -> np.ndarray:
    out = np.zeros(width)
    for e in iter_bits(mask):
        if e < width:
            out[e] = 1.0
    return out


class PotentialState:
    """Incremental potentials for a fixed list of winning sets.

    Per-set potentials and per-element sums are kept in numpy arrays and
    updated through a sparse incidence matrix; ``recompute`` rebuilds them from
    the ownership counts.
    """

    def __init__(self, sets: Sequence[int], config: PotentialConfig, board_mask: int,
                 maker_mask: int = 0, breaker_mask: int = 0):
        self.config = config
        self.sets = [m for m in sets if m]
        self.board_mask = board_mask
        self.maker_mask = maker_mask
        self.breaker_mask = breaker_mask
        self._csr = incidence_matrix(self.sets, board_mask.bit_length())
        self._csc = self._csr.tocsc()
        self.size = np.asarray(self._csr.sum(axis=1)).ravel()
        self.x = self._csr @ _indicator(maker_mask, self._csr.shape[1])
        self.y = self._csr @ _indicator(breaker_mask, self._csr.shape[1])
        self.recompute()

    @property
    def free_mask(self) -> int:
        return self.board_mask & ~(self.maker_mask | self.breaker_mask)

    def recompute(self) -> None:
        self.phi = np.exp(self.config.log_phi(self.size, self.x, self.y))
        self.elem = self._csr.T @ self.phi

    @property
    def total(self) -> float:
        return float(self.phi.sum())

    def _rows(self, e: int) -> np.ndarray:
        if e >= self._csc.shape[1]:
            return np.empty(0, dtype=np.int64)
        lo, hi = self._csc.indptr[e], self._csc.indptr[e + 1]
        return self._csc.indices[lo:hi]

    def _scale(self, e: int, factor: float) -> np.ndarray:
        rows = self._rows(e)
        if rows.size:
            delta = self.phi[rows] * (factor - 1)
            self.phi[rows] += delta
            self.elem += self._csr[rows].T @ delta
        return rows

    def claim_maker(self, e: int) -> None:
        if not (self.free_mask >> e) & 1:
            raise InvalidState(f"element {e} is not free")
        rows = self._scale(e, self.config.maker_factor)
        self.x[rows] += 1
        self.maker_mask |= 1 << e

    def claim_breaker(self, e: int) -> None:
        if not (self.free_mask >> e) & 1:
            raise InvalidState(f"element {e} is not free")
        rows = self._scale(e, self.config.breaker_factor)
        self.y[rows] += 1
        self.breaker_mask |= 1 << e

    def element_potential(self, e: int) -> float:
        return float(self.elem[e]) if e < len(self.elem) else 0.0

    def best_element(self) -> int:
        free = self.free_mask
        if not free:
            raise InvalidState("no free element")
        ids = np.fromiter(iter_bits(free), dtype=np.int64)
        inside = ids[ids < len(self.elem)]
        if inside.size == 0:
            return int(ids[0])
        vals = self.elem[inside]
        best = vals.max()
        if best <= 0:
            return int(ids[0])
        return int(inside[np.flatnonzero(vals >= best - TIE_RTOL * best)[0]])


def potential_maker_move(state: PotentialState) -> int:
    """Pick Maker's element and apply it to ``state``."""
    e = state.best_element()
    state.claim_maker(e)
    return e


def potential_breaker_update(state: PotentialState, e: int) -> PotentialState:
    state.claim_breaker(e)
    return state


# -- strategies ----------------------------------------------------------------


class _PotentialAgent(Strategy):
    role = Player.MAKER

    def _begin(self, sets, board: Board, config: PotentialConfig):
        self._state = PotentialState(sets, config, board.mask)

    def observe(self, move: Move, state: GameState) -> None:
        for e in move.elements:
            if move.player is Player.MAKER:
                self._state.claim_maker(e)
            else:
                self._state.claim_breaker(e)

    def choose(self, state: GameState) -> tuple[int, ...]:
        return (self._state.best_element(),)


class PotentialMaker(_PotentialAgent):
    """Plays the alpha-fraction potential on the sets handed to it each stage.

    ``sets`` fixes the sets once (their traces on the current board are used
    in later stages); otherwise the stage family (or its witnesses) is used.
    """

    name = "potential"
    markov = True

    def __init__(self, config: PotentialConfig, sets: Sequence[int] | None = None, witness_cap: int = 256,
                 rng=None):
        self.config = config
        self.fixed = None if sets is None else list(sets)
        self.witness_cap = witness_cap
        self.rng = rng

    def start_stage(self, board, family, bias, stage):
        if bias != self.config.b:
            raise InvalidArgument(f"config is for b={self.config.b}, game has b={bias}")
        if self.fixed is not None:
            sets = [m & board.mask for m in self.fixed]
        elif family.is_empty():
            sets = []
        else:
            sets = family.witnesses(board, self.witness_cap, self.rng)
        self._begin(sets, board, self.config)


@dataclass
class DiscrepancyParameters:
    gamma: float
    b: int
    s: int
    k: tuple[int, ...]
    counts: tuple[int, ...]
    t: float
    delta: float
    cond_a: tuple[bool, ...]
    cond_b: tuple[bool, ...]
    delta_overridden: bool = False

    @property
    def conditions_hold(self) -> bool:
        return all(self.cond_a) and all(self.cond_b)


def _ratio(k: int, count: int) -> float:
    lnf = math.log(count)
    return math.inf if lnf == 0 else k / lnf


def discrepancy_parameters(groups: Sequence[Sequence[int]], gamma: float, b: int) -> DiscrepancyParameters:
    """t, delta and the advisory conditions from group minima and counts.

    ``groups`` holds the set sizes of each group.
    """
    if not 0 < gamma < 1:
        raise InvalidArgument(f"gamma={gamma} outside (0, 1)")
    if not groups or any(len(g) == 0 for g in groups):
        raise InvalidArgument("every group must be nonempty")
    s = len(groups)
    k = tuple(min(g) for g in groups)
    counts = tuple(len(g) for g in groups)
    ratios = [_ratio(kj, cj) for kj, cj in zip(k, counts)]
    logb = math.log(b + 1)
    t = (1 - gamma) * min(math.log(r) / logb if r > 0 else -math.inf for r in ratios)
    delta = 4 * max(0.0 if math.isinf(r) else (1 / r) ** (gamma / 2) for r in ratios)
    cond_a = tuple(c > s for c in counts)
    cond_b = tuple(
        r ** (gamma / 2) >= 20 * b * max(1.0, math.log(r) / logb) if r > 0 else False
        for r in ratios)
    return DiscrepancyParameters(gamma, b, s, k, counts, t, delta, cond_a, cond_b)


class DiscrepancyMaker(_PotentialAgent):
    """Per stage, the delta-discrepancy potential on the left-overs F & X^i of
    a fixed auxiliary family (multiplicity kept, empty left-overs dropped).

    ``retention`` records, per finished stage, the minimum left-over size of
    every group and whether the single-stage precondition held at its start.
    """

    name = "discrepancy"
    markov = True

    def __init__(self, aux_family, params: DiscrepancyParameters, config: PotentialConfig):
        self.aux = aux_family
        self.params = params
        self.config = config
        self.retention: list[dict] = []

    def _leftover_sizes(self, mask: int):
        return [[popcount(m & mask) for m in g] for g in self.aux.groups]

    def start_stage(self, board, family, bias, stage):
        sizes = self._leftover_sizes(board.mask)
        self._pre = retention_precondition(sizes, self.params.delta)
        self._k_before = tuple(min(g) for g in sizes)
        sets = [m & board.mask for m in self.aux.masks()]
        self._begin(sets, board, self.config)

    def end_stage(self, reduction: StageReduction, state: GameState) -> None:
        sizes = self._leftover_sizes(state.maker_mask)
        self.retention.append({
            "k_before": self._k_before,
            "k_after": tuple(min(g) for g in sizes),
            "precondition": self._pre,
        })


def multistage_discrepancy_controller(family, gamma: float, b: int, delta: float | None = None) -> DiscrepancyMaker:
    """Build the multistage Maker for an explicit grouped ``family``.

    Raises DegenerateParameters when t <= 0 or delta >= 1 unless ``delta`` is
    given explicitly; conditions (a) and (b) are only reported.
    """
    sizes = [[popcount(m) for m in g] for g in family.groups]
    params = discrepancy_parameters(sizes, gamma, b)
    diag = {"t": params.t, "delta": params.delta, "k": params.k, "counts": params.counts,
            "cond_a": params.cond_a, "cond_b": params.cond_b}
    if delta is None:
        if params.t <= 0 or params.delta >= 1:
            raise DegenerateParameters(
                f"degenerate multistage parameters t={params.t:.4g}, delta={params.delta:.4g}", diag)
    else:
        params.delta = delta
        params.delta_overridden = True
    try:
        config = biased_discrepancy_config(params.delta, b)
    except DegenerateParameters as exc:
        exc.diagnostics.update(diag)
        raise
    return DiscrepancyMaker(family, params, config)
