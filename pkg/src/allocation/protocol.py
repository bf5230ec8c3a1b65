"""
Distributed bidding protocol.
UEs bid, eNB sector groups price, the MME splits the stage budget and tests convergence.
Stage 1 allocates the radar band to non-interfering sector groups; stage 2 allocates the
communications band to every group with the stage-1 rates as utility shifts.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from src.allocation.subproblem import LOWER_BRACKET, solve_ue_rates
from src.scenario.model import Scenario
from src.utility.functions import UtilityBank
from src.utils.errors import DegeneratePriceError, NoEligibleGroupError

logger = logging.getLogger(__name__)

SHRINK_RATIO = 0.95
MIN_DAMPING = 2.0 ** -20
RESEED_RATIO = 0.9


class Stage(str, Enum):
    RADAR = "radar"
    COMM = "comm"


class StopReason(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"


class SplitPolicy(str, Enum):
    """How the MME divides a stage budget across the open sector groups."""

    PROPORTIONAL = "proportional"
    EQUAL = "equal"


@dataclass(frozen=True)
class SectorGroup:
    """All cells' UEs of one sector index, pooled under one budget and one price."""

    sector_index: int
    members: Tuple[str, ...]
    interfering: bool


@dataclass(frozen=True)
class StageConfig:
    """Parameters of one allocation stage."""

    stage: Stage
    budget: float
    delta: float = 1e-3
    max_iters: int = 10000
    initial_bid: float = 1.0
    stall_window: int = 50
    split: SplitPolicy = SplitPolicy.PROPORTIONAL

    def __post_init__(self):
        object.__setattr__(self, "split", SplitPolicy(self.split))
        if self.budget < 0:
            raise ValueError(f"Stage budget must be nonnegative, got {self.budget}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if not self.initial_bid > 0:
            raise ValueError(f"initial_bid must be positive, got {self.initial_bid}")
        if self.stall_window < 1:
            raise ValueError(f"stall_window must be at least 1, got {self.stall_window}")

    @classmethod
    def from_settings(cls, stage, budget, **overrides):
        """Stage config with defaults taken from the application settings."""
        values = dict(
            delta=settings.DELTA,
            max_iters=settings.MAX_ITERS,
            initial_bid=settings.INITIAL_BID,
            stall_window=settings.STALL_WINDOW,
            split=settings.SPLIT,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(stage=stage, budget=float(budget), **values)


@dataclass(frozen=True)
class StageState:
    """
    Snapshot of one protocol iteration.

    ue_bids are the per-UE bids w in roster order; aggregate_bids, previous_aggregate_bids,
    prices and budgets are per sector group (W(n), W(n-1), P and R).
    """

    iteration: int
    ue_bids: Tuple[float, ...]
    aggregate_bids: Tuple[float, ...]
    previous_aggregate_bids: Tuple[float, ...]
    prices: Tuple[float, ...]
    budgets: Tuple[float, ...]


@dataclass(frozen=True)
class ConvergenceTrace:
    stage: Stage
    snapshots: Tuple[StageState, ...]
    stop_reason: StopReason

    @property
    def iterations(self):
        return len(self.snapshots)

    @property
    def converged(self):
        return self.stop_reason is StopReason.CONVERGED


@dataclass(frozen=True)
class AllocationResult:
    """Per-UE rates of both stages, per-group totals and both traces."""

    ue_ids: Tuple[str, ...]
    r_radar: Tuple[float, ...]
    r_comm: Tuple[float, ...]
    r_aggregate: Tuple[float, ...]
    radar_group_totals: Tuple[float, ...]
    comm_group_totals: Tuple[float, ...]
    radar_trace: ConvergenceTrace
    comm_trace: ConvergenceTrace

    @property
    def aggregate_group_totals(self):
        return tuple(r + c for r, c in zip(self.radar_group_totals, self.comm_group_totals))

    @property
    def converged(self):
        return self.radar_trace.converged and self.comm_trace.converged

    def rates_by_ue(self):
        return {
            ue_id: (radar, comm, total)
            for ue_id, radar, comm, total in zip(self.ue_ids, self.r_radar, self.r_comm, self.r_aggregate)
        }


def build_sector_groups(scenario: Scenario):
    """One SectorGroup per sector index, members in roster order."""
    groups = []
    for index in range(1, scenario.sector_count + 1):
        members = tuple(ue.id for ue in scenario.ues if ue.sector_index == index)
        groups.append(SectorGroup(index, members, scenario.interference_mask[index - 1]))
    if all(group.interfering for group in groups):
        logger.warning("⚠ Every sector group interferes with the radar; stage 1 is infeasible")
    return tuple(groups)


def shadow_price(group_bids: Sequence[float], group_budget: float):
    """
    eNB price per rate unit: P = sum(w) / R.

    Raises:
        DegeneratePriceError: if every bid is zero
    """
    if not group_budget > 0:
        raise ValueError(f"Group budget must be positive, got {group_budget}")
    total = float(np.sum(group_bids))
    if not total > 0:
        raise DegeneratePriceError("All bids are zero; the shadow price is undefined")
    return total / group_budget


def mme_split_budget(total_budget, group_aggregate_bids, interference_mask=None, policy=SplitPolicy.PROPORTIONAL):
    """
    Split the stage budget across sector groups.

    Args:
        total_budget: Stage budget R
        group_aggregate_bids: W^l per group
        interference_mask: Per-group flags; masked groups get nothing (None = no mask)
        policy: PROPORTIONAL splits in proportion to W^l; EQUAL gives every open group R / L

    Returns:
        np.ndarray: R^l per group, summing to R

    Raises:
        NoEligibleGroupError: if every group is masked
    """
    bids = np.asarray(group_aggregate_bids, dtype=float)
    eligible = np.ones(len(bids), dtype=bool) if interference_mask is None else ~np.asarray(interference_mask)
    if not eligible.any():
        raise NoEligibleGroupError("No sector group may receive budget in this stage")

    weights = np.where(eligible, bids, 0.0)
    if SplitPolicy(policy) is SplitPolicy.PROPORTIONAL and weights.sum() > 0:
        return total_budget * weights / weights.sum()
    # R^l = R / L over eligible groups; also the opening split R^l(0) before anyone has bid.
    return np.where(eligible, total_budget / eligible.sum(), 0.0)


def _group_prices(aggregate_bids, budgets, eligible):
    total_bids = float(aggregate_bids[eligible].sum())
    total_budget = float(budgets.sum())
    if not total_bids > 0:
        raise DegeneratePriceError("Every eligible bid is zero; the stage has no market price")
    market_price = total_bids / total_budget
    prices = np.zeros(len(budgets))
    for position in np.flatnonzero(eligible):
        if aggregate_bids[position] > 0 and budgets[position] > 0:
            prices[position] = shadow_price([aggregate_bids[position]], budgets[position])
        else:
            # A silent group keeps facing the pooled market price.
            prices[position] = market_price
    return prices


def _reseed_silent_groups(bank, shifts, bids, new_bids, prices, group_of, active, open_groups):
    """
    Keep every open group bidding when all its UEs sit at the corner.

    A silent group's bids are scaled so that its price drops to RESEED_RATIO times the
    largest corner slope ln U'(shift) among its members, where at least one of them bids again.
    """
    group_count = len(prices)
    group_bids = np.bincount(group_of, weights=new_bids, minlength=group_count)
    silent = open_groups & ~(group_bids > 0)
    if not silent.any():
        return new_bids

    corner_slopes = bank.log_slope(np.where(shifts > 0, 0.0, LOWER_BRACKET) + shifts)
    ceiling = np.zeros(group_count)
    np.maximum.at(ceiling, group_of[active], corner_slopes[active])
    factor = np.where(silent, RESEED_RATIO * ceiling / np.where(prices > 0, prices, 1.0), 1.0)
    logger.debug(f"Re-seeding silent groups {(np.flatnonzero(silent) + 1).tolist()} by {factor[silent].tolist()}")
    return np.where(active & silent[group_of], bids * factor[group_of], new_bids)


def _empty_trace(stage):
    return ConvergenceTrace(stage=stage, snapshots=(), stop_reason=StopReason.CONVERGED)


def run_stage(scenario: Scenario, config: StageConfig, shifts: Optional[Sequence[float]] = None):
    """
    Run one allocation stage to convergence.

    The stage stops once, after the opening iteration, every |W^l(n) - W^l(n-1)| < delta and
    every UE's implied rate w/P lies within delta of its best response at the current price.

    Args:
        scenario: Network scenario
        config: Stage, budget and protocol parameters
        shifts: Per-UE rate shifts in roster order (None = all zero)

    Returns:
        tuple: (per-UE rates as a tuple in roster order, ConvergenceTrace)
    """
    groups = build_sector_groups(scenario)
    ue_count = len(scenario.ues)
    shifts = np.zeros(ue_count) if shifts is None else np.asarray(shifts, dtype=float)
    if shifts.shape != (ue_count,) or np.any(shifts < 0):
        raise ValueError("shifts must hold one nonnegative rate per UE")

    if config.budget == 0:
        logger.info(f"Stage {config.stage.value}: zero budget, nothing to allocate")
        return (0.0,) * ue_count, _empty_trace(config.stage)

    mask = np.array([g.interfering for g in groups]) if config.stage is Stage.RADAR else np.zeros(len(groups), bool)
    eligible = ~mask
    group_of = np.array([ue.sector_index - 1 for ue in scenario.ues], dtype=int)
    active = eligible[group_of]
    bank = UtilityBank(ue.utility for ue in scenario.ues)
    group_count = len(groups)

    # Empty groups take no budget unless no eligible group has members at all.
    populated = np.array([len(g.members) > 0 for g in groups])
    open_groups = eligible & populated if (eligible & populated).any() else eligible
    closed = ~open_groups

    logger.info(
        f"Starting: stage {config.stage.value} with budget {config.budget:g} over "
        f"{int(active.sum())} UEs in {int(open_groups.sum())} groups ({config.split.value} split)"
    )

    bids = np.where(active, config.initial_bid, 0.0)
    previous_w = np.zeros(group_count)
    previous_step = np.zeros(group_count)
    damping = np.ones(group_count)
    best_step = np.full(group_count, np.inf)
    stalled_for = np.zeros(group_count, dtype=int)
    seen_flip = np.zeros(group_count, dtype=bool)
    snapshots = []
    stop_reason = StopReason.MAX_ITERS

    for n in range(1, config.max_iters + 1):
        aggregate = np.bincount(group_of, weights=bids, minlength=group_count)
        step = aggregate - previous_w

        policy = config.split if n > 1 else SplitPolicy.EQUAL
        budgets = mme_split_budget(config.budget, aggregate, closed, policy)
        prices = _group_prices(aggregate, budgets, open_groups)
        snapshots.append(
            StageState(
                iteration=n,
                ue_bids=tuple(bids.tolist()),
                aggregate_bids=tuple(aggregate.tolist()),
                previous_aggregate_bids=tuple(previous_w.tolist()),
                prices=tuple(prices.tolist()),
                budgets=tuple(budgets.tolist()),
            )
        )
        logger.debug(f"iteration {n}: W={aggregate.tolist()} P={prices.tolist()} R={budgets.tolist()}")

        ue_prices = np.where(active, prices[group_of], 1.0)
        rates = solve_ue_rates(bank, ue_prices, shifts, config.budget)
        residual = np.abs(bids / ue_prices - rates)
        converged = (
            n > 1
            and bool(np.all(np.abs(step) < config.delta))
            and float(np.max(residual[active], initial=0.0)) < config.delta
        )
        if converged:
            stop_reason = StopReason.CONVERGED
            break
        if n == config.max_iters:
            break

        new_bids = np.where(active, ue_prices * rates, 0.0)
        new_bids = _reseed_silent_groups(bank, shifts, bids, new_bids, prices, group_of, active, open_groups)

        # Oscillation guard: |dW| must reach a new low (by SHRINK_RATIO) within the window,
        # otherwise an oscillating group gets its damping weight halved.
        magnitude = np.abs(step)
        progressed = magnitude < SHRINK_RATIO * best_step
        best_step = np.where(progressed, magnitude, best_step)
        stalled_for = np.where(progressed, 0, stalled_for + 1)
        flipped = np.sign(step) * np.sign(previous_step) < 0
        seen_flip = np.where(progressed, False, seen_flip | flipped)
        escalate = (stalled_for >= config.stall_window) & seen_flip
        if escalate.any():
            damping = np.where(escalate, np.maximum(damping / 2.0, MIN_DAMPING), damping)
            best_step = np.where(escalate, magnitude, best_step)
            stalled_for = np.where(escalate, 0, stalled_for)
            seen_flip = np.where(escalate, False, seen_flip)
            logger.debug(f"iteration {n}: damping weights now {damping.tolist()}")

        theta = damping[group_of]
        bids = theta * new_bids + (1.0 - theta) * bids
        previous_step = step
        previous_w = aggregate

    # Final rates: r = w / P with the price of the final bids.
    final_prices = np.array(snapshots[-1].prices)[group_of]
    rates = np.where(active & (final_prices > 0), bids / np.where(final_prices > 0, final_prices, 1.0), 0.0)

    trace = ConvergenceTrace(stage=config.stage, snapshots=tuple(snapshots), stop_reason=stop_reason)
    if trace.converged:
        logger.info(f"Success: stage {config.stage.value} converged after {trace.iterations} iterations")
    else:
        logger.warning(f"⚠ stage {config.stage.value} stopped at max_iters={config.max_iters} without converging")
    return tuple(rates.tolist()), trace


def group_totals(scenario: Scenario, rates):
    totals = [0.0] * scenario.sector_count
    for ue, rate in zip(scenario.ues, rates):
        totals[ue.sector_index - 1] += rate
    return tuple(totals)


def assemble_result(scenario: Scenario, r_radar, radar_trace, r_comm, comm_trace):
    """AllocationResult from both stages' rates and traces; r_aggregate = r_radar + r_comm."""
    return AllocationResult(
        ue_ids=scenario.ue_ids(),
        r_radar=tuple(r_radar),
        r_comm=tuple(r_comm),
        r_aggregate=tuple(radar + comm for radar, comm in zip(r_radar, r_comm)),
        radar_group_totals=group_totals(scenario, r_radar),
        comm_group_totals=group_totals(scenario, r_comm),
        radar_trace=radar_trace,
        comm_trace=comm_trace,
    )


def run_two_stage(scenario: Scenario, radar_config: StageConfig, comm_config: StageConfig):
    """
    Two-stage allocation: radar band to non-interfering groups, then the
    communications band to all groups with stage-1 rates as shifts.

    Returns:
        AllocationResult
    """
    if radar_config.stage is not Stage.RADAR or comm_config.stage is not Stage.COMM:
        raise ValueError("run_two_stage needs a radar-stage config followed by a comm-stage config")

    r_radar, radar_trace = run_stage(scenario, radar_config)
    r_comm, comm_trace = run_stage(scenario, comm_config, shifts=r_radar)
    return assemble_result(scenario, r_radar, radar_trace, r_comm, comm_trace)


def default_configs(scenario: Scenario, **overrides):
    """Radar and comm stage configs from the scenario budgets and the settings."""
    return (
        StageConfig.from_settings(Stage.RADAR, scenario.r_radar_total, **overrides),
        StageConfig.from_settings(Stage.COMM, scenario.r_comm_total, **overrides),
    )
