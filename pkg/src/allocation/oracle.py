"""
Centralized oracle for the stage problems.
Maximizes sum_i ln U_i(r_i + shift_i) over the budget simplex, either exhaustively on a
grid (small instances) or by pairwise coordinate ascent (any size).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from src.utility.functions import UtilityBank, UtilityFunction
from src.utils.errors import OracleMaxItersError, TooLargeError

logger = logging.getLogger(__name__)

GRID_LIMIT = 10_000_000
MIN_RATE = 1e-12


@dataclass(frozen=True)
class OracleProblem:
    """
    One stage problem for the oracle.

    groups assigns each UE to a budget; with a single budget every UE shares it.
    """

    utilities: Tuple[UtilityFunction, ...]
    budgets: Tuple[float, ...]
    shifts: Optional[Tuple[float, ...]] = None
    groups: Optional[Tuple[int, ...]] = None
    step: float = 1e-3

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"Grid step must be positive, got {self.step}")
        if not self.budgets or any(not budget > 0 for budget in self.budgets):
            raise ValueError(f"Budgets must be positive, got {self.budgets}")
        if self.shifts is not None and len(self.shifts) != len(self.utilities):
            raise ValueError("shifts must hold one entry per UE")
        if self.groups is None and len(self.budgets) != 1:
            raise ValueError("Several budgets need a group assignment")
        if self.groups is not None and (
            len(self.groups) != len(self.utilities) or any(not 0 <= g < len(self.budgets) for g in self.groups)
        ):
            raise ValueError("groups must map every UE to a budget index")

    @classmethod
    def pooled(cls, utilities, budget, shifts=None, step=1e-3):
        return cls(tuple(utilities), (float(budget),), None if shifts is None else tuple(shifts), None, step)

    def shift_array(self):
        return np.zeros(len(self.utilities)) if self.shifts is None else np.asarray(self.shifts, dtype=float)

    def partitions(self):
        """(member indices, budget) per budget, in budget order."""
        if self.groups is None:
            return [(list(range(len(self.utilities))), self.budgets[0])]
        return [
            ([i for i, g in enumerate(self.groups) if g == position], budget)
            for position, budget in enumerate(self.budgets)
        ]


def stage_objective(utilities: Sequence[UtilityFunction], rates, shifts=None):
    """Sum of ln U_i(r_i + shift_i); -inf if any UE has zero utility."""
    bank = UtilityBank(utilities)
    rates = np.asarray(rates, dtype=float)
    shifts = np.zeros(len(rates)) if shifts is None else np.asarray(shifts, dtype=float)
    return float(np.sum(bank.log_value(rates + shifts)))


def _grid_partition(bank, shifts, budget, step):
    n = len(bank)
    if n == 1:
        return np.array([budget])

    slots = int(math.floor(budget / step + 1e-9))
    points = math.comb(slots + n - 1, n - 1)
    if points > GRID_LIMIT:
        raise TooLargeError(points, GRID_LIMIT)

    # Value tables: UE i at j steps for the first n-1 UEs; the last UE takes the remainder.
    grid = np.arange(slots + 1) * step
    tables = []
    with np.errstate(divide="ignore"):
        for i in range(n - 1):
            tables.append(bank.utilities[i].log_value(grid + shifts[i]))
        remainder = np.maximum(budget - grid, 0.0)
        last = bank.utilities[n - 1].log_value(remainder + shifts[n - 1])

    best_value = -math.inf
    best = None

    def visit(prefix, used, partial):
        nonlocal best_value, best
        depth = len(prefix)
        if depth == n - 2:
            free = slots - used
            j = np.arange(free + 1)
            values = partial + tables[depth][j] + last[used + j]
            position = int(np.argmax(values))
            if values[position] > best_value:
                best_value = float(values[position])
                best = prefix + [position]
            return
        for j in range(slots - used + 1):
            visit(prefix + [j], used + j, partial + tables[depth][j])

    visit([], 0, 0.0)
    if best is None:
        # Every grid point has -inf objective; fall back to the even split.
        return np.full(n, budget / n)
    rates = np.array(best, dtype=float) * step
    return np.append(rates, budget - rates.sum())


def oracle_grid_solve(problem: OracleProblem):
    """
    Exhaustive grid search on the budget simplex.

    Args:
        problem: Utilities, shifts, budgets and grid step

    Returns:
        np.ndarray: Rates in UE order

    Raises:
        TooLargeError: if a partition's grid exceeds GRID_LIMIT points
    """
    shifts = problem.shift_array()
    rates = np.zeros(len(problem.utilities))
    for members, budget in problem.partitions():
        if not members:
            continue
        bank = UtilityBank(problem.utilities[i] for i in members)
        rates[members] = _grid_partition(bank, shifts[members], budget, problem.step)
    return rates


def _best_pair_split(bank, i, j, total, shifts):
    """Optimal x for UE i (and total - x for UE j) maximizing ln U_i + ln U_j."""
    u_i, u_j = bank.utilities[i], bank.utilities[j]
    lo = MIN_RATE if shifts[i] == 0 else 0.0
    hi = total - (MIN_RATE if shifts[j] == 0 else 0.0)
    if hi <= lo:
        return None

    def gap(x):
        return float(u_i.log_slope(x + shifts[i]) - u_j.log_slope(total - x + shifts[j]))

    if gap(lo) <= 0:
        return lo
    if gap(hi) >= 0:
        return hi
    return bisect(gap, lo, hi, xtol=1e-13, maxiter=200)


def _ascent_partition(bank, shifts, budget, tol, max_sweeps):
    n = len(bank)
    rates = np.full(n, budget / n)
    if n == 1:
        return rates

    floor = np.where(shifts == 0, MIN_RATE, 0.0)
    objective = float(np.sum(bank.log_value(rates + shifts)))
    gain = math.inf
    for sweep in range(1, max_sweeps + 1):
        for i in range(n):
            with np.errstate(invalid="ignore"):
                slopes = bank.log_slope(np.maximum(rates + shifts, MIN_RATE))
                spread = np.abs(slopes - slopes[i])
            # Rate flows towards the steeper slope; the donor must be above its floor.
            donor_is_j = slopes < slopes[i]
            blocked = np.where(donor_is_j, rates <= floor, rates[i] <= floor[i])
            spread[blocked] = -1.0
            spread[i] = -1.0
            j = int(np.nanargmax(spread))
            if spread[j] <= 0:
                continue
            total = rates[i] + rates[j]
            x = _best_pair_split(bank, i, j, total, shifts)
            if x is None:
                continue
            rates[i], rates[j] = x, total - x

        updated = float(np.sum(bank.log_value(rates + shifts)))
        gain = updated - objective
        objective = updated
        logger.debug(f"ascent sweep {sweep}: objective {objective:.12f} gain {gain:.3e}")
        if gain < tol:
            return rates

    raise OracleMaxItersError(max_sweeps, gain, objective)


def oracle_ascent_solve(problem: OracleProblem, tol=1e-12, max_sweeps=10_000):
    """
    Cyclic pairwise coordinate ascent from the uniform split.

    Each step pairs UE i with the UE whose marginal log-utility differs most and
    redistributes their combined rate optimally by bisection.

    Args:
        problem: Utilities, shifts and budgets
        tol: Stop once a full sweep gains less than this
        max_sweeps: Sweep cap

    Returns:
        np.ndarray: Rates in UE order

    Raises:
        OracleMaxItersError: if the sweep cap is reached
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    shifts = problem.shift_array()
    rates = np.zeros(len(problem.utilities))
    for members, budget in problem.partitions():
        if not members:
            continue
        bank = UtilityBank(problem.utilities[i] for i in members)
        rates[members] = _ascent_partition(bank, shifts[members], budget, tol, max_sweeps)
    return rates
