"""
Per-UE bidding subproblem.
Solves r* = argmax_{r >= 0} [ln U(r + shift) - P r] by bisection on the log-slope,
for one UE or for a whole roster at once.
"""
import math
from dataclasses import dataclass

import numpy as np

from src.utility.functions import UtilityBank, UtilityFunction
from src.utils.errors import UtilityDomainError

RATE_TOLERANCE = 1e-9
LOWER_BRACKET = 1e-12


@dataclass(frozen=True)
class SubproblemSpec:
    """Inputs of one UE's rate decision."""

    utility: UtilityFunction
    price: float
    shift: float = 0.0
    rate_cap: float = 1.0

    def __post_init__(self):
        if not self.price > 0 or not math.isfinite(self.price):
            raise UtilityDomainError(f"Price must be positive, got {self.price}")
        if not self.shift >= 0:
            raise UtilityDomainError(f"Shift must be nonnegative, got {self.shift}")
        if not self.rate_cap > 0:
            raise UtilityDomainError(f"Rate cap must be positive, got {self.rate_cap}")


def solve_ue_rates(bank: UtilityBank, prices, shifts, rate_cap, tol=RATE_TOLERANCE):
    """
    Solve the bidding subproblem for every UE of a bank in one vectorized bisection.

    Args:
        bank: Utilities of the UEs
        prices: Per-UE shadow prices (positive)
        shifts: Per-UE rate shifts (nonnegative)
        rate_cap: Upper end of the search interval (scalar or per UE)
        tol: Absolute tolerance on the returned rates

    Returns:
        np.ndarray: Optimal rates, one per UE
    """
    prices = np.asarray(prices, dtype=float)
    shifts = np.asarray(shifts, dtype=float)
    caps = np.broadcast_to(np.asarray(rate_cap, dtype=float), prices.shape)

    # Unshifted UEs start just above zero where the slope is unbounded.
    lo = np.where(shifts > 0, 0.0, LOWER_BRACKET)
    hi = caps.copy()

    slope_lo = bank.log_slope(lo + shifts)
    slope_hi = bank.log_slope(hi + shifts)
    corner = slope_lo <= prices
    saturated = ~corner & (slope_hi >= prices)

    width = float(np.max(hi - lo)) if len(hi) else 0.0
    steps = max(1, int(math.ceil(math.log2(max(width, tol) / tol))))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        above = bank.log_slope(mid + shifts) > prices
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)

    rates = 0.5 * (lo + hi)
    rates = np.where(saturated, caps, rates)
    return np.where(corner, 0.0, rates)


def solve_ue_rate(spec: SubproblemSpec):
    """
    Solve one UE's subproblem.

    Args:
        spec: Utility, price, shift and search cap

    Returns:
        float: Optimal nonnegative rate
    """
    bank = UtilityBank([spec.utility])
    rates = solve_ue_rates(bank, [spec.price], [spec.shift], spec.rate_cap)
    return float(rates[0])


def bid_from_rate(price, rate):
    """New bid w = P r."""
    if price < 0 or rate < 0:
        raise UtilityDomainError(f"Price and rate must be nonnegative, got price={price}, rate={rate}")
    return price * rate
