"""
Tests for the per-UE bidding subproblem.
"""
import numpy as np
import pytest

from src.allocation.subproblem import SubproblemSpec, bid_from_rate, solve_ue_rate, solve_ue_rates
from src.utility.functions import LogParams, SigmoidParams, UtilityBank, log_utility, log_utility_slope
from src.utils.errors import UtilityDomainError


def objective(u, r, price, shift=0.0):
    return log_utility(u, np.asarray(r) + shift) - price * np.asarray(r)


class TestSolveUeRate:
    """Test cases for solve_ue_rate."""

    def test_log_interior_optimum(self):
        u = LogParams(k=1, r_max=100)
        rate = solve_ue_rate(SubproblemSpec(utility=u, price=0.05, rate_cap=100.0))

        grid = np.arange(1e-4, 100.0, 1e-4)
        best = grid[np.argmax(objective(u, grid, 0.05))]
        assert rate == pytest.approx(8.07, abs=1e-2)
        assert abs(rate - best) < 1e-3

    def test_sigmoid_at_tiny_price(self):
        u = SigmoidParams(a=3, b=10)
        rate = solve_ue_rate(SubproblemSpec(utility=u, price=1e-6, rate_cap=100.0))

        grid = np.arange(1e-3, 100.0, 1e-3)
        assert rate == pytest.approx(14.97, abs=1e-2)
        assert objective(u, rate, 1e-6) >= np.max(objective(u, grid, 1e-6)) - 1e-9

    def test_corner_when_shift_slope_below_price(self):
        u = LogParams(k=1, r_max=100)
        assert log_utility_slope(u, 50.0) <= 0.05
        assert solve_ue_rate(SubproblemSpec(utility=u, price=0.05, shift=50.0, rate_cap=100.0)) == 0.0

    def test_saturates_at_cap(self):
        u = LogParams(k=1, r_max=100)
        assert solve_ue_rate(SubproblemSpec(utility=u, price=0.05, rate_cap=5.0)) == 5.0

    def test_optimality_certificate(self):
        rng = np.random.default_rng(7)
        cases = [
            (SigmoidParams(a=3, b=10), 0.3, 0.0),
            (SigmoidParams(a=1, b=15), 0.05, 4.0),
            (LogParams(k=18), 0.02, 0.0),
            (LogParams(k=1), 0.01, 12.0),
        ]
        for u, price, shift in cases:
            rate = solve_ue_rate(SubproblemSpec(utility=u, price=price, shift=shift, rate_cap=100.0))
            assert rate > 0
            samples = rng.uniform(0.0, 100.0, size=1000)
            samples = samples[samples > 0]
            assert np.all(objective(u, rate, price, shift) >= objective(u, samples, price, shift) - 1e-9)

    def test_monotone_in_price(self):
        u = SigmoidParams(a=1, b=18)
        prices = [1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2, 0.5]
        rates = [solve_ue_rate(SubproblemSpec(utility=u, price=p, rate_cap=100.0)) for p in prices]
        assert all(a >= b for a, b in zip(rates, rates[1:]))

    def test_shift_translates_optimum(self):
        u = LogParams(k=1, r_max=100)
        unshifted = solve_ue_rate(SubproblemSpec(utility=u, price=0.05, rate_cap=100.0))
        shifted = solve_ue_rate(SubproblemSpec(utility=u, price=0.05, shift=3.0, rate_cap=100.0))
        assert shifted + 3.0 == pytest.approx(unshifted, abs=1e-8)

    def test_vectorized_matches_scalar(self):
        utilities = [SigmoidParams(a=3, b=10), LogParams(k=1), SigmoidParams(a=1, b=12), LogParams(k=4)]
        prices = [0.2, 0.05, 0.1, 0.03]
        shifts = [0.0, 2.0, 0.0, 40.0]
        rates = solve_ue_rates(UtilityBank(utilities), prices, shifts, 100.0)
        for u, p, s, rate in zip(utilities, prices, shifts, rates):
            assert rate == solve_ue_rate(SubproblemSpec(utility=u, price=p, shift=s, rate_cap=100.0))

    def test_invalid_spec(self):
        u = LogParams(k=1)
        with pytest.raises(UtilityDomainError):
            SubproblemSpec(utility=u, price=0.0)
        with pytest.raises(UtilityDomainError):
            SubproblemSpec(utility=u, price=1.0, shift=-1.0)
        with pytest.raises(UtilityDomainError):
            SubproblemSpec(utility=u, price=1.0, rate_cap=0.0)


class TestBidFromRate:
    """Test cases for bid_from_rate."""

    def test_product(self):
        assert bid_from_rate(2.0, 5.0) == 10.0

    def test_zero_rate(self):
        assert bid_from_rate(123.0, 0.0) == 0.0

    def test_composes_with_solver(self):
        rate = solve_ue_rate(SubproblemSpec(utility=LogParams(k=1), price=0.05, rate_cap=100.0))
        assert bid_from_rate(0.5, rate) == pytest.approx(4.035, abs=5e-3)

    def test_negative_inputs(self):
        with pytest.raises(UtilityDomainError):
            bid_from_rate(-1.0, 2.0)
        with pytest.raises(UtilityDomainError):
            bid_from_rate(1.0, -2.0)
