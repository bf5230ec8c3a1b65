"""
Tests for bandwidth sweeps.
"""
import numpy as np
import pytest

from config.settings import settings
from src.allocation.protocol import SplitPolicy, StopReason, build_sector_groups
from src.experiments.sweep import BandwidthSweep, SweepSpec, radar_first_split, sweep_fieldnames, sweep_row


@pytest.fixture(scope="module")
def table1_sweep(table1):
    return BandwidthSweep(table1, SweepSpec(50.0, 1000.0, 50.0)).run()


@pytest.fixture(scope="module")
def no_radar_sweep(table1):
    return BandwidthSweep(table1.without_radar(), SweepSpec(50.0, 1000.0, 50.0), split=SplitPolicy.EQUAL).run()


def point_at(points, r_total):
    return next(point for point in points if point.r_total == r_total)


class TestSweepSpec:
    """Test cases for SweepSpec."""

    def test_totals(self):
        assert SweepSpec(50.0, 1000.0, 50.0).totals() == [50.0 * i for i in range(1, 21)]

    def test_single_point(self):
        assert SweepSpec(250.0, 250.0, 10.0).totals() == [250.0]

    def test_inexact_step(self):
        assert SweepSpec(0.0, 1.0, 0.3).totals() == [0.0, 0.3, 0.6, 0.9]

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            SweepSpec(100.0, 50.0, 10.0)
        with pytest.raises(ValueError):
            SweepSpec(0.0, 50.0, 0.0)


class TestRadarFirstSplit:
    """Test cases for radar_first_split."""

    def test_below_cap(self):
        assert radar_first_split(150.0, 200.0) == (150.0, 0.0)

    def test_above_cap(self):
        assert radar_first_split(250.0, 200.0) == (200.0, 50.0)


class TestSweepRows:
    """Test cases for the sweep CSV layout."""

    def test_fieldnames(self):
        assert sweep_fieldnames(2) == [
            "r_total", "r_radar_used", "r_comm_used",
            "radar_sector_1", "radar_sector_2",
            "comm_sector_1", "comm_sector_2",
            "aggregate_sector_1", "aggregate_sector_2",
            "stop_reason",
        ]

    def test_row(self, table1_sweep):
        row = sweep_row(point_at(table1_sweep, 250.0))
        assert row["r_total"] == "250.000000"
        assert row["r_radar_used"] == "200.000000"
        assert row["r_comm_used"] == "50.000000"
        assert row["stop_reason"] == "Converged"
        assert set(row) == set(sweep_fieldnames(3))


class TestTable1Sweep:
    """Landmarks of the built-in scenario's bandwidth sweep."""

    def test_every_point_converges(self, table1_sweep):
        assert len(table1_sweep) == 20
        assert all(point.stop_reason is StopReason.CONVERGED for point in table1_sweep)

    def test_interfering_sector_starves_until_radar_band_is_full(self, table1_sweep):
        for point in table1_sweep:
            if point.r_total <= 200.0:
                assert point.result.aggregate_group_totals[2] == 0.0

    def test_interfering_sector_takes_first_comm_units(self, table1_sweep):
        point = point_at(table1_sweep, 250.0)
        assert point.result.comm_group_totals[2] == pytest.approx(50.0, abs=5.0)

    def test_budgets_are_used(self, table1_sweep):
        for point in table1_sweep:
            assert sum(point.result.aggregate_group_totals) == pytest.approx(point.r_total, abs=1e-6)

    def test_group_totals_non_decreasing(self, table1, table1_sweep):
        # Every final rate lies within delta of its best response at the final price. A group
        # total then sits within (its members + all UEs) * delta of equilibrium at each point.
        members = max(len(group.members) for group in build_sector_groups(table1))
        floor = -2 * (members + len(table1.ues)) * settings.DELTA

        totals = np.array([point.result.aggregate_group_totals for point in table1_sweep])
        assert np.all(np.diff(totals, axis=0) >= floor)

    def test_radar_stage_is_reused(self, table1):
        sweep = BandwidthSweep(table1, SweepSpec(250.0, 300.0, 50.0))
        points = sweep.run()
        assert points[0].result.radar_trace is points[1].result.radar_trace


class TestNoRadarBaseline:
    """Without the radar every sector group ends up with a similar share."""

    def test_every_point_converges(self, no_radar_sweep):
        assert len(no_radar_sweep) == 20
        assert all(point.stop_reason is StopReason.CONVERGED for point in no_radar_sweep)

    def test_sectors_are_similar(self, no_radar_sweep):
        for point in no_radar_sweep:
            totals = np.array(point.result.aggregate_group_totals)
            spread = totals.max() - totals.min()
            assert spread <= 1e-6 * totals.mean()
            assert totals.sum() == pytest.approx(point.r_total, abs=1e-6)

    def test_every_sector_served_from_the_start(self, no_radar_sweep):
        first = no_radar_sweep[0].result
        assert min(first.radar_group_totals) > 0

    def test_pooled_market_runs_whole_range(self, table1):
        # Past the radar cap every stage-2 UE starts at its corner under the opening price.
        points = BandwidthSweep(table1.without_radar(), SweepSpec(50.0, 1000.0, 50.0)).run()

        assert len(points) == 20
        assert all(point.stop_reason is StopReason.CONVERGED for point in points)
        for point in points:
            assert sum(point.result.aggregate_group_totals) == pytest.approx(point.r_total, abs=1e-6)
