"""
Bandwidth sweeps.
Runs the two-stage allocation over a range of total budgets with the radar-first
fill policy and collects per-sector totals for plotting.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from src.allocation.protocol import (
    AllocationResult,
    Stage,
    StageConfig,
    StopReason,
    assemble_result,
    run_stage,
)
from src.scenario.model import Scenario
from src.utils.file_operations import format_number

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSpec:
    """Total-budget range and the radar cap of the radar-first fill."""

    r_total_min: float
    r_total_max: float
    r_total_step: float
    radar_cap: float = 200.0

    def __post_init__(self):
        if self.r_total_min < 0 or self.r_total_min > self.r_total_max:
            raise ValueError(f"Sweep range is empty: {self.r_total_min}..{self.r_total_max}")
        if not self.r_total_step > 0:
            raise ValueError(f"Sweep step must be positive, got {self.r_total_step}")
        if self.radar_cap < 0:
            raise ValueError(f"Radar cap must be nonnegative, got {self.radar_cap}")

    def totals(self):
        count = int(np.floor((self.r_total_max - self.r_total_min) / self.r_total_step + 1e-9)) + 1
        return [round(self.r_total_min + i * self.r_total_step, 9) for i in range(count)]


def radar_first_split(r_total, radar_cap):
    """Fill the radar band first, up to its cap; the rest goes to communications."""
    r_radar = min(r_total, radar_cap)
    return r_radar, r_total - r_radar


@dataclass(frozen=True)
class SweepPoint:
    r_total: float
    r_radar: float
    r_comm: float
    result: AllocationResult

    @property
    def stop_reason(self):
        converged = self.result.converged
        return StopReason.CONVERGED if converged else StopReason.MAX_ITERS


def sweep_fieldnames(sector_count):
    fields = ["r_total", "r_radar_used", "r_comm_used"]
    for prefix in ("radar", "comm", "aggregate"):
        fields.extend(f"{prefix}_sector_{index}" for index in range(1, sector_count + 1))
    fields.append("stop_reason")
    return fields


def sweep_row(point: SweepPoint):
    row = {
        "r_total": format_number(point.r_total),
        "r_radar_used": format_number(point.r_radar),
        "r_comm_used": format_number(point.r_comm),
        "stop_reason": point.stop_reason.value,
    }
    result = point.result
    for prefix, totals in (
        ("radar", result.radar_group_totals),
        ("comm", result.comm_group_totals),
        ("aggregate", result.aggregate_group_totals),
    ):
        for index, total in enumerate(totals, start=1):
            row[f"{prefix}_sector_{index}"] = format_number(total)
    return row


class BandwidthSweep:
    """Runs sweep points in R_total order, reusing stage-1 solves with equal radar budgets."""

    def __init__(self, scenario: Scenario, spec: SweepSpec, **protocol_overrides):
        self.scenario = scenario
        self.spec = spec
        self.protocol_overrides = protocol_overrides
        self._radar_cache: Dict[float, Tuple[tuple, object]] = {}

    def _config(self, stage, budget):
        return StageConfig.from_settings(stage, budget, **self.protocol_overrides)

    def _radar_stage(self, r_radar):
        if r_radar not in self._radar_cache:
            self._radar_cache[r_radar] = run_stage(self.scenario, self._config(Stage.RADAR, r_radar))
        return self._radar_cache[r_radar]

    def run_point(self, r_total):
        r_radar, r_comm = radar_first_split(r_total, self.spec.radar_cap)
        radar_rates, radar_trace = self._radar_stage(r_radar)
        comm_rates, comm_trace = run_stage(self.scenario, self._config(Stage.COMM, r_comm), shifts=radar_rates)
        result = assemble_result(self.scenario, radar_rates, radar_trace, comm_rates, comm_trace)
        return SweepPoint(r_total=r_total, r_radar=r_radar, r_comm=r_comm, result=result)

    def iter_points(self):
        """Yield sweep points in R_total order; the first point that fails to converge is the last."""
        for r_total in self.spec.totals():
            logger.info(f"Starting: sweep point R_total={r_total:g}")
            point = self.run_point(r_total)
            yield point
            if point.stop_reason is StopReason.MAX_ITERS:
                logger.error(f"ERROR: sweep point R_total={r_total:g} did not converge; aborting sweep")
                return

    def run(self):
        """
        Run every sweep point, stopping at the first that fails to converge.

        Returns:
            list: SweepPoints completed so far (the failing point included, last)
        """
        points: List[SweepPoint] = list(self.iter_points())
        return points
