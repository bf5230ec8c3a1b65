"""
Certification of protocol allocations against the centralized oracle.
"""
import logging
from dataclasses import dataclass

import numpy as np

from src.allocation.oracle import OracleProblem, oracle_ascent_solve, stage_objective
from src.allocation.protocol import AllocationResult, SplitPolicy, Stage
from src.scenario.model import Scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StageCertificate:
    stage: Stage
    protocol_objective: float
    oracle_objective: float

    @property
    def gap(self):
        """Oracle objective minus protocol objective (>= 0 up to solver noise)."""
        return self.oracle_objective - self.protocol_objective

    def within(self, tol):
        return abs(self.gap) <= tol


def stage_participants(scenario: Scenario, stage: Stage):
    """Roster positions of the UEs that take part in a stage."""
    if stage is Stage.COMM:
        return list(range(len(scenario.ues)))
    mask = scenario.interference_mask
    return [i for i, ue in enumerate(scenario.ues) if not mask[ue.sector_index - 1]]


def stage_problem(scenario: Scenario, members, budget, shifts, split=SplitPolicy.PROPORTIONAL):
    """
    Oracle problem of one stage.

    A proportional split prices every group alike, so the stage is one pooled market;
    an equal split gives each participating sector group its own budget R / L.
    """
    utilities = [scenario.ues[i].utility for i in members]
    if SplitPolicy(split) is SplitPolicy.PROPORTIONAL:
        return OracleProblem.pooled(utilities, budget, shifts=shifts)

    sectors = sorted({scenario.ues[i].sector_index for i in members})
    position = {sector: index for index, sector in enumerate(sectors)}
    return OracleProblem(
        utilities=tuple(utilities),
        budgets=(budget / len(sectors),) * len(sectors),
        shifts=tuple(shifts),
        groups=tuple(position[scenario.ues[i].sector_index] for i in members),
    )


def certify_stage(scenario: Scenario, stage: Stage, budget, rates, shifts=None, tol=1e-12,
                  split=SplitPolicy.PROPORTIONAL):
    """
    Compare a stage's protocol objective with the coordinate-ascent optimum.

    Args:
        scenario: Network scenario
        stage: Which stage the rates belong to
        budget: Stage budget
        rates: Protocol rates in roster order
        shifts: Rate shifts in roster order (stage 2)
        tol: Ascent tolerance
        split: MME split the protocol ran with

    Returns:
        StageCertificate, or None for a zero budget or an empty stage
    """
    members = stage_participants(scenario, stage)
    if budget <= 0 or not members:
        return None

    utilities = [scenario.ues[i].utility for i in members]
    shift_values = np.zeros(len(scenario.ues)) if shifts is None else np.asarray(shifts, dtype=float)
    member_shifts = shift_values[members]
    problem = stage_problem(scenario, members, budget, member_shifts, split)
    oracle_rates = oracle_ascent_solve(problem, tol=tol)

    protocol_rates = np.asarray(rates, dtype=float)[members]
    certificate = StageCertificate(
        stage=stage,
        protocol_objective=stage_objective(utilities, protocol_rates, member_shifts),
        oracle_objective=stage_objective(utilities, oracle_rates, member_shifts),
    )
    logger.info(
        f"Stage {stage.value}: protocol objective {certificate.protocol_objective:.6f}, "
        f"oracle objective {certificate.oracle_objective:.6f}, gap {certificate.gap:.2e}"
    )
    return certificate


def certify_two_stage(scenario: Scenario, result: AllocationResult, tol=1e-12, split=SplitPolicy.PROPORTIONAL):
    """Certificates for both stages; stage 2 is judged with the protocol's stage-1 shifts."""
    certificates = [
        certify_stage(scenario, Stage.RADAR, scenario.r_radar_total, result.r_radar, tol=tol, split=split),
        certify_stage(
            scenario, Stage.COMM, scenario.r_comm_total, result.r_comm, shifts=result.r_radar, tol=tol, split=split
        ),
    ]
    return [certificate for certificate in certificates if certificate is not None]
