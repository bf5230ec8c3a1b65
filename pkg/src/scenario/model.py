"""
Network scenario data model.
Cells, UEs with their utilities, the per-sector interference mask and the stage budgets.
"""
from dataclasses import dataclass, field, replace
from typing import Tuple

from src.utility.functions import UtilityFunction
from src.utils.errors import ScenarioValidationError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Cell:
    """A cell (one eNB) and the number of UEs it serves."""

    id: str
    ue_count: int


@dataclass(frozen=True)
class UserEquipment:
    """A UE attached to one sector of one cell, running one application."""

    id: str
    cell: str
    sector_index: int
    utility: UtilityFunction


@dataclass(frozen=True)
class Scenario:
    """
    Immutable network scenario.

    interference_mask[l - 1] is True when sector index l shares the radar's band.
    """

    cells: Tuple[Cell, ...]
    sector_count: int
    ues: Tuple[UserEquipment, ...]
    interference_mask: Tuple[bool, ...]
    r_radar_total: float
    r_comm_total: float
    default_r_max: float = 100.0
    name: str = field(default="scenario", compare=False)

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Check every scenario invariant.

        Raises:
            ScenarioValidationError: naming the first violated invariant
        """
        if self.sector_count < 1:
            raise ScenarioValidationError(f"sectors must be at least 1, got {self.sector_count}")
        if len(self.interference_mask) != self.sector_count:
            raise ScenarioValidationError(
                f"interference mask has {len(self.interference_mask)} entries for {self.sector_count} sectors"
            )
        if self.r_radar_total < 0 or self.r_comm_total < 0:
            raise ScenarioValidationError("budgets must be nonnegative")
        if not self.default_r_max > 0:
            raise ScenarioValidationError(f"default_r_max must be positive, got {self.default_r_max}")

        cell_ids = [cell.id for cell in self.cells]
        if len(set(cell_ids)) != len(cell_ids):
            raise ScenarioValidationError("cell ids must be unique")

        seen = set()
        counts = {cell_id: 0 for cell_id in cell_ids}
        for ue in self.ues:
            if ue.id in seen:
                raise ScenarioValidationError(f"duplicate UE id '{ue.id}'")
            seen.add(ue.id)
            if ue.cell not in counts:
                raise ScenarioValidationError(f"UE '{ue.id}' references unknown cell '{ue.cell}'")
            if not 1 <= ue.sector_index <= self.sector_count:
                raise ScenarioValidationError(
                    f"UE '{ue.id}' sector {ue.sector_index} outside 1..{self.sector_count}"
                )
            counts[ue.cell] += 1

        for cell in self.cells:
            if counts[cell.id] != cell.ue_count:
                raise ScenarioValidationError(
                    f"cell '{cell.id}' declares {cell.ue_count} UEs but {counts[cell.id]} are attached"
                )

    @property
    def interfering_sectors(self):
        return tuple(index + 1 for index, masked in enumerate(self.interference_mask) if masked)

    def ue_ids(self):
        return tuple(ue.id for ue in self.ues)

    def without_radar(self):
        """Copy with the interference mask cleared (no-radar baseline)."""
        return replace(self, interference_mask=(False,) * self.sector_count)

    def with_budgets(self, r_radar=None, r_comm=None):
        return replace(
            self,
            r_radar_total=self.r_radar_total if r_radar is None else float(r_radar),
            r_comm_total=self.r_comm_total if r_comm is None else float(r_comm),
        )
