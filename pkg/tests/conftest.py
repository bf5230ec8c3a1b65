"""
Shared fixtures for the rate allocation tests.
Run with: pytest tests/
"""
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.scenario.model import Cell, Scenario, UserEquipment  # noqa: E402
from src.scenario.table1 import builtin_table1  # noqa: E402


def build_scenario(utilities_by_sector, interfering=(), r_radar=0.0, r_comm=10.0):
    """
    Single-cell scenario from per-sector utility lists.

    Args:
        utilities_by_sector: list of lists; entry l-1 holds the utilities of sector l
        interfering: sector indices sharing the radar band
    """
    ues = []
    for sector, utilities in enumerate(utilities_by_sector, start=1):
        for utility in utilities:
            ues.append(UserEquipment(f"U{len(ues) + 1}", "A", sector, utility))
    sectors = len(utilities_by_sector)
    return Scenario(
        cells=(Cell("A", len(ues)),),
        sector_count=sectors,
        ues=tuple(ues),
        interference_mask=tuple(index in interfering for index in range(1, sectors + 1)),
        r_radar_total=float(r_radar),
        r_comm_total=float(r_comm),
    )


@pytest.fixture
def make_scenario():
    return build_scenario


@pytest.fixture(scope="session")
def table1():
    return builtin_table1()
