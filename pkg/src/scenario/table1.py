"""
Built-in three-cell, three-sector scenario with 54 UEs.
Each sector of each cell hosts three sigmoidal and three logarithmic applications;
sector 3 shares the radar band.
"""
from src.scenario.model import Cell, Scenario, UserEquipment
from src.utility.functions import LogParams, SigmoidParams

R_RADAR = 200.0
R_COMM = 400.0
DEFAULT_R_MAX = 100.0

# (cell, sector): ([(ue number, a, b) x3], [(ue number, k) x3])
# Values are taken as printed, including the a = 1 rows.
_ROSTER = {
    ("A", 1): ([(1, 3, 10.0), (2, 3, 10.3), (3, 1, 10.6)], [(4, 1.1), (5, 1.2), (6, 1.3)]),
    ("A", 2): ([(7, 3, 10.0), (8, 3, 15.3), (9, 3, 12.0)], [(10, 1), (11, 2), (12, 3)]),
    ("A", 3): ([(13, 3, 15.1), (14, 3, 15.3), (15, 3, 15.5)], [(16, 10), (17, 11), (18, 12)]),
    ("B", 1): ([(1, 3, 15.9), (2, 3, 11.2), (3, 1, 11.5)], [(4, 1.4), (5, 1.5), (6, 1.6)]),
    ("B", 2): ([(7, 3, 13), (8, 3, 14), (9, 1, 15)], [(10, 4), (11, 5), (12, 6)]),
    ("B", 3): ([(13, 3, 15.7), (14, 3, 15.9), (15, 3, 17.3)], [(16, 13), (17, 14), (18, 15)]),
    ("C", 1): ([(1, 3, 11.8), (2, 3, 12.1), (3, 1, 12.4)], [(4, 1.7), (5, 1.8), (6, 1.9)]),
    ("C", 2): ([(7, 3, 16), (8, 3, 17), (9, 1, 18)], [(10, 7), (11, 8), (12, 9)]),
    ("C", 3): ([(13, 3, 17.5), (14, 3, 17.7), (15, 3, 17.9)], [(16, 16), (17, 17), (18, 18)]),
}


def builtin_table1():
    """
    Build the built-in 54-UE scenario.

    Returns:
        Scenario: 3 cells x 3 sectors x 6 UEs, sector 3 interfering,
        radar/comm budgets 200/400
    """
    ues = []
    for (cell, sector), (sigmoids, logs) in _ROSTER.items():
        for number, a, b in sigmoids:
            ues.append(UserEquipment(f"{cell}{number}", cell, sector, SigmoidParams(a=float(a), b=float(b))))
        for number, k in logs:
            ues.append(UserEquipment(f"{cell}{number}", cell, sector, LogParams(k=float(k), r_max=DEFAULT_R_MAX)))

    ues.sort(key=lambda ue: (ue.cell, int(ue.id[1:])))
    cells = tuple(Cell(cell_id, sum(1 for ue in ues if ue.cell == cell_id)) for cell_id in ("A", "B", "C"))

    return Scenario(
        cells=cells,
        sector_count=3,
        ues=tuple(ues),
        interference_mask=(False, False, True),
        r_radar_total=R_RADAR,
        r_comm_total=R_COMM,
        default_r_max=DEFAULT_R_MAX,
        name="table1",
    )
