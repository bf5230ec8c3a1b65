"""
Tests for the scenario model, the built-in roster and YAML documents.
"""
import pytest

from src.scenario.loader import load_scenario, load_scenario_file, save_scenario, scenario_to_document
from src.scenario.model import Cell, Scenario, UserEquipment
from src.scenario.table1 import builtin_table1
from src.utility.functions import LogParams, SigmoidParams
from src.utils.errors import ScenarioParseError, ScenarioValidationError

MINIMAL = """\
schema_version: 1
sectors: 1
interference: [false]
budgets: {r_radar: 0, r_comm: 10}
cells:
  - {id: A, ues: 1}
ues:
  - {id: A1, cell: A, sector: 1, utility: {type: log, k: 2}}
"""


def by_id(scenario):
    return {ue.id: ue for ue in scenario.ues}


class TestBuiltinTable1:
    """Test cases for the built-in roster."""

    def test_counts(self, table1):
        assert len(table1.ues) == 54
        assert [cell.ue_count for cell in table1.cells] == [18, 18, 18]
        assert sum(1 for ue in table1.ues if ue.cell == "B") == 18

    def test_six_per_sector_per_cell(self, table1):
        for cell in "ABC":
            for sector in (1, 2, 3):
                members = [ue for ue in table1.ues if ue.cell == cell and ue.sector_index == sector]
                assert len(members) == 6
                assert sum(isinstance(ue.utility, SigmoidParams) for ue in members) == 3

    def test_printed_values(self, table1):
        ues = by_id(table1)
        assert ues["A1"].utility == SigmoidParams(a=3, b=10.0)
        assert ues["C18"].utility == LogParams(k=18)
        assert ues["A11"].utility == LogParams(k=2)
        assert ues["A11"].sector_index == 2
        assert ues["A3"].utility == SigmoidParams(a=1, b=10.6)
        assert ues["C5"].utility == LogParams(k=1.8)

    def test_mask_and_budgets(self, table1):
        assert table1.interference_mask == (False, False, True)
        assert table1.interfering_sectors == (3,)
        assert table1.r_radar_total == 200.0
        assert table1.r_comm_total == 400.0
        assert table1.default_r_max == 100.0

    def test_roster_order(self, table1):
        assert table1.ue_ids()[:3] == ("A1", "A2", "A3")
        assert table1.ue_ids()[-1] == "C18"


class TestScenarioModel:
    """Test cases for Scenario validation and copies."""

    def test_duplicate_ue_id(self):
        utility = LogParams(k=1)
        with pytest.raises(ScenarioValidationError):
            Scenario(
                cells=(Cell("A", 2),),
                sector_count=1,
                ues=(UserEquipment("U1", "A", 1, utility), UserEquipment("U1", "A", 1, utility)),
                interference_mask=(False,),
                r_radar_total=0.0,
                r_comm_total=1.0,
            )

    def test_sector_out_of_range(self):
        with pytest.raises(ScenarioValidationError):
            Scenario((Cell("A", 1),), 1, (UserEquipment("U1", "A", 2, LogParams(k=1)),), (False,), 0.0, 1.0)

    def test_cell_count_mismatch(self):
        with pytest.raises(ScenarioValidationError):
            Scenario((Cell("A", 3),), 1, (UserEquipment("U1", "A", 1, LogParams(k=1)),), (False,), 0.0, 1.0)

    def test_negative_budget(self):
        with pytest.raises(ScenarioValidationError):
            Scenario((Cell("A", 1),), 1, (UserEquipment("U1", "A", 1, LogParams(k=1)),), (False,), -1.0, 1.0)

    def test_without_radar(self, table1):
        baseline = table1.without_radar()
        assert baseline.interference_mask == (False, False, False)
        assert baseline.ues == table1.ues

    def test_with_budgets(self, table1):
        changed = table1.with_budgets(r_radar=0)
        assert changed.r_radar_total == 0.0
        assert changed.r_comm_total == 400.0


class TestLoadScenario:
    """Test cases for load_scenario."""

    def test_minimal_document(self):
        scenario = load_scenario(MINIMAL)
        assert scenario.ue_ids() == ("A1",)
        assert scenario.ues[0].utility == LogParams(k=2, r_max=100.0)
        assert scenario.r_comm_total == 10.0

    def test_duplicate_ue_id(self):
        text = MINIMAL.replace("{id: A, ues: 1}", "{id: A, ues: 2}") + (
            "  - {id: A1, cell: A, sector: 1, utility: {type: log, k: 3}}\n"
        )
        with pytest.raises(ScenarioValidationError):
            load_scenario(text)

    def test_malformed_yaml_reports_line(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            load_scenario("schema_version: 1\nsectors: [1, 2\ncells: []\n")
        assert excinfo.value.line is not None
        assert excinfo.value.line >= 2

    def test_missing_field(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            load_scenario(MINIMAL.replace("cell: A, sector: 1", "cell: A"))
        assert excinfo.value.field == "ues[0].sector"

    def test_missing_top_level_key(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            load_scenario(MINIMAL.replace("sectors: 1\n", ""))
        assert excinfo.value.field == "sectors"

    def test_unsupported_schema_version(self):
        with pytest.raises(ScenarioParseError):
            load_scenario(MINIMAL.replace("schema_version: 1", "schema_version: 2"))

    def test_invalid_utility_parameters(self):
        with pytest.raises(ScenarioValidationError):
            load_scenario(MINIMAL.replace("k: 2", "k: -2"))

    def test_unknown_utility_type(self):
        with pytest.raises(ScenarioParseError):
            load_scenario(MINIMAL.replace("type: log", "type: linear"))

    def test_per_ue_r_max(self):
        scenario = load_scenario(MINIMAL.replace("k: 2}", "k: 2, r_max: 50}"))
        assert scenario.ues[0].utility.r_max == 50.0

    def test_load_file_uses_stem_as_name(self, tmp_path):
        path = tmp_path / "tiny.yaml"
        path.write_text(MINIMAL, encoding="utf-8")
        assert load_scenario_file(path).name == "tiny"


class TestRoundTrip:
    """Serialized scenarios load back unchanged."""

    def test_table1_round_trip(self):
        table1 = builtin_table1()
        assert load_scenario(save_scenario(table1)) == table1

    def test_canonical_text_is_stable(self):
        text = save_scenario(builtin_table1())
        assert save_scenario(load_scenario(text)) == text

    def test_document_key_order(self):
        document = scenario_to_document(builtin_table1())
        assert list(document) == [
            "schema_version", "sectors", "interference", "default_r_max", "budgets", "cells", "ues",
        ]
        assert "r_max" not in document["ues"][3]["utility"]
