"""
Scenario documents.
Loads and saves scenarios as YAML (schema_version 1); see README for the schema.
"""
import logging
from pathlib import Path

import yaml

from src.scenario.model import SCHEMA_VERSION, Cell, Scenario, UserEquipment
from src.utility.functions import utility_from_dict, utility_to_dict
from src.utils.errors import ScenarioParseError, ScenarioValidationError, UtilityDomainError

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("schema_version", "sectors", "interference", "budgets", "cells", "ues")
UTILITY_TYPES = ("sigmoid", "log")


def _require(mapping, key, context):
    if not isinstance(mapping, dict):
        raise ScenarioParseError(f"{context} must be a mapping", field=context)
    if key not in mapping:
        raise ScenarioParseError(f"missing key in {context}", field=f"{context}.{key}" if context else key)
    return mapping[key]


def _number(value, field_name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"expected a number, got {value!r}", field=field_name)
    return float(value)


def _integer(value, field_name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(f"expected an integer, got {value!r}", field=field_name)
    return value


def load_scenario(text, name="scenario"):
    """
    Parse and validate a scenario document.

    Args:
        text: YAML document
        name: Label carried by the returned scenario

    Returns:
        Scenario

    Raises:
        ScenarioParseError: malformed YAML or missing/mistyped field
        ScenarioValidationError: scenario invariant violated
    """
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioParseError(f"invalid YAML: {getattr(e, 'problem', e)}", line=line) from e

    if not isinstance(document, dict):
        raise ScenarioParseError("scenario document must be a mapping")
    for key in REQUIRED_KEYS:
        _require(document, key, "")

    version = document["schema_version"]
    if version != SCHEMA_VERSION:
        raise ScenarioParseError(f"unsupported schema_version {version!r}", field="schema_version")

    sectors = _integer(document["sectors"], "sectors")
    interference = document["interference"]
    if not isinstance(interference, list) or not all(isinstance(flag, bool) for flag in interference):
        raise ScenarioParseError("interference must be a list of booleans", field="interference")

    budgets = document["budgets"]
    r_radar = _number(_require(budgets, "r_radar", "budgets"), "budgets.r_radar")
    r_comm = _number(_require(budgets, "r_comm", "budgets"), "budgets.r_comm")
    default_r_max = _number(document.get("default_r_max", 100.0), "default_r_max")

    if not isinstance(document["cells"], list):
        raise ScenarioParseError("cells must be a list", field="cells")
    cells = []
    for position, entry in enumerate(document["cells"]):
        context = f"cells[{position}]"
        cells.append(
            Cell(
                id=str(_require(entry, "id", context)),
                ue_count=_integer(_require(entry, "ues", context), f"{context}.ues"),
            )
        )

    if not isinstance(document["ues"], list):
        raise ScenarioParseError("ues must be a list", field="ues")
    ues = []
    for position, entry in enumerate(document["ues"]):
        context = f"ues[{position}]"
        utility_doc = _require(entry, "utility", context)
        kind = _require(utility_doc, "type", f"{context}.utility")
        if kind not in UTILITY_TYPES:
            raise ScenarioParseError(f"unknown utility type {kind!r}", field=f"{context}.utility.type")
        try:
            utility = utility_from_dict(utility_doc, default_r_max=default_r_max)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, UtilityDomainError):
                raise ScenarioValidationError(f"{context}.utility: {e}") from e
            raise ScenarioParseError(f"invalid utility: {e}", field=f"{context}.utility") from e
        ues.append(
            UserEquipment(
                id=str(_require(entry, "id", context)),
                cell=str(_require(entry, "cell", context)),
                sector_index=_integer(_require(entry, "sector", context), f"{context}.sector"),
                utility=utility,
            )
        )

    scenario = Scenario(
        cells=tuple(cells),
        sector_count=sectors,
        ues=tuple(ues),
        interference_mask=tuple(interference),
        r_radar_total=r_radar,
        r_comm_total=r_comm,
        default_r_max=default_r_max,
        name=name,
    )
    logger.info(f"Success: Loaded scenario '{name}' with {len(scenario.ues)} UEs")
    return scenario


def load_scenario_file(path):
    path = Path(path)
    return load_scenario(path.read_text(encoding="utf-8"), name=path.stem)


def scenario_to_document(scenario: Scenario):
    """Canonical document form of a scenario (key order is part of the format)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "sectors": scenario.sector_count,
        "interference": list(scenario.interference_mask),
        "default_r_max": scenario.default_r_max,
        "budgets": {"r_radar": scenario.r_radar_total, "r_comm": scenario.r_comm_total},
        "cells": [{"id": cell.id, "ues": cell.ue_count} for cell in scenario.cells],
        "ues": [
            {
                "id": ue.id,
                "cell": ue.cell,
                "sector": ue.sector_index,
                "utility": utility_to_dict(ue.utility, default_r_max=scenario.default_r_max),
            }
            for ue in scenario.ues
        ],
    }


def save_scenario(scenario: Scenario):
    """Serialize a scenario to its canonical YAML text."""
    return yaml.safe_dump(scenario_to_document(scenario), sort_keys=False, default_flow_style=None)
