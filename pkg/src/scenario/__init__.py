"""Scenario model, built-in roster and YAML documents."""
