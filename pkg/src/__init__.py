"""Radar coexistence rate allocation: utilities, protocol, oracle, scenarios and sweeps."""
