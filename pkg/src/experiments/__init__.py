"""Bandwidth sweeps."""
