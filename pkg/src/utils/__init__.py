"""Shared exceptions and CSV output helpers."""
