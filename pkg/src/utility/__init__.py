"""Application utility functions."""
