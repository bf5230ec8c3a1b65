"""Test suite for the rate allocation simulator."""
