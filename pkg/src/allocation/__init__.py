"""Bidding subproblem, distributed protocol, oracle and certification."""
