"""
Exception hierarchy for the rate allocation project.
Every error raised on purpose by the library derives from AllocationError.
"""


class AllocationError(Exception):
    """Base class for rate allocation errors."""


class UtilityDomainError(AllocationError, ValueError):
    """A utility or subproblem was evaluated outside its domain."""


class DegeneratePriceError(AllocationError):
    """All bids of a pricing agent are zero, so the shadow price is undefined."""


class NoEligibleGroupError(AllocationError):
    """Every sector group is masked; the stage budget cannot be placed anywhere."""


class TooLargeError(AllocationError):
    """The exhaustive grid oracle would visit more points than its guard allows."""

    def __init__(self, points, limit):
        super().__init__(f"Grid of {points} points exceeds the limit of {limit}")
        self.points = points
        self.limit = limit


class OracleMaxItersError(AllocationError):
    """Coordinate ascent hit its sweep cap before the objective gain fell below tolerance."""

    def __init__(self, sweeps, last_gain, objective):
        super().__init__(
            f"Coordinate ascent stopped after {sweeps} sweeps (last gain {last_gain:.3e}, objective {objective:.9f})"
        )
        self.sweeps = sweeps
        self.last_gain = last_gain
        self.objective = objective


class ScenarioParseError(AllocationError):
    """A scenario document could not be parsed."""

    def __init__(self, message, line=None, field=None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.line = line
        self.field = field


class ScenarioValidationError(AllocationError, ValueError):
    """A scenario violates one of its invariants."""
