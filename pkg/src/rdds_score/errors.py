"""Exception hierarchy.

Every error belongs to one of three families, each mapped to a CLI exit code:
parse failures (2), invariant violations in the data (3) and configuration or
scoring-setup problems (4).
"""

from __future__ import annotations


class RddsError(Exception):
    exit_code = 1
    kind = "error"


class ParseError(RddsError):
    """Malformed input text. ``line`` and ``column`` are 1-based when known."""

    exit_code = 2
    kind = "parse"

    def __init__(self, message: str, *, path=None, line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)


class SchemaError(ParseError):
    kind = "schema"


class InvariantError(RddsError):
    exit_code = 3
    kind = "invariant"


class InvalidVerticalPenetration(InvariantError):
    pass


class MonotonicityViolation(InvariantError):
    """Timestamps not strictly increasing. ``row`` is the 1-based sample index."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message)


class SampleGapViolation(InvariantError):
    pass


class StartsOffRoad(InvariantError):
    pass


class NegativeDtre(InvariantError):
    pass


class ConfigError(RddsError):
    exit_code = 4
    kind = "config"


class InvalidFootprint(ConfigError):
    pass


class WeightSumViolation(ConfigError):
    pass


class LengthMismatch(ConfigError):
    pass


class UnknownScenario(ConfigError):
    pass


class ScenarioMismatch(ConfigError):
    pass


class EmptyRunSet(ConfigError):
    pass


class SpecInfeasible(ConfigError):
    pass
