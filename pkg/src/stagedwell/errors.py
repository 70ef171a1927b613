"""Exception types shared across the package.

Everything raised deliberately by this package derives from StagedwellError,
so callers (and the command line driver) can catch one base class.
"""

from __future__ import annotations


class StagedwellError(Exception):
    """Base class for all errors raised by this package."""


class MatrixValidationError(StagedwellError, ValueError):
    """A proposed transition matrix is not column substochastic."""


class NonSquareMatrixError(MatrixValidationError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"transition matrix must be square, got shape {self.shape}")


class NonFiniteEntryError(MatrixValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = int(row), int(col), float(value)
        super().__init__(f"entry ({self.row}, {self.col}) is not finite: {self.value}")


class NegativeEntryError(MatrixValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = int(row), int(col), float(value)
        super().__init__(f"entry ({self.row}, {self.col}) is negative: {self.value}")


class ColumnSumError(MatrixValidationError):
    """A column's outgoing probabilities exceed one (column index is 0-based)."""

    def __init__(self, column, total):
        self.column, self.total = int(column), float(total)
        super().__init__(f"column {self.column} sums to {self.total}, which exceeds 1")


class InvalidDistributionError(StagedwellError, ValueError):
    """A probability vector has entries outside [0, 1] or does not sum to 1."""


class ScheduleExhaustedError(StagedwellError, IndexError):
    """A matrix was requested past the end of an error-beyond-end schedule."""

    def __init__(self, time_index, prefix_length):
        self.time_index, self.prefix_length = int(time_index), int(prefix_length)
        super().__init__(
            f"schedule defines {self.prefix_length} steps and does not extend, "
            f"but step {self.time_index} was requested"
        )


class NonAbsorbingError(StagedwellError, RuntimeError):
    """Surviving mass failed to drop below the tail tolerance before the horizon cap."""

    def __init__(self, surviving_mass, horizon, context=None):
        self.surviving_mass = float(surviving_mass)
        self.horizon = int(horizon)
        self.context = context
        where = f"{context}: " if context else ""
        super().__init__(
            f"{where}surviving mass {self.surviving_mass:.6g} still above the tail "
            f"tolerance after {self.horizon} steps; the schedule may never absorb"
        )


class NonTerminatingError(StagedwellError, RuntimeError):
    """A simulated trajectory exceeded the hard per-trajectory step cap."""

    def __init__(self, step_cap):
        self.step_cap = int(step_cap)
        super().__init__(f"trajectory still alive after {self.step_cap} steps")


class NegativeVarianceError(StagedwellError, ValueError):
    """Second moment is smaller than the squared first moment beyond roundoff."""

    def __init__(self, first_moment, second_moment):
        self.first_moment = float(first_moment)
        self.second_moment = float(second_moment)
        super().__init__(
            f"inconsistent moments: E[X]={self.first_moment!r}, "
            f"E[X^2]={self.second_moment!r} gives negative variance"
        )


class ScenarioError(StagedwellError, ValueError):
    """A scenario file or result export could not be handled."""


class ScenarioParseError(ScenarioError):
    def __init__(self, location, detail):
        self.location = str(location)
        self.detail = str(detail)
        super().__init__(f"{self.location}: {self.detail}")


class UnknownMatrixError(ScenarioError):
    def __init__(self, name, known):
        self.name = str(name)
        self.known = tuple(known)
        super().__init__(f"unknown matrix name {self.name!r}; defined: {list(self.known)}")


class UnknownLabelError(ScenarioError):
    def __init__(self, label, known=()):
        self.label = str(label)
        self.known = tuple(known)
        hint = f"; states: {list(self.known)}" if self.known else ""
        super().__init__(f"unknown state label {self.label!r}{hint}")
