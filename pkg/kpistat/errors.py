"""
Exception hierarchy for kpistat.

Every error carries a human readable ``detail`` and the process ``exit_code``
the CLI should terminate with (2 = data error, 3 = numeric failure).
"""
from typing import Optional


class KpiError(Exception):
    """Base class for all kpistat errors"""

    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# Data errors
class ParseError(KpiError):
    def __init__(self, detail: str, row: Optional[int] = None, column: Optional[int] = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{detail}")
        self.row = row
        self.column = column


class DuplicateLabel(KpiError):
    def __init__(self, label: str):
        super().__init__(f"Duplicate label '{label}'")
        self.label = label


class EmptyDataset(KpiError):
    def __init__(self, detail: str = "Dataset has no samples"):
        super().__init__(detail)


class ZeroVariance(KpiError):
    def __init__(self, label: str):
        super().__init__(f"Column '{label}' has zero variance")
        self.label = label


class TooFewSamples(KpiError):
    def __init__(self, required: int, actual: int):
        super().__init__(f"At least {required} samples required, got {actual}")
        self.required = required
        self.actual = actual


class ShapeError(KpiError):
    pass


class DomainError(KpiError):
    pass


class InvalidDistanceMatrix(KpiError):
    pass


class DegenerateMargin(KpiError):
    def __init__(self, label: str):
        super().__init__(f"Margin of '{label}' sums to zero")
        self.label = label


class UnknownDataset(KpiError):
    def __init__(self, name: str):
        super().__init__(f"Unknown builtin dataset '{name}'")
        self.name = name


class InputNotFound(KpiError):
    def __init__(self, path: str, reason: str = "no such file"):
        super().__init__(f"Cannot read input '{path}': {reason}")
        self.path = path


# Numeric failures
class NumericError(KpiError):
    exit_code = 3


class ConvergenceError(NumericError):
    pass


class StageError(KpiError):
    """A pipeline stage failed; keeps the exit code of the underlying error"""

    def __init__(self, stage: str, cause: KpiError):
        super().__init__(f"stage '{stage}': {cause.detail}")
        self.stage = stage
        self.cause = cause
        self.exit_code = cause.exit_code
