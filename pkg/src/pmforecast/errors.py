"""Exception types shared across the pipeline."""

from __future__ import annotations


class PmfError(Exception):
    """Base class for all pmforecast errors."""


class InputError(PmfError):
    """Problems with user-supplied logs or configuration (CLI exit code 2)."""


class EmptyLog(InputError):
    pass


class MissingColumn(InputError):
    def __init__(self, column: str):
        super().__init__(f"required column {column!r} not found in header")
        self.column = column


class UnparseableTimestamp(InputError):
    def __init__(self, row: int, value: str, pattern: str):
        super().__init__(
            f"row {row}: cannot parse timestamp {value!r} with pattern {pattern!r}"
        )
        self.row = row
        self.value = value


class MalformedXml(InputError):
    pass


class MissingAttribute(InputError):
    def __init__(self, trace_index: int, event_index: int, key: str):
        super().__init__(
            f"trace {trace_index}, event {event_index}: missing attribute {key!r}"
        )
        self.trace_index = trace_index
        self.event_index = event_index
        self.key = key


class ZeroDuration(InputError):
    pass


class TooFewOccurrences(InputError):
    pass


class InvalidSplit(InputError):
    pass


class ModelError(PmfError):
    """Fitting or forecasting failures (CLI exit code 3 in strict mode)."""


class SeriesTooShort(ModelError):
    pass


class NotConverged(ModelError):
    pass


class SingularDesign(ModelError):
    pass
