"""Exception hierarchy shared by every hypergen module."""


class HypergenError(Exception):
    """Base class for all errors raised by hypergen."""


class ShapeError(HypergenError, ValueError):
    """Tensor dimensions do not line up."""


class InputError(HypergenError, ValueError):
    """Caller supplied invalid arguments or data."""


class ConfigError(HypergenError):
    """Invalid or incomplete configuration."""


class ConsistencyError(HypergenError):
    """Internal state disagrees with itself (registry vs heads, stale caches)."""


class TrainingError(HypergenError):
    """Non-finite values during optimisation."""

    def __init__(self, message, step=None, task=None, batch=None):
        details = []
        if task is not None:
            details.append(f"task={task}")
        if batch is not None:
            details.append(f"batch={batch}")
        if step is not None:
            details.append(f"step={step}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.step = step
        self.task = task
        self.batch = batch


class ClientError(HypergenError):
    """Transport, authentication or protocol failure talking to the LLM endpoint."""


class DegenerateResponseError(HypergenError):
    """The LLM answered, but with nothing usable."""


class UnrecognizedRequirementError(HypergenError):
    """No task-type keyword could be found in a requirement sentence."""


class IngestionError(HypergenError):
    """A data file could not be parsed."""

    def __init__(self, message, row=None, column=None):
        if row is not None or column is not None:
            message = f"{message} (row {row}, column {column!r})"
        super().__init__(message)
        self.row = row
        self.column = column


class FormatError(HypergenError):
    """A serialized artifact is malformed."""
