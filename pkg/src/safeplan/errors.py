"""Exception hierarchy shared by every safeplan module."""


class SafePlanError(Exception):
    """Base class for all errors raised by safeplan."""


class ValidationError(SafePlanError, ValueError):
    """An object is malformed with respect to its variable set."""


class PreconditionError(SafePlanError):
    """An action was applied in a state that does not satisfy its precondition."""


class ResolutionError(SafePlanError, KeyError):
    """A plan step names an action the model does not define."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ParseError(SafePlanError, ValueError):
    """A file does not conform to its schema.

    ``line`` is 1-based when known; ``path`` is a JSON path such as
    ``$.actions[2].pre``.
    """

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.path = path


class StructureError(ParseError):
    """A trajectory record does not alternate states and actions."""


class ConsistencyError(ParseError):
    """A trajectory step disagrees with the reference model."""

    def __init__(self, message: str, step: int, line: int | None = None):
        super().__init__(f"step {step}: {message}", line=line)
        self.step = step


class ModelInconsistencyError(SafePlanError):
    """Observed triplets cannot come from one deterministic action."""


class StateSpaceCapError(SafePlanError):
    """Exhaustive enumeration would exceed the configured state cap."""


class SamplingError(SafePlanError):
    """Rejection sampling gave up before finding an acceptable draw."""


class SemanticError(ParseError):
    """A well-formed file refers to an undeclared variable, value or action."""
