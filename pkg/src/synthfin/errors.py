"""Exception hierarchy shared by every module."""


class SynthFinError(Exception):
    """Base class for all library errors."""


class InputError(SynthFinError):
    """Bad user-supplied input (files, configs). Maps to CLI exit code 2."""


class MalformedInputError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(InputError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DomainError(SynthFinError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class InsufficientDataError(SynthFinError, ValueError):
    pass


class DegenerateSeriesError(SynthFinError, ValueError):
    """Zero variance or an otherwise undefined ratio."""


class ContractError(SynthFinError, ValueError):
    """A caller violated an operation's precondition."""


class ShapeError(ContractError):
    pass


class SingularityError(SynthFinError, ArithmeticError):
    pass


class InfeasibilityError(SynthFinError, ValueError):
    pass


class FitError(SynthFinError, RuntimeError):
    """Optimizer failed to converge. Carries the last iterate and objective trace."""

    def __init__(self, message: str, last_iterate=None, trace=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.trace = list(trace) if trace is not None else []


class DivergenceError(SynthFinError, RuntimeError):
    def __init__(self, message: str, epoch: int, phase: str | None = None):
        self.epoch = epoch
        self.phase = phase
        where = f"epoch {epoch}" if phase is None else f"{phase} epoch {epoch}"
        super().__init__(f"{where}: {message}")
