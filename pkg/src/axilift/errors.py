"""Exception and warning types shared by all modules."""


class AxiliftError(Exception):
    """Base class; the CLI maps these to exit status 1."""

    kind = "error"

    def record(self):
        return {"error": self.kind, "message": str(self)}


class DomainError(AxiliftError, ValueError):
    kind = "domain-error"


class ConfigurationError(AxiliftError, ValueError):
    kind = "configuration-error"


class ShapeError(AxiliftError, ValueError):
    kind = "shape-error"


class AssemblyError(AxiliftError, ValueError):
    kind = "assembly-error"


class ResolutionError(AxiliftError, ValueError):
    kind = "resolution-error"


class ConvergenceError(AxiliftError, RuntimeError):
    kind = "non-convergence"

    def __init__(self, message, last_residual=None, last_value=None):
        super().__init__(message)
        self.last_residual = last_residual
        self.last_value = last_value

    def record(self):
        rec = super().record()
        rec["last_residual"] = self.last_residual
        rec["last_value"] = self.last_value
        return rec


class EvolutionError(AxiliftError, RuntimeError):
    kind = "evolution-error"

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step

    def record(self):
        rec = super().record()
        rec["step"] = self.step
        return rec


class UndefinedRatioWarning(UserWarning):
    """A requested ratio has a zero denominator; the result is NaN."""
