from .constants import Constants


class QuantOrdError(Exception):
    """Base error; every subclass maps onto a CLI exit code."""

    exitCode = Constants.EXIT_FAILURE
    kind = "error"

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def toDict(self) -> dict:
        return {"error": self.kind, "message": self.message, "exit_code": self.exitCode, "details": self.details}


class ConfigError(QuantOrdError):
    exitCode = Constants.EXIT_CONFIG
    kind = "config_error"


class DataError(QuantOrdError):
    exitCode = Constants.EXIT_DATA
    kind = "data_error"


class NumericalError(QuantOrdError):
    exitCode = Constants.EXIT_NUMERICAL
    kind = "numerical_error"


class DegenerateSeriesError(NumericalError):
    kind = "degenerate_series"


class ParameterError(QuantOrdError, ValueError):
    exitCode = Constants.EXIT_CONFIG
    kind = "parameter_error"


class DomainError(QuantOrdError, ValueError):
    exitCode = Constants.EXIT_DATA
    kind = "domain_error"
