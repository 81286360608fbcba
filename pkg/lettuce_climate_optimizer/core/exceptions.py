from typing import Optional


class OptimizerError(Exception):
    """Base class for all errors raised by the optimizer"""

    exit_code = 2


class OptimizerValidationError(OptimizerError):
    """Bad input: malformed files, invalid configuration, mismatched shapes"""

    exit_code = 1


class OptimizerRuntimeError(OptimizerError):
    """Failure while computing on valid input"""

    exit_code = 2


class WeatherParseError(OptimizerValidationError):
    """A weather CSV row could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class WeatherStructureError(OptimizerValidationError):
    """Weather file does not consist of whole 24-hour days"""


class WeatherValidationError(OptimizerValidationError):
    """Weather values violate physical sanity bounds"""


class DimensionMismatchError(OptimizerValidationError):
    """Policy, density or table shape does not match grid and horizon"""


class ConfigError(OptimizerValidationError):
    """Scenario or sweep configuration is inconsistent"""


class CropDomainError(OptimizerRuntimeError):
    """Temperature outside the window where the carboxylation conductance is positive"""

    def __init__(self, temperature: float):
        self.temperature = float(temperature)
        super().__init__(
            f"carboxylation conductance is not positive at T={self.temperature:.4g} degC"
        )


class SolverError(OptimizerRuntimeError):
    """No admissible control could be scored on a day"""

    def __init__(self, message: str, day: Optional[int] = None, cell: Optional[int] = None):
        self.day = day
        self.cell = cell
        super().__init__(message)
