"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class PrecsError(Exception):
    exit_code = 1


class ConfigError(PrecsError, ValueError):
    exit_code = 2


class CoverageError(PrecsError):
    """The phase-space grid (or the Fock truncation) misses part of the state."""

    exit_code = 3

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class TruncationError(CoverageError):
    pass


class SignatureError(PrecsError, ValueError):
    """Operator dimensions do not match the declared subsystem."""

    exit_code = 4


class ContractError(PrecsError, ValueError):
    exit_code = 4


class NumericError(PrecsError, ArithmeticError):
    exit_code = 4
