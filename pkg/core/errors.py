"""
Error Hierarchy
Exceptions raised by the toolkit and the CLI exit codes they map to
"""


class IddlabError(Exception):
    """Base class for every toolkit error"""
    exit_code = 2


class InputError(IddlabError, ValueError):
    """Invalid argument: non-finite value, out-of-range parameter, bad schedule"""
    exit_code = 1


class ConfigError(InputError):
    """Invalid configuration value"""


class IngestError(InputError):
    """Sample file could not be parsed"""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericError(IddlabError, ArithmeticError):
    """Numeric failure during evaluation"""
    exit_code = 2


class PositivityError(NumericError):
    """A characteristic function was not strictly positive where it had to be"""

    def __init__(self, t, value):
        super().__init__(f"characteristic function is not positive at t={t!r} (value {value!r})")
        self.t = t
        self.value = value


class QuadratureError(NumericError):
    """CF inversion failed (truncation search or out-of-range probability)"""


class NoFiniteMomentError(NumericError):
    """Requested moment does not exist for this law"""


# Exit code for a failed inequality check in --assert mode
BOUND_FAILURE_EXIT = 3


def exit_code_for(error):
    """Map an exception to the CLI exit status"""
    if isinstance(error, IddlabError):
        return error.exit_code
    return 2
