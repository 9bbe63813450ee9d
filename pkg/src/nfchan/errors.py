"""Exception types; the CLI maps each one to a distinct exit code."""


class NfchanError(Exception):
    exit_code = 1


class ValidationError(NfchanError, ValueError):
    """Bad input: schema violation, precondition failure, inconsistent geometry."""

    exit_code = 1


class NumericalError(NfchanError, ArithmeticError):
    """A numerical routine failed to converge or produced a degenerate result."""

    exit_code = 2


class AcceptanceFailure(NfchanError):
    exit_code = 3
