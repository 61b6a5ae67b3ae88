"""Exception hierarchy shared by all modules."""


class CertifyError(Exception):
    """Base class for all errors raised by photon_certify."""


class DomainError(CertifyError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateError(DomainError):
    """Apparatus parameters or bounds that make a bound undefined (zero efficiency, t = 0, ...)."""


class DataError(CertifyError):
    """Malformed or unusable input data (time-tag files, count files)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(CertifyError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""

    def __init__(self, message, **diagnostics):
        self.diagnostics = diagnostics
        if diagnostics:
            details = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)
