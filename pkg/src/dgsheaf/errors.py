"""Exception types shared by the engine and mapped to CLI exit codes."""


class PreconditionError(ValueError):
    """Inputs violate a documented precondition (CLI exit code 2)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CertificationError(RuntimeError):
    """An internal certificate failed; this indicates an engine bug (CLI exit code 3)."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)
