"""Exception types shared across the package.

Each maps to a CLI exit code (see ``phasetour.cli``).
"""


class PhaseTourError(Exception):
    exit_code = 1


class InvalidArgument(PhaseTourError, ValueError):
    exit_code = 2


class InvalidPermutation(InvalidArgument):
    pass


class DegenerateData(PhaseTourError, ValueError):
    exit_code = 2


class UnattainableConstraint(PhaseTourError, ArithmeticError):
    """No duration satisfies the acceleration bound."""

    exit_code = 3


class SizeError(PhaseTourError):
    """Request exceeds a feasibility cap (matrix size, enumeration count)."""

    exit_code = 3

    def __init__(self, message, estimate_sec=None):
        super().__init__(message)
        self.estimate_sec = estimate_sec


class ProvenanceError(PhaseTourError):
    """A file's content does not match its recorded ArtifactId."""

    exit_code = 4
