"""Exception hierarchy shared by all modules."""


class AxiMinimalError(Exception):
    """Base class; the CLI maps each subclass to its own exit code."""

    exit_code = 10


class DomainError(AxiMinimalError, ValueError):
    """Bad chart bounds, counts, or a point outside a domain."""

    exit_code = 11


class SingularLocusError(DomainError):
    """A chart touches a family's singular line, or a radicand goes negative."""

    exit_code = 12


class UnknownFamilyError(AxiMinimalError, KeyError):
    exit_code = 13


class CompatibilityError(AxiMinimalError):
    """Input fields do not admit the requested conjugate potential."""

    exit_code = 14


class TransformError(AxiMinimalError):
    """The Bianchi-type transform or a chart change is singular."""

    exit_code = 15


class InversionError(TransformError):
    """Newton inversion failed or the image rectangle is empty."""

    exit_code = 16


class ProfileError(AxiMinimalError, ValueError):
    """Invalid self-similar profile range."""

    exit_code = 17
