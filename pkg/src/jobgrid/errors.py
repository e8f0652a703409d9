"""Exception hierarchy shared across the package."""


class JobgridError(Exception):
    """Base class for all package errors."""


class ValidationError(JobgridError):
    """A record failed a validation rule. ``rule`` names the violated rule."""

    rule = "ValidationError"


class TemporalOrderViolation(ValidationError):
    rule = "TemporalOrderViolation"


class MissingField(ValidationError):
    rule = "MissingField"


class NonPositiveNodes(ValidationError):
    rule = "NonPositiveNodes"


class BadValue(ValidationError):
    """A field value could not be parsed or is outside its allowed set."""

    rule = "BadValue"


class UnreadableSource(JobgridError):
    pass


class SchemaMismatch(JobgridError):
    pass


class RejectionThresholdExceeded(JobgridError):
    pass


class InfeasibleScenario(JobgridError):
    pass


class DomainError(JobgridError):
    pass


class DegenerateRange(JobgridError):
    pass


class ChannelKindError(JobgridError):
    pass


class UnknownField(JobgridError):
    pass


class ColumnOutOfRange(JobgridError):
    pass


class UnknownLabel(JobgridError):
    pass


class UnknownFacet(JobgridError):
    pass


class UnknownSession(JobgridError):
    pass


class IoError(JobgridError):
    pass
