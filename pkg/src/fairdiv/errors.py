"""Exception types raised by fairdiv."""


class FairDivError(ValueError):
    """Base class for all fairdiv errors."""


class InstanceTooLarge(FairDivError):
    """An exhaustive routine was asked to enumerate beyond its bound."""


class NotMatroidal(FairDivError):
    """An operation that needs matroid rank valuations got something else."""


class NotEnvyFreeable(FairDivError):
    """The envy graph of an allocation has a positive-weight cycle."""


class SchemaError(FairDivError):
    """An instance document is malformed or fails validation."""
