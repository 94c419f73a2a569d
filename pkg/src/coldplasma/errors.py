"""Exception types shared across the package."""


class ColdPlasmaError(Exception):
    """Base class for domain errors raised by this package."""


class BlowupCrossed(ColdPlasmaError):
    """A closed form was evaluated past the first zero of F."""


class NoRoot(ColdPlasmaError):
    """The separatrix does not cross the requested search interval."""


class CflViolation(ColdPlasmaError):
    """A time step exceeds the Courant limit of the grid."""


class CrossingBeforeT(ColdPlasmaError):
    """Characteristics crossed before the reconstruction time."""
