"""Exception hierarchy shared by all modules."""


class NlspecError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(NlspecError):
    pass


class NullspaceElement(NlspecError):
    """Signal is (numerically) an element of the nullspace of the functional."""


class ZeroSignal(NlspecError):
    pass


class UnsupportedFunctional(NlspecError):
    pass


class BadParams(NlspecError):
    pass


class BadStep(NlspecError):
    pass


class NotSymmetric(NlspecError):
    pass


class EmptyBoundary(NlspecError):
    pass


class DimensionTooLarge(NlspecError):
    pass


class NullspaceStart(NlspecError):
    pass


class DegenerateEnergy(NlspecError):
    pass


class ConfigError(NlspecError):
    pass
