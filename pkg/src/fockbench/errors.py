"""Exception types shared across the package."""


class FockbenchError(Exception):
    """Base class for all package errors."""


# ---- state engine ----

class EmptyModes(FockbenchError):
    pass


class DuplicateMode(FockbenchError):
    pass


class UnknownMode(FockbenchError):
    pass


class TruncationOverflow(FockbenchError):
    pass


class NonUnitary(FockbenchError):
    pass


class ImpossibleOutcome(FockbenchError):
    pass


class NotNormalized(FockbenchError):
    pass


# ---- optical elements ----

class BadParam(FockbenchError):
    pass


class BadWiring(FockbenchError):
    pass


class PolarizationMismatch(FockbenchError):
    pass


# ---- stochastics ----

class BadCalibration(FockbenchError):
    pass


# ---- analysis ----

class FitUnderdetermined(FockbenchError):
    pass


# ---- protocol / cli ----

class ProtocolError(FockbenchError):
    pass


class GridMismatch(FockbenchError):
    pass
