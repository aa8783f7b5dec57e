"""Exception types shared across the package."""


class FWError(ValueError):
    """Base class for all domain errors raised by fwergodic."""


class PrecisionExhausted(FWError):
    """A digit beyond the known precision budget was requested."""


class PrimeMismatch(FWError):
    pass


class AllDigitsZero(FWError):
    """Element is indistinguishable from zero at its precision."""


class NotAUnit(FWError):
    pass


class ZeroVector(FWError):
    pass


class DepthTooLarge(FWError):
    pass
