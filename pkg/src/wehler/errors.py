"""Exception hierarchy shared by every module in the package."""


class WehlerError(Exception):
    """Base class for package errors (maps to CLI exit code 1)."""


class ResourceError(WehlerError):
    """Base class for cap/precision exhaustion (maps to CLI exit code 2)."""


class DimensionMismatch(WehlerError):
    pass


class BackendMismatch(WehlerError):
    pass


class NotNef(WehlerError):
    pass


class NotIntegral(WehlerError):
    pass


class NotBig(WehlerError):
    pass


class NonTimelike(WehlerError):
    pass


class ZeroPairing(WehlerError):
    pass


class InvalidSpec(WehlerError):
    """Structural or semantic problem in a boundary-point spec or schedule."""


class DegenerateSpan(WehlerError):
    pass


class AmbiguousAtDepth(ResourceError):
    """A parabolic-detection scan could not certify either way at its depth cap."""


class WordTooLong(ResourceError):
    """A run-compressed word was asked to expand past its expansion limit."""


class RingGuard(ResourceError):
    """Square-free ring request exceeds the hard rank guard."""


class StepCapExceeded(ResourceError):
    def __init__(self, max_steps, message=""):
        self.max_steps = max_steps
        super().__init__(message or f"reduction exceeded step budget {max_steps}")


class NonConvergent(ResourceError):
    def __init__(self, coordinate, message=""):
        self.coordinate = coordinate
        super().__init__(
            message
            or f"coordinate {coordinate} dithers at the sign threshold; "
            "raise precision or loosen the tolerance"
        )
