"""Exception hierarchy shared by every module."""


class ConverterError(ValueError):
    """Base class for all modelling and simulation errors."""


class NonPositiveResistance(ConverterError):
    """The load's effective resistance is zero, negative, or infinite."""


class RatioOutOfRange(ConverterError):
    """Conversion ratio outside the topology's admissible range."""


class NoConvergence(ConverterError):
    pass


class NotInDCM(ConverterError):
    """The operating point violates the discontinuous-conduction limit."""


class MultipleOperatingPoints(ConverterError):
    """More than one steady state exists; ``points`` holds all of them."""

    def __init__(self, points):
        self.points = list(points)
        vs = ", ".join(f"{p.v:.6g}" for p in self.points)
        super().__init__(f"{len(self.points)} operating points (v = {vs})")


class DenominatorUnderflow(ConverterError):
    pass


class NoValidPeriod(ConverterError):
    """No switching period satisfies the valley constraint."""


class SchemeMismatch(ConverterError):
    pass


class NotAFixedPoint(ConverterError):
    pass


class NoRealOrbit(ConverterError):
    """Control level beyond the saddle-node: no steady state exists."""


class PoleAtUnity(ConverterError):
    pass


class FrequencyOutOfRange(ConverterError):
    pass


class NoEvent(ConverterError):
    pass


class SchemeInfeasible(ConverterError):
    """A switching event required by the control scheme never fires."""


class LeftDCM(ConverterError):
    """The inductor current did not return to zero before the cycle ended."""


class CycleError(ConverterError):
    """Wraps an error raised while iterating, recording the cycle index."""

    def __init__(self, index, error):
        self.index = index
        self.error = error
        super().__init__(f"cycle {index}: {error}")
