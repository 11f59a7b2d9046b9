"""Exception hierarchy shared by all modules."""


class NLAError(Exception):
    """Base class for every error raised by nlamp."""


class InvalidGain(NLAError, ValueError):
    pass


class InvalidState(NLAError, ValueError):
    pass


class DivergentAmplification(NLAError):
    """Amplified state is unphysical, or not representable at the current cutoff."""


class CutoffUnfaithful(NLAError):
    pass


class UnphysicalOutput(NLAError):
    pass


class SingularMatrix(NLAError):
    pass


class GridTooSmall(NLAError):
    pass


class NonIntegrable(NLAError):
    pass


class ZeroInputAmplitude(NLAError, ZeroDivisionError):
    """Effective gain requested for a state with vanishing mean field."""


class DegenerateHerald(NLAError):
    pass
