"""Exception hierarchy shared by all fracrd modules."""


class FracRDError(Exception):
    """Base class for all fracrd errors."""


# --- grid / spectral ---------------------------------------------------
class InvalidDims(FracRDError):
    pass


class NotPowerOfTwo(FracRDError):
    pass


class MemoryBudgetExceeded(FracRDError):
    pass


class NonFiniteInput(FracRDError):
    pass


class GridTooLarge(FracRDError):
    pass


class BetaOutOfRange(FracRDError):
    pass


# --- heat kernel -------------------------------------------------------
class NonPositiveTime(FracRDError):
    pass


class NegativeTime(FracRDError):
    pass


class TailMassTooLarge(FracRDError):
    pass


class ExponentOrder(FracRDError):
    pass


class DegenerateFit(FracRDError):
    pass


# --- reaction models ---------------------------------------------------
class NegativeStateBeyondTolerance(FracRDError):
    pass


class NonFiniteRate(FracRDError):
    pass


class MissingMeta(FracRDError):
    pass


class DissipationViolated(FracRDError):
    pass


# --- mild solver -------------------------------------------------------
class PicardDivergence(FracRDError):
    pass


class NegativeInitialData(FracRDError):
    pass


# --- estimate lab ------------------------------------------------------
class EmptyTrajectory(FracRDError):
    pass


class GammaOutOfRange(FracRDError):
    pass


class TooFewSlices(FracRDError):
    pass


class EllOutOfRange(FracRDError):
    pass


class QOutOfRange(FracRDError):
    pass


class ZeroField(FracRDError):
    pass


class NonUniformTimeGrid(FracRDError):
    pass


class RhoInadmissible(FracRDError):
    pass


class P0TooSmall(FracRDError):
    pass


# --- CLI / orchestration ----------------------------------------------
class ConfigInvalid(FracRDError):
    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class ModelUnknown(FracRDError):
    pass


class OutputUnwritable(FracRDError):
    pass


class UnknownAxis(FracRDError):
    pass


class EmptyValues(FracRDError):
    pass
