"""Exception hierarchy shared by all mellin_lab modules."""


class MellinLabError(Exception):
    """Base class for every error raised by this package."""


class NonConvergent(MellinLabError):
    """A quadrature exhausted its refinement budget before meeting abs_tol."""


class InvalidExponent(MellinLabError, ValueError):
    pass


class InvalidScale(MellinLabError, ValueError):
    pass


class StepTooLarge(MellinLabError, ValueError):
    pass


class DomainError(MellinLabError, ValueError):
    pass


class UnboundedSpectrum(MellinLabError, ValueError):
    """extend() needs a spectrum with a declared band edge."""


class NoDecay(MellinLabError):
    """The sampled spectrum never falls below the relative threshold."""


class NormDivergent(MellinLabError):
    pass


class RatioViolation(MellinLabError, ValueError):
    def __init__(self, index, ratio, required):
        self.index = index
        self.ratio = ratio
        self.required = required
        super().__init__(
            f"t[{index + 1}]/t[{index}] = {ratio!r} does not exceed {required!r}"
        )


class UnsupportedCombination(MellinLabError, ValueError):
    pass


class MissingSample(MellinLabError, KeyError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"no sample for k={k}")


class ConfigError(MellinLabError, ValueError):
    pass


class UnknownCorpus(MellinLabError, KeyError):
    pass


class OscillationWarning(UserWarning):
    """Cesàro spread of the truncated-transform sequence is above threshold."""
