"""Exception types shared across the package."""


class BakerLabError(Exception):
    """Base class for all errors raised by baker_lab."""


class InvalidParameter(BakerLabError, ValueError):
    pass


class CapExceeded(BakerLabError):
    """A point lies in a disc D_j with j beyond the model's level cap."""

    def __init__(self, level: int, j_max: int):
        super().__init__(f"point lies in D_{level}, beyond level cap j_max={j_max}")
        self.level = level
        self.j_max = j_max


class EpsSearchExhausted(BakerLabError):
    """Halving search for the perturbation size ran below double precision."""


class RadiusCollapse(BakerLabError):
    def __init__(self, level: int, index: int, radius: float, scale: float):
        super().__init__(
            f"sub-disc radius collapsed at level {level}, index {index}: "
            f"rho={radius!r} relative to |omega|={scale!r}"
        )
        self.level = level
        self.index = index


class NearPole(BakerLabError):
    """A finite-difference stencil came within 10h of a known pole."""


class ModelFileError(BakerLabError):
    pass
