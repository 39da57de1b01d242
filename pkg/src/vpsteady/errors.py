"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    pass


class ExponentOutOfRangeError(ValueError):
    """Lebesgue exponent outside the admissible window."""


class DegenerateDensityError(ValueError):
    """A density with zero total mass where a positive mass is required."""


class IterationCollapsedError(RuntimeError):
    """The fixed-point iteration produced a zero-mass profile."""


class NoZeroFoundError(RuntimeError):
    pass
