"""Exception types raised by liesig."""


class LiesigError(Exception):
    """Base class for all liesig errors."""


class SpecMismatch(LiesigError, ValueError):
    """Two objects live on different groups or have incompatible dimensions."""


class AntipodalRotation(LiesigError, ValueError):
    """A rotation is too close to angle pi to have a unique nearest logarithm.

    Attributes
    ----------
    angle : float
        Rotation angle of the offending matrix.
    step : int or None
        Index ``i`` of the path step ``p_i^{-1} p_{i+1}`` that failed, when the
        error comes from a path derivative.
    """

    def __init__(self, angle, step=None):
        self.angle = float(angle)
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(
            f"rotation angle {self.angle:.12g} is within tolerance of pi{where}; "
            "logarithm is not unique"
        )


class BudgetExceeded(LiesigError, MemoryError):
    """Materializing a truncated tensor would exceed the coefficient budget."""

    def __init__(self, ambient_dim, level, budget):
        self.ambient_dim = ambient_dim
        self.level = level
        self.budget = budget
        super().__init__(
            f"level-{level} tensor over R^{ambient_dim} needs "
            f"{ambient_dim ** level} coefficients, budget is {budget}"
        )
