"""Exception hierarchy shared by all modules."""


class RDilationError(Exception):
    """Base class for errors raised by this package."""


class EmptyInputError(RDilationError, ValueError):
    pass


class DimensionMismatchError(RDilationError, ValueError):
    pass


class SizeBudgetError(RDilationError, ValueError):
    """A dense construction would exceed the configured dimension budget."""


class NumericalError(RDilationError, ArithmeticError):
    pass


class PromiseViolationError(RDilationError, ValueError):
    """An input violates a rank promise (e.g. Kraus rank larger than ``r``)."""


class NotUnitaryError(RDilationError, ValueError):
    pass


class FormulaAssumptionError(RDilationError, ValueError):
    """A closed-form simplification was requested outside its assumptions.

    The offending residual is kept on ``self.residual``.
    """

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class CausalityError(RDilationError, ValueError):
    """A comb Choi matrix fails the causality condition at ``self.tooth``."""

    def __init__(self, tooth, residual):
        super().__init__(f"causality violated at tooth {tooth} (residual {residual:.3e})")
        self.tooth = tooth
        self.residual = residual


class LeakageError(RDilationError, ValueError):
    """Amplitude found on the padding subspace of a padded register."""


class NotApplicableError(RDilationError, ValueError):
    pass
