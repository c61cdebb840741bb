class GBLabError(Exception):
    """Base class for library errors."""


class DomainError(GBLabError, ValueError):
    """Parameters outside the admissible range."""


class NumericalError(GBLabError, RuntimeError):
    """A numerical procedure failed (non-convergence, blow-up, ...)."""


class QuadratureError(NumericalError):
    def __init__(self, msg, history=()):
        super().__init__(msg)
        self.history = list(history)


class EigenSolverError(NumericalError):
    pass


class CFLError(NumericalError):
    def __init__(self, msg, suggested_dt):
        super().__init__(msg)
        self.suggested_dt = suggested_dt


class ModulationError(NumericalError):
    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


class ModulationDegenerateError(ModulationError):
    """The (c, rho) Jacobian is singular: <JQ_c, Lambda Q_c> vanishes."""
