"""Exception hierarchy shared by all modules."""


class DualCavityError(Exception):
    """Base class; ``code`` is the machine-readable tag used in sweep records."""

    code = "error"


class InvalidDimensionError(DualCavityError, ValueError):
    code = "invalid_dimension"


class InvalidEmbeddingError(DualCavityError, ValueError):
    code = "invalid_embedding"


class InvalidArgumentError(DualCavityError, ValueError):
    code = "invalid_argument"


class SingularSystemError(DualCavityError, ArithmeticError):
    code = "singular_system"

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class InconsistentParametersError(DualCavityError, ValueError):
    code = "inconsistent_parameters"


class UnsupportedRegimeError(DualCavityError, ValueError):
    code = "unsupported_regime"


class NearSingularError(DualCavityError, ArithmeticError):
    code = "near_singular"

    def __init__(self, message, determinant=0j):
        super().__init__(message)
        self.determinant = determinant


class NoRealSolutionError(DualCavityError, ValueError):
    code = "no_real_solution"

    def __init__(self, message, radicand=0.0):
        super().__init__(message)
        self.radicand = radicand


class InvalidStateError(DualCavityError, ValueError):
    code = "invalid_state"


class DegenerateSteadyStateError(DualCavityError, ArithmeticError):
    code = "degenerate_steady_state"

    def __init__(self, message, gap=0.0):
        super().__init__(message)
        self.gap = gap


class StepSizeError(DualCavityError, ArithmeticError):
    code = "step_size"


class PolygonViolationError(DualCavityError, ValueError):
    code = "polygon_violation"

    def __init__(self, message, squared_edges=()):
        super().__init__(message)
        self.squared_edges = tuple(squared_edges)


class ConfigError(DualCavityError, ValueError):
    code = "config_error"
