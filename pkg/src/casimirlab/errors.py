"""Exception types shared across the package."""


class SolverError(RuntimeError):
    """An iterative solver failed to reach its tolerance.

    Attributes:
        residual: relative residual at the point of failure.
        iterations: iterations performed.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SupnormError(RuntimeError):
    """Watchdog abort: the vorticity sup-norm exceeded its cap.

    Carries the step index, simulation time, offending sup-norm and the
    diagnostics rows collected so far.
    """

    def __init__(self, message, step, time, supnorm, rows=None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.supnorm = supnorm
        self.rows = rows if rows is not None else []


class FieldFormatError(ValueError):
    """A field file does not conform to the .fld format."""


class BoundaryConditionError(ValueError):
    """g evaluated on the vorticity boundary trace is not zero.

    Attributes:
        residual: sup of |g(trace)| over the boundary nodes.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
