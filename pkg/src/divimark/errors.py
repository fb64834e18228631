"""Exception types shared by the library and the CLI."""


class ValidationError(ValueError):
    """Input violates a structural invariant (hermiticity, effect bounds, ...)."""


class ModelError(ValidationError):
    """Model parameters violate their admissibility conditions."""


class GridAlignmentError(ValidationError):
    """A model breakpoint does not coincide with a grid point."""


class SingularMapError(RuntimeError):
    """The dynamical map is not invertible at some time."""

    def __init__(self, time: float, det: float):
        super().__init__(f"map is singular at t={time:.6g} (det={det:.3e})")
        self.time = time
        self.det = det


class ConvergenceError(RuntimeError):
    """An iterative routine failed to reach its tolerance."""
