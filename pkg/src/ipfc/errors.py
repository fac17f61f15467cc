"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters, lattice geometry, or run configuration."""


class DataError(ValueError):
    """Field data violates a representation contract (non-finite, asymmetric)."""


class BlowupError(RuntimeError):
    """Time integration produced a non-finite state."""

    def __init__(self, step_index: int, message: str = ""):
        self.step_index = step_index
        super().__init__(message or f"non-finite state at step {step_index}")
