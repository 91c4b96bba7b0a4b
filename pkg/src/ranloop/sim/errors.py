class SimConfigError(ValueError):
    """A simulator configuration value violates its documented range."""


class InvalidMeasurementError(ValueError):
    """A control input (SNR, target) was NaN or infinite."""
