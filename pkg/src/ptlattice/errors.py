"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical or numerical parameter violates its documented constraints."""


class PhaseError(ValueError):
    """An operation valid only in the unbroken phase was requested outside it."""


class DegenerateBandError(RuntimeError):
    """The requested eigenpair sits at a spectral degeneracy; its vectors are unreliable."""


class ConfigError(ValueError):
    """An experiment configuration is missing, malformed, or contains unknown fields."""
