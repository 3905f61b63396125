"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters, grids, or mode combinations. CLI exit code 2."""


class DivergenceError(ConfigError):
    """A requested integral or kernel does not exist for these parameters."""


class NumericsError(RuntimeError):
    """A numerical invariant was violated at run time. CLI exit code 3."""


class ResolutionWarning(UserWarning):
    """A grid does not comfortably resolve the outer or inner scale."""
