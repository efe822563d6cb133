"""Exception hierarchy. Each family maps to one CLI exit code."""


class AttrClusterError(Exception):
    exit_code = 1


class ConfigError(AttrClusterError, ValueError):
    """Invalid user configuration (flags, thresholds, overrides)."""

    exit_code = 2


class DataError(AttrClusterError, ValueError):
    """Input data that cannot be loaded, typed or cleaned."""

    exit_code = 3


class NumericError(AttrClusterError, ArithmeticError):
    """A numerical stage failed (zero variance, non-convergence, bad bounds)."""

    exit_code = 4
