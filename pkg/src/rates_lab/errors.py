"""Exception types shared across the package."""


class RatesLabError(Exception):
    """Base class for package-specific failures."""


class SolverError(RatesLabError):
    """Linear solve could not reach the required residual accuracy."""


class CodeConstructionError(RatesLabError):
    """Randomized code construction exhausted its try budget."""


class ConfigError(RatesLabError):
    """Malformed configuration file or command-line usage."""
