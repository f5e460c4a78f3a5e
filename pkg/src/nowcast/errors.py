"""Exception hierarchy.  The CLI maps these to exit codes (config 2, data 3,
numerical 4)."""


class NowcastError(Exception):
    """Base class for all package errors."""


class ConfigError(NowcastError):
    """Invalid run configuration or CLI arguments."""


class DataError(NowcastError):
    """Malformed input data, impossible transforms, or empty results."""


class NumericalError(NowcastError):
    """Solver failure: divergence, rank deficiency, NaN/Inf, singular systems."""
