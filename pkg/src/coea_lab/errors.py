"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters: bad sizes, length mismatches, out-of-range knobs."""


class UnsupportedGameError(ValueError):
    """Operation requires a game property the given game does not have
    (e.g. the approximation criterion needs a unique optimum)."""


class EmptyEstimateError(ValueError):
    """An estimator was asked for a value with zero qualifying observations."""
