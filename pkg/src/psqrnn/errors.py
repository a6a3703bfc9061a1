"""Exception types shared across the package."""

__all__ = ["ConfigError", "DataError", "TrainingError"]


class ConfigError(ValueError):
    """Invalid configuration: bad hyperparameters, schedules, or flag combinations."""


class DataError(ValueError):
    """Malformed or unusable panel data (gaps, duplicates, missing columns, ...)."""


class TrainingError(RuntimeError):
    """Optimization failed; carries the annealing stage and evaluation count."""

    def __init__(self, message, epsilon=None, evaluations=None):
        super().__init__(message)
        self.epsilon = epsilon
        self.evaluations = evaluations
