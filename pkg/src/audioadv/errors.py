"""Exception hierarchy shared across the workbench."""


class AudioAdvError(Exception):
    """Base class for all workbench errors."""


class FormatError(AudioAdvError):
    """Malformed container or file body (bad magic, truncation, garbage header)."""


class UnsupportedError(AudioAdvError):
    """Well-formed input using a codec/feature outside the supported set."""


class ConfigError(AudioAdvError):
    """Invalid configuration value or combination."""


class InputError(AudioAdvError):
    """Input data violates an operation precondition (empty, too short, ...)."""


class StateError(AudioAdvError):
    """Operation applied in the wrong object state (double append, reused tape, ...)."""


class ShapeError(AudioAdvError):
    """Tensor shape mismatch."""


class NumericsError(AudioAdvError):
    """A numeric operation produced NaN or Inf."""


class DataError(AudioAdvError):
    """Dataset-level problem (empty dataset, missing class, empty outcome set)."""


class BudgetExhausted(AudioAdvError):
    """Budget escalation hit its hard cap before reaching the target fooling AUC.

    Carries the best budget and AUC seen so far.
    """

    def __init__(self, message, best_budget=None, best_auc=None):
        super().__init__(message)
        self.best_budget = best_budget
        self.best_auc = best_auc
