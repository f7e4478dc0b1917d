"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or dimensionally inconsistent input data."""


class SearchBudgetExceeded(RuntimeError):
    """A randomized search exhausted its budget and the caller opted into errors."""


class GenerationBudgetExceeded(RuntimeError):
    """Rejection sampling failed to produce an admissible instance within budget."""
