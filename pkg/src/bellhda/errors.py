"""Exception types raised across the package."""


class BellHdaError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(BellHdaError, ValueError):
    pass


class OutOfDomainError(BellHdaError, ValueError):
    pass


class NumericFailureError(BellHdaError, ArithmeticError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t={time!r})")
        self.time = time


class EmptyCountsError(BellHdaError, ValueError):
    pass


class InsufficientDwellError(BellHdaError, ValueError):
    def __init__(self, pair_index: int):
        super().__init__(f"setting pair {pair_index} has zero factual dwell")
        self.pair_index = pair_index


class ConfigError(BellHdaError, ValueError):
    pass
