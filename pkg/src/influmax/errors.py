"""Exception hierarchy shared across the package."""


class InfluMaxError(Exception):
    """Base class for all errors raised by influmax."""


class GraphFormatError(InfluMaxError, ValueError):
    """Malformed edge-list input. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ProbabilityError(InfluMaxError, ValueError):
    """An edge probability or model parameter lies outside its valid range."""


class GenerationError(InfluMaxError, ValueError):
    """A synthetic graph cannot be generated with the requested parameters."""


class SeedError(InfluMaxError, ValueError):
    """Seed set is empty, contains duplicates, or references unknown nodes."""


class InstanceTooLarge(InfluMaxError, ValueError):
    """An exact oracle was asked to enumerate an instance beyond its size cap."""


class DivergenceError(InfluMaxError, ArithmeticError):
    """A rank iteration blew past the overflow guard."""

    def __init__(self, alpha: float, iteration: int, value: float):
        self.alpha = alpha
        self.iteration = iteration
        self.value = value
        super().__init__(
            f"rank iteration diverged at iteration {iteration} "
            f"(max value {value:.3g}) with alpha={alpha}; try a smaller alpha"
        )
