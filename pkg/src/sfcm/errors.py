"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: input problems
(:class:`ImageIOError`, :class:`ConfigError`, bad arguments) exit with
code 2, numerical failures (:class:`NumericalError`) with code 3.
"""

from __future__ import annotations


class ImageIOError(ValueError):
    """An image file could not be read or written. Message carries the path."""


class ConfigError(ValueError):
    """A config file or parameter set violates its contract."""


class NumericalError(RuntimeError):
    """The clustering iteration failed (collapsed cluster, degenerate data).

    ``iteration`` is the 1-based iteration at which the failure occurred,
    or ``None`` when it happened before the loop started.
    """

    def __init__(self, message: str, iteration: int | None = None):
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)
        self.iteration = iteration
