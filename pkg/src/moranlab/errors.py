from __future__ import annotations


class MoranLabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MoranLabError, ValueError):
    """Malformed or invalid input data.

    ``location`` carries a human readable position such as
    ``"values.csv: row 2, column x"`` when one is known.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class NumericalError(MoranLabError, ArithmeticError):
    """A computation could not be completed reliably."""
