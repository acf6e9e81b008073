"""Exception types shared across the toolkit.

The CLI maps each family onto a distinct exit status, so library code
raises the most specific class that applies.
"""


class AhRelayError(Exception):
    """Base class for all toolkit errors."""


class DomainError(AhRelayError, ValueError):
    """An argument lies outside the domain of a model or formula."""


class NotDefinedError(AhRelayError, KeyError):
    """A catalog entry exists in principle but is not defined (e.g. N/A in the MCS table)."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class UnknownEntryError(AhRelayError, KeyError):
    """A catalog key (MCS id, region name, preset) does not exist."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigError(AhRelayError):
    """A scenario or catalog file could not be parsed or validated."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
                if column is not None:
                    where += f":{column}"
            where += ": "
        super().__init__(where + message)


class NoCoverageError(AhRelayError):
    """The link budget cannot be closed (infeasible hop or unreachable target).

    Attributes
    ----------
    hop : int or None
        1-based hop index in transmission order, when the failure is tied to a hop.
    deficit_db : float or None
        How many dB the budget falls short by.
    """

    def __init__(self, message, hop=None, deficit_db=None):
        self.hop = hop
        self.deficit_db = deficit_db
        super().__init__(message)


class ConvergenceError(AhRelayError, ArithmeticError):
    """A numerical solver failed to converge within its iteration cap."""
