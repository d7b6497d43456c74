"""Exception hierarchy.

Everything raised on bad data or an impossible computation derives from
:class:`ExplainError`; the CLI maps these to exit code 1.
"""


class ExplainError(Exception):
    """Base class for data and compute errors."""


class FeatureRangeError(ExplainError, IndexError):
    """A feature id is outside the model's feature space."""


class ContractError(ExplainError, ValueError):
    """An operation was called with arguments violating its precondition."""


class ResourceError(ExplainError):
    """A computation would exceed its configured evaluation budget."""


class DegenerateNormalizationError(ExplainError, ZeroDivisionError):
    """Scores cannot be normalized because their total is zero."""


class UndefinedCorrelationError(ExplainError, ValueError):
    """A rank correlation has too few comparable points to be defined."""


class FormatError(ExplainError, ValueError):
    """An input file is malformed."""

    def __init__(self, message, path=None, lineno=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if lineno is not None:
                where += f":{lineno}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.lineno = lineno


class BinaryViolationError(FormatError):
    """A sparse data file holds a feature value other than 1."""
