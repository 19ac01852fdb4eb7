"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: usage errors exit 1, data/validation
errors exit 2, degenerate metric configurations exit 3.
"""


class TandemEvalError(Exception):
    """Base class for all toolkit errors."""


class InputError(TandemEvalError):
    """A referenced input file is missing or unreadable."""


class ParseError(TandemEvalError):
    """A score/key/pair file line could not be parsed."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class DuplicateIdError(ParseError):
    """The same trial/datum id appeared twice in one file."""


class JoinError(TandemEvalError):
    """Score and key files do not describe the same trial set."""


class EmptyTableError(TandemEvalError):
    """An operation received a trial table with no rows."""


class EmptyClassError(TandemEvalError):
    """A required trial class has no scores."""


class DegenerateConfigError(TandemEvalError):
    """Cost model or operating point makes the requested metric undefined."""


class DomainError(TandemEvalError):
    """A value lies outside the operation's domain (e.g. odds ratio < 1)."""


class ShapeError(TandemEvalError):
    """Vector/matrix dimensions do not match."""


class DegenerateCosineError(TandemEvalError):
    """A reconstructed embedding has (near-)zero norm; cosine undefined."""


class DivergenceError(TandemEvalError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch):
        self.epoch = epoch
        super().__init__(f"non-finite loss at epoch {epoch}")
