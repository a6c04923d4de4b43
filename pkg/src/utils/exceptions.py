"""
Exception hierarchy shared by every tcas module.

Parse problems map to exit status 1, evaluation problems to exit status 2.
"""

from typing import Optional, Sequence, Tuple


class TcasError(Exception):
    """Base class for all tcas errors."""

    exit_code = 2


class ParseError(TcasError):
    """Syntax error in an expression or a script statement."""

    exit_code = 1

    def __init__(self, message: str, position: Optional[int] = None,
                 expected: Sequence[str] = (), line: Optional[int] = None,
                 column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.position = position
        self.expected: Tuple[str, ...] = tuple(expected)
        self.line = line
        self.column = column

    def located(self, line: int, column: int) -> "ParseError":
        """Return a copy of the error pinned to a script line/column."""
        error = type(self)(self.message, self.position, self.expected, line, column)
        return error

    def __str__(self) -> str:
        text = self.message
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        if self.line is not None:
            text = f"line {self.line}, column {self.column}: {text}"
        elif self.position is not None:
            text = f"at position {self.position}: {text}"
        return text


class IndexBalanceError(ParseError):
    """Terms of a sum disagree on free indices, or an index occurs three times."""


class UnknownStatementError(ParseError):
    """Script statement whose head is not part of the statement grammar."""


class EvaluationError(TcasError):
    """Failure while executing a well-formed statement."""

    exit_code = 2


class DeclarationError(EvaluationError):
    """Conflicting or unknown declaration, or use of an undeclared index."""


class RewriteError(EvaluationError):
    """Malformed rule or exhausted fresh-index family."""


class ComponentError(EvaluationError):
    """Component engine failure (missing index range, non-scalar value)."""


class GeometrizationError(EvaluationError):
    """Metric cannot be turned into medium parameters."""


class ZeroDenominatorError(EvaluationError):
    """Rational function with a zero denominator."""


class NonExactDivisionError(EvaluationError):
    """Polynomial division left a remainder."""


class NotASquareError(EvaluationError):
    """Exact square root of a polynomial or rational does not exist."""


class UnboundSymbolError(EvaluationError):
    """Numeric evaluation met a symbol without a binding."""


class PoleError(EvaluationError):
    """Denominator vanishes at the evaluation point."""
