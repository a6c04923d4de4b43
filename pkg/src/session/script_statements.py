"""
Statement splitting and classification for tcas scripts.

One grammar covers both styles: Cadabra-style statements end with ``;``
(print) or ``.`` (silent), FORM-style statements end with ``;`` and
modules are closed by the ``.sort`` / ``.end`` directives.
"""

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Tuple

from ..utils.exceptions import ParseError, UnknownStatementError

FORM_KEYWORDS = {
    "off": "off",
    "format": "format",
    "dimension": "dimension",
    "indices": "indices",
    "index": "indices",
    "tensors": "tensors",
    "tensor": "tensors",
    "symbols": "symbols",
    "symbol": "symbols",
    "local": "local",
    "contract": "contract",
    "id": "id",
    "identify": "id",
    "print": "print",
}
DIRECTIVES = (".sort", ".end")
ALGORITHMS = {
    "substitute": "substitute",
    "canonicalise": "canonicalize",
    "canonicalize": "canonicalize",
    "collect_terms": "collect_terms",
    "distribute": "distribute",
}

_OPENERS = {"(": ")", "{": "}", "[": "]"}
_ALGORITHM = re.compile(r"^@(?P<name>\w+)!?\s*\(\s*(?P<target>[^()]*?)\s*\)\s*(?:\(\s*@\(\s*(?P<rule>[^()]*?)\s*\)\s*\))?\s*$",
                        re.S)
_ASSIGNMENT = re.compile(r"^\s*(?P<label>[A-Za-z][A-Za-z0-9_]*)\s*:=", re.S)
_FORM_HEAD = re.compile(r"^\s*(?P<word>[A-Za-z]+)\b")
_ARROW = re.compile(r"->|\\rightarrow\b")


class StatementKind(Enum):
    DIRECTIVE = "directive"
    DECLARATION = "declaration"
    ALGORITHM = "algorithm"
    FORM = "form"
    RULE = "rule"
    ASSIGNMENT = "assignment"
    EXPRESSION = "expression"


@dataclass(frozen=True)
class Statement:
    """One script statement with its source location (1-based)."""

    text: str
    terminator: str
    line: int
    column: int
    kind: Optional[StatementKind] = None
    head: str = ""
    label: Optional[str] = None
    body: str = ""
    body_offset: int = 0
    rule: Optional[str] = None

    @property
    def prints(self) -> bool:
        return self.terminator == ";"

    def locate(self, position: Optional[int]) -> Tuple[int, int]:
        """Script line/column of a character offset inside ``text``."""
        if position is None:
            return self.line, self.column
        prefix = self.text[:max(0, min(position, len(self.text)))]
        newlines = prefix.count("\n")
        if newlines == 0:
            return self.line, self.column + len(prefix)
        return self.line + newlines, len(prefix) - prefix.rfind("\n")


@dataclass(frozen=True)
class SplitResult:
    statements: Tuple[Statement, ...]
    remainder: str


def _line_column(source: str, offset: int) -> Tuple[int, int]:
    line = source.count("\n", 0, offset) + 1
    return line, offset - (source.rfind("\n", 0, offset) + 1) + 1


def split_statements(source: str, final: bool = True) -> SplitResult:
    """
    Cut ``source`` into statements.

    Args:
        source: script text
        final: when False, an unterminated tail is returned as ``remainder``
               instead of raising

    Returns:
        SplitResult with the statements in order
    """
    statements: List[Statement] = []
    stack: List[str] = []
    start: Optional[int] = None
    position = 0
    length = len(source)

    def emit(end: int, terminator: str) -> None:
        text = source[start:end]
        line, column = _line_column(source, start)
        statements.append(Statement(text.rstrip(), terminator, line, column))

    while position < length:
        char = source[position]
        if start is None:
            if char.isspace():
                position += 1
                continue
            at_line_start = source.rfind("\n", 0, position) + 1
            if char == "#" and not source[at_line_start:position].strip():
                newline = source.find("\n", position)
                position = length if newline < 0 else newline + 1
                continue
            if char == "." and position + 1 < length and source[position + 1].isalpha():
                newline = source.find("\n", position)
                end = length if newline < 0 else newline
                start = position
                emit(end, "")
                start = None
                position = end
                continue
            start = position
        if char in _OPENERS:
            stack.append(_OPENERS[char])
        elif char in _OPENERS.values():
            if not stack or stack[-1] != char:
                line, column = _line_column(source, position)
                raise ParseError(f"unbalanced '{char}'", None, (), line, column)
            stack.pop()
        elif not stack and char == ";":
            emit(position, ";")
            start = None
        elif not stack and char == "." and (position + 1 == length or source[position + 1].isspace()):
            emit(position, ".")
            start = None
        position += 1

    remainder = "" if start is None else source[start:]
    if remainder.strip() and final:
        line, column = _line_column(source, start)
        raise ParseError("statement is missing its terminator", None, (";", "."), line, column)
    return SplitResult(tuple(statements), remainder)


def classify(statement: Statement) -> Statement:
    """Fill kind/head/label/body of a split statement."""
    text = statement.text

    if text.startswith("."):
        directive = text.split()[0].lower()
        if directive not in DIRECTIVES:
            raise UnknownStatementError(f"unknown directive '{directive}'", 0, DIRECTIVES,
                                        statement.line, statement.column)
        return _with(statement, StatementKind.DIRECTIVE, head=directive)

    if text.startswith("@"):
        match = _ALGORITHM.match(text)
        if not match:
            raise ParseError("malformed algorithm call", 0, ["@name!(label)", "@name!(label)(@(rule))"],
                             *statement.locate(0))
        name = match.group("name")
        if name not in ALGORITHMS:
            raise UnknownStatementError(f"unknown algorithm '@{name}!'", 1, sorted(ALGORITHMS),
                                        *statement.locate(1))
        if ALGORITHMS[name] == "substitute" and not match.group("rule"):
            raise ParseError("@substitute! needs a rule argument", len(text), ["(@(rule))"],
                             *statement.locate(len(text)))
        return _with(statement, StatementKind.ALGORITHM, head=ALGORITHMS[name],
                     label=match.group("target"), rule=match.group("rule"))

    assignment = _ASSIGNMENT.match(text)
    if assignment:
        body_offset = assignment.end()
        body = text[body_offset:]
        kind = StatementKind.RULE if _ARROW.search(body) else StatementKind.ASSIGNMENT
        return _with(statement, kind, label=assignment.group("label"), body=body, body_offset=body_offset)

    if "::" in text:
        return _with(statement, StatementKind.DECLARATION, body=text)

    head = _FORM_HEAD.match(text)
    if head:
        word = head.group("word")
        rest = text[head.end():]
        keyword = FORM_KEYWORDS.get(word.lower())
        if keyword is not None and (not rest or rest[0].isspace() or rest[0] == ";"):
            body_offset = head.end() + (len(rest) - len(rest.lstrip()))
            return _with(statement, StatementKind.FORM, head=keyword, body=text[body_offset:],
                         body_offset=body_offset)
        if word[0].isupper() and rest[:1].isspace() and rest.strip()[:1].isalpha():
            raise UnknownStatementError(f"unknown statement '{word}'", 0, sorted(set(FORM_KEYWORDS.values())),
                                        statement.line, statement.column)

    return _with(statement, StatementKind.EXPRESSION, body=text)


def _with(statement: Statement, kind: StatementKind, **fields) -> Statement:
    return replace(statement, kind=kind, **fields)


def parse_script(source: str) -> Tuple[Statement, ...]:
    """Split and classify a whole script; raises ParseError with line/column."""
    return tuple(classify(s) for s in split_statements(source).statements)
