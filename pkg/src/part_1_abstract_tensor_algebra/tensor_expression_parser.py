"""
Precedence-climbing parser for the TeX-flavored tensor input language.

Accepts Cadabra-style tensors (``F_{\\alpha \\beta}``, ``\\partial_{\\alpha}{...}``)
and FORM-style calls (``g(0,i)``, ``e_(i,j,k,l)``, ``g(i?,j?)``) in one grammar.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from ..utils.exceptions import DeclarationError, ParseError
from .tensor_context import EPSILON_HEADS, Context
from .tensor_expression import (
    Derivative,
    Equation,
    Expression,
    Index,
    Number,
    SqrtNegDet,
    Symbol,
    Tensor,
    Variance,
    free_indices,
    make_power,
    make_product,
    make_sum,
    negate,
)

_TOKEN = re.compile(
    r"(?P<number>\d+)"
    r"|(?P<arrow>->|\\rightarrow\b)"
    r"|(?P<tex>\\[A-Za-z]+)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_(?=\())?)"
    r"|(?P<punct>[_^{}()\[\],+\-*/?=#])"
)

_CLOSERS = {"(": ")", "{": "}", "[": "]"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN.match(text, position)
        if not match:
            raise ParseError(f"unexpected character '{text[position]}'", position)
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(0), position))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class TensorExpressionParser:
    """Parses expressions, equations and rules against a Context."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.diagnostics: List[str] = []
        self._tokens: List[Token] = []
        self._pos = 0

    # entry points

    def parse(self, text: str) -> Expression:
        """Parse ``expr`` or ``expr = expr``; the result is index-balanced."""
        self._start(text)
        lhs = self._parse_sum()
        if self._accept("="):
            rhs = self._parse_sum()
            result: Expression = Equation(lhs, rhs)
        else:
            result = lhs
        self._expect_end()
        free_indices(result)
        return result

    def parse_rule_sides(self, text: str) -> Tuple[Expression, Expression]:
        """Parse ``lhs -> rhs``."""
        self._start(text)
        lhs = self._parse_sum()
        if self._peek().kind != "arrow":
            raise self._error("expected '->' in rule", ["->"])
        self._advance()
        rhs = self._parse_sum()
        self._expect_end()
        free_indices(lhs)
        free_indices(rhs)
        return lhs, rhs

    # token helpers

    def _start(self, text: str) -> None:
        self._tokens = tokenize(text)
        self._pos = 0

    def _peek(self, offset: int = 0) -> Token:
        return self._tokens[min(self._pos + offset, len(self._tokens) - 1)]

    def _advance(self) -> Token:
        token = self._peek()
        self._pos += 1
        return token

    def _accept(self, text: str) -> bool:
        token = self._peek()
        if token.kind == "punct" and token.text == text:
            self._pos += 1
            return True
        return False

    def _expect(self, text: str) -> Token:
        if not self._accept(text):
            raise self._error(f"expected '{text}'", [text])
        return self._tokens[self._pos - 1]

    def _expect_end(self) -> None:
        if self._peek().kind != "end":
            raise self._error(f"unexpected '{self._peek().text}'", ["end of expression"])

    def _error(self, message: str, expected=()) -> ParseError:
        token = self._peek()
        found = token.text or "end of input"
        return ParseError(f"{message}, found '{found}'", token.position, expected)

    # grammar

    def _parse_sum(self) -> Expression:
        terms: List[Expression] = []
        negative = False
        if self._accept("-"):
            negative = True
        else:
            self._accept("+")
        term = self._parse_product()
        terms.append(negate(term) if negative else term)
        while True:
            if self._accept("+"):
                terms.append(self._parse_product())
            elif self._accept("-"):
                terms.append(negate(self._parse_product()))
            else:
                break
        return make_sum(terms)

    def _starts_factor(self) -> bool:
        token = self._peek()
        if token.kind in ("number", "name", "tex"):
            return True
        return token.kind == "punct" and token.text in ("(", "{")

    def _parse_product(self) -> Expression:
        factors = [self._parse_power()]
        while True:
            if self._accept("*"):
                factors.append(self._parse_power())
            elif self._accept("/"):
                factors.append(make_power(self._parse_power(), -1))
            elif self._starts_factor():
                factors.append(self._parse_power())
            else:
                break
        return make_product(factors)

    def _parse_exponent(self) -> int:
        if self._accept("{"):
            value = self._parse_exponent()
            self._expect("}")
            return value
        sign = -1 if self._accept("-") else 1
        token = self._peek()
        if token.kind != "number":
            raise self._error("expected integer exponent", ["integer"])
        self._advance()
        return sign * int(token.text)

    def _parse_power(self) -> Expression:
        if self._accept("-"):
            return negate(self._parse_power())
        base = self._parse_primary()
        if self._accept("^"):
            return make_power(base, self._parse_exponent())
        return base

    def _parse_group(self, opener: str) -> Expression:
        inner = self._parse_sum()
        self._expect(_CLOSERS[opener])
        return inner

    def _parse_primary(self) -> Expression:
        token = self._peek()
        if token.kind == "number":
            self._advance()
            return Number(Fraction(int(token.text)))
        if token.kind == "punct" and token.text in ("(", "{"):
            self._advance()
            return self._parse_group(token.text)
        if token.kind in ("name", "tex"):
            self._advance()
            return self._parse_named(token)
        raise self._error("expected a factor", ["number", "name", "tensor", "(", "{"])

    def _parse_named(self, token: Token) -> Expression:
        name = token.text
        if name == "\\sqrt":
            self._expect("{")
            self._expect("-")
            metric = self._peek()
            if metric.kind not in ("name", "tex"):
                raise self._error("only \\sqrt{-g} is supported", ["metric name"])
            self._advance()
            self._expect("}")
            return SqrtNegDet(metric.text)

        if self.ctx.is_derivative(name) and self._peek().text == "_":
            self._advance()
            self._expect("{")
            index = self._parse_index(Variance.COVARIANT)
            self._expect("}")
            return Derivative(name, index, self._parse_primary())

        if self._accept("?"):
            name += "?"
            if self._peek().text not in ("_", "^", "("):
                raise self._error("wildcard head must carry indices", ["_", "^", "("])

        if name.endswith("_") and self._peek().text == "(" or (
                token.kind == "name" and self._peek().text == "("):
            return self._parse_call(name)

        if self._peek().text in ("_", "^") and self._peek(1).text == "{":
            if not self._is_power_brace(name):
                return self._parse_tex_tensor(name)

        if name.endswith("?"):
            raise self._error("wildcard head must carry indices", ["_", "^", "("])
        return Symbol(name)

    def _is_power_brace(self, name: str) -> bool:
        """``x^{2}`` on a declared symbol is a power; on any other head it is an index group."""
        if self._peek().text != "^" or name not in self.ctx.symbols:
            return False
        inside = self._peek(2)
        closing = self._peek(3)
        if inside.text == "-":
            inside, closing = self._peek(3), self._peek(4)
        return inside.kind == "number" and closing.text == "}"

    def _note_head(self, head: str) -> None:
        if head.endswith("?") or head in EPSILON_HEADS or head in self.ctx.tensor_decls:
            return
        message = f"undeclared tensor {head}"
        if message not in self.diagnostics:
            self.diagnostics.append(message)

    def _parse_tex_tensor(self, head: str) -> Tensor:
        indices: List[Index] = []
        while self._peek().text in ("_", "^") and self._peek(1).text == "{":
            variance = Variance.COVARIANT if self._advance().text == "_" else Variance.CONTRAVARIANT
            self._expect("{")
            while not self._accept("}"):
                if self._peek().kind == "end":
                    raise self._error("unterminated index group", ["}"])
                self._accept(",")
                if self._peek().text == "}":
                    continue
                indices.append(self._parse_index(variance))
        self._note_head(head)
        return Tensor(head, tuple(indices), "tex")

    def _parse_call(self, head: str) -> Tensor:
        self._expect("(")
        indices: List[Index] = []
        if not self._accept(")"):
            while True:
                indices.append(self._parse_index(Variance.COVARIANT))
                if self._accept(")"):
                    break
                self._expect(",")
        self._note_head(head)
        return Tensor(head, tuple(indices), "call")

    def _parse_index(self, variance: Variance) -> Index:
        token = self._peek()
        if token.kind == "number":
            self._advance()
            return Index(token.text, variance, int(token.text))
        if token.kind in ("name", "tex"):
            self._advance()
            if self._accept("?"):
                return Index(token.text, variance, wildcard=True)
            if not self.ctx.is_index_name(token.text):
                raise DeclarationError(f"index {token.text} is not declared in any index family "
                                       f"(at position {token.position})")
            return Index(token.text, variance)
        raise self._error("expected an index", ["index name", "integer"])


def parse(text: str, ctx: Context, diagnostics: Optional[List[str]] = None) -> Expression:
    """
    Parse ``text`` against ``ctx``; see TensorExpressionParser.parse.

    Parser notes, such as undeclared tensor heads, are appended to
    ``diagnostics`` when a list is given.
    """
    parser = TensorExpressionParser(ctx)
    result = parser.parse(text)
    if diagnostics is not None:
        diagnostics.extend(note for note in parser.diagnostics if note not in diagnostics)
    return result
