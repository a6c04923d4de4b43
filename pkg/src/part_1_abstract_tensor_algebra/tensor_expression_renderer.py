"""
Plain-text and LaTeX renderers, plus FORM-style line wrapping.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .tensor_expression import (
    Derivative,
    Equation,
    Expression,
    Index,
    Number,
    Power,
    Product,
    SqrtNegDet,
    Sum,
    Symbol,
    Tensor,
    split_term,
    terms_of,
)

LISTING_INDENT = "   "
_WRAP_TOKEN = re.compile(r" [+-] |[A-Za-z_][A-Za-z0-9_]*\(|\\?[A-Za-z_][A-Za-z0-9_]*|\d+|\s+|.")


@dataclass(frozen=True)
class RenderOptions:
    """Output format and line-wrap column."""

    format: str = "plain"
    width: int = 80

    def __post_init__(self):
        if self.format not in ("plain", "latex"):
            raise ValueError(f"unknown render format '{self.format}'")
        if self.width < 20:
            raise ValueError(f"render width must be at least 20, got {self.width}")


def render(expr: Expression, opts: RenderOptions = RenderOptions()) -> str:
    """
    Render an expression in ``opts.format``, wrapped at ``opts.width``.

    Lines break at top-level spaces, so ``" ".join(lines)`` restores the
    single-line text. A sign stays attached to the term it introduces.
    """
    return wrap_text(render_text(expr, opts.format), opts.width)


def render_text(expr: Expression, format: str = "plain") -> str:
    """Single-line rendering without wrapping."""
    return render_latex(expr) if format == "latex" else render_plain(expr)


def break_units(text: str) -> List[str]:
    """Pieces of ``text`` between spaces outside braces and parentheses."""
    pieces: List[str] = []
    current = ""
    depth = 0
    for char in text:
        if char in "{(":
            depth += 1
        elif char in "})":
            depth -= 1
        if char == " " and depth == 0:
            pieces.append(current)
            current = ""
        else:
            current += char
    pieces.append(current)

    units: List[str] = []
    for piece in pieces:
        if units and units[-1] in ("+", "-"):
            units[-1] = f"{units[-1]} {piece}"
        else:
            units.append(piece)
    return units


def _split_long(unit: str, width: int) -> List[str]:
    chunks: List[str] = []
    current = ""
    for token in (match.group(0) for match in _WRAP_TOKEN.finditer(unit)):
        while len(token) > width:
            if current:
                chunks.append(current)
                current = ""
            chunks.append(token[:width])
            token = token[width:]
        if len(current) + len(token) > width and current:
            chunks.append(current)
            current = ""
        current += token
    if current:
        chunks.append(current)
    return chunks


def wrap_text(text: str, width: int) -> str:
    """Greedy fill at term and factor boundaries; no line exceeds ``width``."""
    if len(text) <= width:
        return text
    lines: List[str] = []
    current = ""
    for unit in break_units(text):
        if len(unit) > width:
            if current:
                lines.append(current)
                current = ""
            *full, current = _split_long(unit, width)
            lines.extend(full)
        elif not current:
            current = unit
        elif len(current) + 1 + len(unit) <= width:
            current += " " + unit
        else:
            lines.append(current)
            current = unit
    lines.append(current)
    return "\n".join(lines)


def render_listing(name: str, expr: Expression, opts: RenderOptions = RenderOptions()) -> str:
    """FORM ``Print`` listing: header line, indented wrapped body, ``;`` terminator."""
    tokens = component_tokens(render_plain(expr)) + [";"]
    return "\n".join([f"{name} ="] + wrap_tokens(tokens, opts.width))


def component_tokens(text: str) -> List[str]:
    """Split rendered text into unbreakable tokens; a leading sign becomes ' - '."""
    tokens: List[str] = []
    if text.startswith("- "):
        tokens.append(" - ")
        text = text[2:]
    tokens.extend(match.group(0) for match in _WRAP_TOKEN.finditer(text))
    return tokens


def wrap_tokens(tokens: Sequence[str], width: int, indent: str = LISTING_INDENT) -> List[str]:
    """Greedy fill; a line including its indent never exceeds width - 4 characters."""
    limit = width - 4
    lines: List[str] = []
    current = indent
    for token in tokens:
        if len(current) + len(token) > limit and len(current) > len(indent):
            lines.append(current)
            current = indent
        current += token
    lines.append(current)
    return lines


def _is_tex_atom(node: Expression) -> bool:
    if isinstance(node, Tensor):
        return node.notation == "tex"
    if isinstance(node, (Derivative, SqrtNegDet)):
        return True
    if isinstance(node, Symbol):
        return node.name.startswith("\\")
    return False


def _is_tex(node: Expression) -> bool:
    if isinstance(node, Power):
        return _is_tex(node.base)
    return _is_tex_atom(node)


# plain text

def render_index_groups(indices: Sequence[Index]) -> str:
    groups: List[Tuple[str, List[str]]] = []
    for index in indices:
        marker = index.variance.value
        if groups and groups[-1][0] == marker:
            groups[-1][1].append(str(index))
        else:
            groups.append((marker, [str(index)]))
    return "".join(f"{marker}{{{' '.join(names)}}}" for marker, names in groups)


def _tensor_plain(tensor: Tensor) -> str:
    if tensor.notation == "call":
        return f"{tensor.head}({','.join(str(i) for i in tensor.indices)})"
    return tensor.head + render_index_groups(tensor.indices)


def _atom_plain(expr: Expression) -> str:
    if isinstance(expr, Number):
        return str(expr.value)
    if isinstance(expr, Symbol):
        return expr.name
    if isinstance(expr, SqrtNegDet):
        return f"\\sqrt{{-{expr.metric}}}"
    if isinstance(expr, Tensor):
        return _tensor_plain(expr)
    if isinstance(expr, Derivative):
        return f"{expr.operator}_{{{expr.index}}}{{{render_plain(expr.argument)}}}"
    if isinstance(expr, Power):
        return f"{_power_base_plain(expr.base)}^{expr.exponent}"
    return f"({render_plain(expr)})"


def _power_base_plain(base: Expression) -> str:
    if isinstance(base, Number) and (base.value < 0 or base.value.denominator != 1):
        return f"({base.value})"
    if isinstance(base, (Sum, Product, Power)):
        return f"({render_plain(base)})"
    return _atom_plain(base)


def _reciprocal_plain(factor: Power) -> str:
    base = _power_base_plain(factor.base)
    return base if factor.exponent == -1 else f"{base}^{-factor.exponent}"


def _term_body_plain(magnitude: Fraction, factors: Tuple[Expression, ...]) -> str:
    text = ""
    previous_tex = None
    if magnitude != 1 or not factors:
        text = str(magnitude)
        previous_tex = False
    for factor in factors:
        if isinstance(factor, Power) and factor.exponent < 0:
            text = (text or "1") + "/" + _reciprocal_plain(factor)
            previous_tex = _is_tex(factor)
            continue
        current_tex = _is_tex(factor)
        if previous_tex is not None:
            text += " " if (previous_tex or current_tex) else "*"
        text += _atom_plain(factor)
        previous_tex = current_tex
    return text


def render_plain(expr: Expression) -> str:
    if isinstance(expr, Equation):
        return f"{render_plain(expr.lhs)} = {render_plain(expr.rhs)}"
    terms = terms_of(expr) or (Number(Fraction(0)),)
    pieces: List[str] = []
    for position, term in enumerate(terms):
        coefficient, factors = split_term(term)
        body = _term_body_plain(abs(coefficient), factors)
        if position == 0:
            pieces.append(f"- {body}" if coefficient < 0 else body)
        else:
            pieces.append(f" - {body}" if coefficient < 0 else f" + {body}")
    return "".join(pieces)


# LaTeX

def _number_latex(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"\\frac{{{value.numerator}}}{{{value.denominator}}}"


def _atom_latex(expr: Expression) -> str:
    if isinstance(expr, Number):
        return _number_latex(expr.value)
    if isinstance(expr, Symbol):
        return expr.name
    if isinstance(expr, SqrtNegDet):
        return f"\\sqrt{{-{expr.metric}}}"
    if isinstance(expr, Tensor):
        if expr.notation == "call":
            return _tensor_plain(expr)
        return f"{{{expr.head}}}" + render_index_groups(expr.indices)
    if isinstance(expr, Derivative):
        return f"{{{expr.operator}}}_{{{expr.index}}}{{{render_latex(expr.argument)}}}"
    if isinstance(expr, Power):
        base = expr.base
        base_text = f"({render_latex(base)})" if isinstance(base, (Sum, Product)) else _atom_latex(base)
        return f"{base_text}^{{{expr.exponent}}}"
    return f"({render_latex(expr)})"


def _term_body_latex(magnitude: Fraction, factors: Tuple[Expression, ...]) -> str:
    direct: List[str] = []
    reciprocal: List[str] = []
    for factor in factors:
        if isinstance(factor, Power) and factor.exponent < 0:
            reciprocal.append(_atom_latex(Power(factor.base, -factor.exponent))
                              if factor.exponent != -1 else _atom_latex(factor.base))
        else:
            direct.append(_atom_latex(factor))
    if not reciprocal:
        leading = [_number_latex(magnitude)] if magnitude != 1 or not factors else []
        return " ".join(leading + direct)
    numerator = ([str(magnitude.numerator)] if magnitude.numerator != 1 else []) + direct
    denominator = ([str(magnitude.denominator)] if magnitude.denominator != 1 else []) + reciprocal
    return f"\\frac{{{' '.join(numerator) or '1'}}}{{{' '.join(denominator)}}}"


def render_latex(expr: Expression) -> str:
    if isinstance(expr, Equation):
        return f"{render_latex(expr.lhs)} = {render_latex(expr.rhs)}"
    terms = terms_of(expr) or (Number(Fraction(0)),)
    pieces: List[str] = []
    for position, term in enumerate(terms):
        coefficient, factors = split_term(term)
        body = _term_body_latex(abs(coefficient), factors)
        if position == 0:
            pieces.append(f"-{body}" if coefficient < 0 else body)
        else:
            pieces.append(f" - {body}" if coefficient < 0 else f" + {body}")
    return "".join(pieces)
