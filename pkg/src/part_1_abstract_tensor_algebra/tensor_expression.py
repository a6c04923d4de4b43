"""
Expression data model for abstract-index and component tensor algebra.

All nodes are frozen dataclasses. Build composite nodes through the
``make_*`` helpers, which flatten nested sums/products and fold numeric
coefficients into a single leading Number.
"""

from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

from ..utils.exceptions import IndexBalanceError, ZeroDenominatorError


class Variance(Enum):
    COVARIANT = "_"
    CONTRAVARIANT = "^"


@dataclass(frozen=True)
class Index:
    """A tensor slot label: abstract name, concrete value or id-rule wildcard."""

    name: str
    variance: Variance = Variance.COVARIANT
    value: Optional[int] = None
    wildcard: bool = False

    @classmethod
    def concrete(cls, value: int, variance: Variance = Variance.COVARIANT) -> "Index":
        return cls(str(value), variance, value)

    @property
    def is_concrete(self) -> bool:
        return self.value is not None

    @property
    def is_abstract(self) -> bool:
        return self.value is None and not self.wildcard

    def with_name(self, name: str) -> "Index":
        return replace(self, name=name)

    def with_value(self, value: int) -> "Index":
        return Index(str(value), self.variance, value)

    def __str__(self) -> str:
        return f"{self.name}?" if self.wildcard else self.name


class Expression:
    """Marker base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Number(Expression):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Symbol(Expression):
    """Scalar atom such as ``a``, ``r`` or ``\\pi``."""

    name: str


@dataclass(frozen=True)
class Tensor(Expression):
    head: str
    indices: Tuple[Index, ...] = ()
    notation: str = field(default="tex", compare=False)

    @property
    def is_wildcard(self) -> bool:
        return self.head.endswith("?")


@dataclass(frozen=True)
class Derivative(Expression):
    operator: str
    index: Index
    argument: Expression


@dataclass(frozen=True)
class Power(Expression):
    base: Expression
    exponent: int


@dataclass(frozen=True)
class Product(Expression):
    factors: Tuple[Expression, ...]


@dataclass(frozen=True)
class Sum(Expression):
    terms: Tuple[Expression, ...]


@dataclass(frozen=True)
class SqrtNegDet(Expression):
    """The atom sqrt(-det g) of a named metric."""

    metric: str


@dataclass(frozen=True)
class Equation(Expression):
    lhs: Expression
    rhs: Expression


ZERO = Number(Fraction(0))
ONE = Number(Fraction(1))

ExprLike = Union[Expression, int, Fraction]


def as_expression(value: ExprLike) -> Expression:
    if isinstance(value, Expression):
        return value
    return Number(Fraction(value))


def is_zero(expr: Expression) -> bool:
    return isinstance(expr, Number) and expr.value == 0


def _merge_key(factor: Expression) -> Optional[Tuple[Expression, int]]:
    """Base/exponent pair for factors whose powers may be merged."""
    if isinstance(factor, (Symbol, SqrtNegDet)):
        return factor, 1
    if isinstance(factor, Power) and isinstance(factor.base, (Symbol, SqrtNegDet)):
        return factor.base, factor.exponent
    return None


def make_product(factors: Iterable[ExprLike]) -> Expression:
    """Flattened product with one leading numeric coefficient."""
    coefficient = Fraction(1)
    collected: List[Expression] = []
    for factor in factors:
        factor = as_expression(factor)
        if isinstance(factor, Number):
            coefficient *= factor.value
        elif isinstance(factor, Product):
            for inner in factor.factors:
                if isinstance(inner, Number):
                    coefficient *= inner.value
                else:
                    collected.append(inner)
        else:
            collected.append(factor)
    if coefficient == 0:
        return ZERO

    # merge powers of scalar atoms, keeping first-occurrence order
    exponents: Dict[Expression, int] = {}
    order: List[Union[Expression, Tuple[str, Expression]]] = []
    for factor in collected:
        merge = _merge_key(factor)
        if merge is None:
            order.append(factor)
            continue
        base, exponent = merge
        if base not in exponents:
            exponents[base] = 0
            order.append(("merge", base))
        exponents[base] += exponent
    result: List[Expression] = []
    for item in order:
        if isinstance(item, tuple):
            base = item[1]
            if exponents[base] != 0:
                result.append(base if exponents[base] == 1 else Power(base, exponents[base]))
        else:
            result.append(item)

    if not result:
        return Number(coefficient)
    if coefficient == 1:
        return result[0] if len(result) == 1 else Product(tuple(result))
    return Product((Number(coefficient),) + tuple(result))


def make_sum(terms: Iterable[ExprLike]) -> Expression:
    """Flattened sum; zero terms dropped, empty sum is 0."""
    collected: List[Expression] = []
    for term in terms:
        term = as_expression(term)
        if isinstance(term, Sum):
            collected.extend(t for t in term.terms if not is_zero(t))
        elif not is_zero(term):
            collected.append(term)
    if not collected:
        return ZERO
    if len(collected) == 1:
        return collected[0]
    return Sum(tuple(collected))


def make_power(base: ExprLike, exponent: int) -> Expression:
    base = as_expression(base)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Number):
        if base.value == 0 and exponent < 0:
            raise ZeroDenominatorError("division by zero")
        return Number(base.value ** exponent)
    if isinstance(base, Power):
        return make_power(base.base, base.exponent * exponent)
    if isinstance(base, Product):
        return make_product(make_power(f, exponent) for f in base.factors)
    return Power(base, exponent)


def fold_sqrt_neg_det(metric: str, exponent: int) -> Expression:
    """
    ``sqrt(-g)^exponent`` with the even part written through det g.

    The determinant is the scalar named after the metric, as in
    ``\\sqrt{-g}``, so ``sqrt(-g)^2 = -g`` and ``sqrt(-g)^-3 = g^-2 sqrt(-g)``.
    """
    half, odd = divmod(exponent, 2)
    factors: List[Expression] = [Number(-1 if half % 2 else 1), make_power(Symbol(metric), half)]
    if odd:
        factors.append(SqrtNegDet(metric))
    return make_product(factors)


def negate(expr: Expression) -> Expression:
    if isinstance(expr, Sum):
        return make_sum(negate(t) for t in expr.terms)
    return make_product([Number(Fraction(-1)), expr])


def split_term(term: Expression) -> Tuple[Fraction, Tuple[Expression, ...]]:
    """Numeric coefficient and remaining factors of a single term."""
    if isinstance(term, Number):
        return term.value, ()
    if isinstance(term, Product):
        if term.factors and isinstance(term.factors[0], Number):
            return term.factors[0].value, term.factors[1:]
        return Fraction(1), term.factors
    return Fraction(1), (term,)


def make_term(coefficient: Fraction, factors: Iterable[Expression]) -> Expression:
    return make_product([Number(coefficient), *factors])


def terms_of(expr: Expression) -> Tuple[Expression, ...]:
    if isinstance(expr, Sum):
        return expr.terms
    if is_zero(expr):
        return ()
    return (expr,)


def map_indices(expr: Expression, mapping) -> Expression:
    """Apply ``mapping(index) -> Index`` to every index in ``expr``."""
    if isinstance(expr, Tensor):
        return replace(expr, indices=tuple(mapping(i) for i in expr.indices))
    if isinstance(expr, Derivative):
        return Derivative(expr.operator, mapping(expr.index), map_indices(expr.argument, mapping))
    if isinstance(expr, Power):
        return Power(map_indices(expr.base, mapping), expr.exponent)
    if isinstance(expr, Product):
        return Product(tuple(map_indices(f, mapping) for f in expr.factors))
    if isinstance(expr, Sum):
        return Sum(tuple(map_indices(t, mapping) for t in expr.terms))
    if isinstance(expr, Equation):
        return Equation(map_indices(expr.lhs, mapping), map_indices(expr.rhs, mapping))
    return expr


def rename_indices(expr: Expression, renaming: Dict[str, str]) -> Expression:
    """Rename abstract indices by name; variance is kept."""
    if not renaming:
        return expr
    return map_indices(
        expr, lambda i: i.with_name(renaming[i.name]) if i.is_abstract and i.name in renaming else i
    )


def rename_free_indices(expr: Expression, renaming: Dict[str, str]) -> Expression:
    """
    Rename the indices ``expr`` exposes to its enclosing term.

    Dummies bound inside a derivative argument or a nested sum are a scope
    of their own and keep their names.
    """
    if not renaming:
        return expr
    if isinstance(expr, Tensor):
        return rename_indices(expr, renaming)
    if isinstance(expr, Derivative):
        index = expr.index.with_name(renaming[expr.index.name]) \
            if expr.index.is_abstract and expr.index.name in renaming else expr.index
        argument = rename_free_indices(expr.argument, _visible_part(expr.argument, renaming))
        return Derivative(expr.operator, index, argument)
    if isinstance(expr, Power):
        return Power(rename_free_indices(expr.base, renaming), expr.exponent) if expr.exponent == 1 else expr
    if isinstance(expr, Product):
        return Product(tuple(rename_free_indices(f, renaming) for f in expr.factors))
    if isinstance(expr, Sum):
        inner = _visible_part(expr, renaming)
        return Sum(tuple(rename_free_indices(t, inner) for t in expr.terms))
    if isinstance(expr, Equation):
        return Equation(rename_free_indices(expr.lhs, renaming), rename_free_indices(expr.rhs, renaming))
    return expr


def _visible_part(expr: Expression, renaming: Dict[str, str]) -> Dict[str, str]:
    free = {i.name for i in free_indices(expr)}
    return {name: target for name, target in renaming.items() if name in free}


def iter_nodes(expr: Expression) -> Iterator[Expression]:
    yield expr
    if isinstance(expr, Derivative):
        yield from iter_nodes(expr.argument)
    elif isinstance(expr, Power):
        yield from iter_nodes(expr.base)
    elif isinstance(expr, (Product,)):
        for factor in expr.factors:
            yield from iter_nodes(factor)
    elif isinstance(expr, Sum):
        for term in expr.terms:
            yield from iter_nodes(term)
    elif isinstance(expr, Equation):
        yield from iter_nodes(expr.lhs)
        yield from iter_nodes(expr.rhs)


def all_index_names(expr: Expression) -> set:
    """Names of every abstract index anywhere in ``expr``."""
    names = set()
    for node in iter_nodes(expr):
        if isinstance(node, Tensor):
            names.update(i.name for i in node.indices if i.is_abstract)
        elif isinstance(node, Derivative) and node.index.is_abstract:
            names.add(node.index.name)
    return names


def visible_indices(factor: Expression) -> List[Index]:
    """Abstract indices a factor exposes to the enclosing term."""
    if isinstance(factor, Tensor):
        return [i for i in factor.indices if i.is_abstract]
    if isinstance(factor, Derivative):
        inner = list(free_indices(factor.argument))
        return ([factor.index] if factor.index.is_abstract else []) + inner
    if isinstance(factor, Power):
        return visible_indices(factor.base) if factor.exponent == 1 else []
    if isinstance(factor, Product):
        return [i for f in factor.factors for i in visible_indices(f)]
    if isinstance(factor, Sum):
        return list(free_indices(factor))
    return []


def term_index_counts(term: Expression) -> Counter:
    counts: Counter = Counter()
    for index in visible_indices(term):
        counts[index.name] += 1
    return counts


def dummy_names(term: Expression) -> List[str]:
    """Names of indices contracted at the top level of ``term``, in order of appearance."""
    counts = term_index_counts(term)
    seen: List[str] = []
    for index in visible_indices(term):
        if counts[index.name] == 2 and index.name not in seen:
            seen.append(index.name)
    return seen


def _term_free(term: Expression) -> Tuple[Index, ...]:
    indices = visible_indices(term)
    counts = Counter(i.name for i in indices)
    for name, count in counts.items():
        if count > 2:
            raise IndexBalanceError(f"index {name} appears {count} times in one term")
    free = [i for i in indices if counts[i.name] == 1]
    return tuple(sorted(free, key=lambda i: (i.name, i.variance.value)))


def free_indices(expr: Expression) -> Tuple[Index, ...]:
    """Free indices of a balanced expression, sorted by name."""
    if isinstance(expr, Equation):
        left, right = free_indices(expr.lhs), free_indices(expr.rhs)
        if not is_zero(expr.rhs) and not is_zero(expr.lhs) and _names(left) != _names(right):
            raise IndexBalanceError(
                f"sides of equation have different free indices: "
                f"{_names(left)} vs {_names(right)}"
            )
        return left
    terms = terms_of(expr)
    if not terms:
        return ()
    reference = _term_free(terms[0])
    for term in terms[1:]:
        current = _term_free(term)
        if _names(current) != _names(reference):
            from .tensor_expression_renderer import render_plain
            raise IndexBalanceError(
                f"index-balance violation in term '{render_plain(term)}': free indices "
                f"{_names(current)} vs {_names(reference)}"
            )
    return reference


def _names(indices: Tuple[Index, ...]) -> Tuple[str, ...]:
    return tuple(sorted(i.name for i in indices))
