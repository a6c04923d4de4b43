"""
Bridge between scalar expressions and exact rational functions.
"""

from fractions import Fraction
from typing import List, Union

from ..part_1_abstract_tensor_algebra.tensor_context import Context
from ..part_1_abstract_tensor_algebra.tensor_expression import (
    Expression,
    Number,
    Power,
    Product,
    Sum,
    Symbol,
    make_power,
    make_product,
    make_sum,
)
from ..part_1_abstract_tensor_algebra.tensor_expression_parser import parse
from ..utils.exceptions import ComponentError
from ..utils.polynomial_arithmetic import Polynomial, RationalFunction, normalize

ScalarLike = Union[RationalFunction, Polynomial, int, Fraction, str]


def expression_to_rational(expr: Expression) -> RationalFunction:
    """Exact value of a tensor-free expression."""
    if isinstance(expr, Number):
        return RationalFunction.constant(expr.value)
    if isinstance(expr, Symbol):
        return RationalFunction.symbol(expr.name)
    if isinstance(expr, Power):
        return expression_to_rational(expr.base) ** expr.exponent
    if isinstance(expr, Product):
        result = RationalFunction.constant(1)
        for factor in expr.factors:
            result = result * expression_to_rational(factor)
        return result
    if isinstance(expr, Sum):
        result = RationalFunction.constant(0)
        for term in expr.terms:
            result = result + expression_to_rational(term)
        return result
    raise ComponentError(f"{type(expr).__name__} is not a scalar")


def _monomial_factors(monomial) -> List[Expression]:
    return [make_power(Symbol(name), exponent) for name, exponent in monomial]


def polynomial_to_expression(poly: Polynomial) -> Expression:
    """Terms in descending order, e.g. ``b^2 - 2*a*b + a^2``."""
    return make_sum(make_product([Number(c), *_monomial_factors(m)]) for m, c in poly.sorted_terms())


def rational_to_terms(value: RationalFunction) -> List[Expression]:
    """
    FORM-style terms of a rational function.

    A polynomial denominator becomes a leading ``1/(...)`` factor on every
    numerator term; a monomial denominator is folded into the exponents.
    """
    value = normalize(value)
    numerator, denominator = value.numerator, value.denominator
    if numerator.is_zero():
        return []
    reciprocal: List[Expression] = []
    divisor_monomial = ()
    divisor_coefficient = Fraction(1)
    if denominator.is_monomial():
        (divisor_monomial, divisor_coefficient), = denominator.terms.items()
    else:
        reciprocal = [make_power(polynomial_to_expression(denominator), -1)]
    terms = []
    for monomial, coefficient in numerator.sorted_terms():
        factors = _monomial_factors(monomial) + [make_power(Symbol(n), -e) for n, e in divisor_monomial]
        terms.append(make_product([Number(coefficient / divisor_coefficient), *reciprocal, *factors]))
    return terms


def rational_to_expression(value: RationalFunction) -> Expression:
    return make_sum(rational_to_terms(value))


def as_rational(value: ScalarLike, ctx: Context = Context()) -> RationalFunction:
    """Coerce numbers, polynomials and scalar-expression text to a RationalFunction."""
    if isinstance(value, str):
        return expression_to_rational(parse(value, ctx))
    return RationalFunction.coerce(value)
