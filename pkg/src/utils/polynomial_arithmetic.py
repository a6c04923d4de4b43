"""
Exact multivariate polynomials and rational functions over the rationals.

Monomials are sorted tuples of (symbol, exponent) pairs. Terms are ordered
by total degree first, then by the exponent of the alphabetically latest
symbol, so that ``(b - a)**2`` prints as ``b^2 - 2*a*b + a^2``.
"""

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .exceptions import (
    NonExactDivisionError,
    NotASquareError,
    PoleError,
    UnboundSymbolError,
    ZeroDenominatorError,
)

Monomial = Tuple[Tuple[str, int], ...]
Scalar = Union[int, Fraction]

ONE_MONOMIAL: Monomial = ()


def monomial_key(monomial: Monomial) -> tuple:
    """Sort key of the graded order used for leading terms and printing."""
    degree = sum(exponent for _, exponent in monomial)
    return (degree, tuple(sorted(monomial, reverse=True)))


def monomial_multiply(left: Monomial, right: Monomial) -> Monomial:
    exponents: Dict[str, int] = dict(left)
    for name, exponent in right:
        exponents[name] = exponents.get(name, 0) + exponent
    return tuple(sorted((n, e) for n, e in exponents.items() if e != 0))


def monomial_divide(numerator: Monomial, divisor: Monomial) -> Optional[Monomial]:
    """Quotient of two monomials, or None when ``divisor`` does not divide."""
    exponents: Dict[str, int] = dict(numerator)
    for name, exponent in divisor:
        remaining = exponents.get(name, 0) - exponent
        if remaining < 0:
            return None
        exponents[name] = remaining
    return tuple(sorted((n, e) for n, e in exponents.items() if e != 0))


def format_monomial(monomial: Monomial) -> str:
    parts = []
    for name, exponent in monomial:
        parts.append(name if exponent == 1 else f"{name}^{exponent}")
    return "*".join(parts)


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num_root = math.isqrt(value.numerator)
    den_root = math.isqrt(value.denominator)
    if num_root * num_root != value.numerator or den_root * den_root != value.denominator:
        return None
    return Fraction(num_root, den_root)


class Polynomial:
    """Sparse polynomial with Fraction coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self._terms: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in (terms or {}).items():
            coefficient = Fraction(coefficient)
            if coefficient != 0:
                self._terms[monomial] = coefficient

    @classmethod
    def constant(cls, value: Scalar) -> "Polynomial":
        return cls({ONE_MONOMIAL: value})

    @classmethod
    def symbol(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    @staticmethod
    def coerce(value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, (int, Fraction)):
            return Polynomial.constant(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Polynomial")

    # inspection

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(monomial == ONE_MONOMIAL for monomial in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    @property
    def symbols(self) -> Set[str]:
        return {name for monomial in self._terms for name, _ in monomial}

    def degree(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self._terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    @property
    def leading_monomial(self) -> Monomial:
        return max(self._terms, key=monomial_key)

    @property
    def leading_coefficient(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return self._terms[self.leading_monomial]

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        """Terms in descending order."""
        return sorted(self._terms.items(), key=lambda item: monomial_key(item[0]), reverse=True)

    def coefficients_in(self, name: str) -> Dict[int, "Polynomial"]:
        """View as a polynomial in ``name`` with polynomial coefficients."""
        grouped: Dict[int, Dict[Monomial, Fraction]] = {}
        for monomial, coefficient in self._terms.items():
            exponents = dict(monomial)
            power = exponents.pop(name, 0)
            rest = tuple(sorted(exponents.items()))
            grouped.setdefault(power, {})[rest] = coefficient
        return {power: Polynomial(terms) for power, terms in grouped.items()}

    def evaluate(self, bindings: Mapping[str, Scalar]) -> Fraction:
        missing = sorted(self.symbols - set(bindings))
        if missing:
            raise UnboundSymbolError(f"no value bound for symbol(s): {', '.join(missing)}")
        total = Fraction(0)
        for monomial, coefficient in self._terms.items():
            value = coefficient
            for name, exponent in monomial:
                value *= Fraction(bindings[name]) ** exponent
            total += value
        return total

    # arithmetic

    def __add__(self, other) -> "Polynomial":
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for monomial, coefficient in other._terms.items():
            terms[monomial] = terms.get(monomial, Fraction(0)) + coefficient
        return Polynomial(terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return Polynomial.coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                monomial = monomial_multiply(m1, m2)
                terms[monomial] = terms.get(monomial, Fraction(0)) + c1 * c2
        return Polynomial(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative exponent on a polynomial")
        result = Polynomial.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: Scalar) -> "Polynomial":
        factor = Fraction(factor)
        return Polynomial({m: c * factor for m, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        pieces = []
        for position, (monomial, coefficient) in enumerate(self.sorted_terms()):
            magnitude = abs(coefficient)
            body = format_monomial(monomial)
            if not body:
                body = str(magnitude)
            elif magnitude != 1:
                body = f"{magnitude}*{body}"
            if position == 0:
                pieces.append(f"- {body}" if coefficient < 0 else body)
            else:
                pieces.append(f" - {body}" if coefficient < 0 else f" + {body}")
        return "".join(pieces)


def unit_factor(poly: Polynomial) -> Fraction:
    """Factor making ``poly`` integral, primitive, with positive leading coefficient."""
    if poly.is_zero():
        return Fraction(1)
    coefficients = list(poly.terms.values())
    denominator_lcm = 1
    for c in coefficients:
        denominator_lcm = denominator_lcm * c.denominator // math.gcd(denominator_lcm, c.denominator)
    numerator_gcd = 0
    for c in coefficients:
        numerator_gcd = math.gcd(numerator_gcd, (c * denominator_lcm).numerator)
    factor = Fraction(denominator_lcm, numerator_gcd)
    if poly.leading_coefficient < 0:
        factor = -factor
    return factor


def unit_normal(poly: Polynomial) -> Polynomial:
    return poly.scale(unit_factor(poly))


def try_divide(dividend: Polynomial, divisor: Polynomial) -> Optional[Polynomial]:
    """Exact quotient, or None when the division leaves a remainder."""
    if divisor.is_zero():
        raise ZeroDenominatorError("division by the zero polynomial")
    lead_monomial = divisor.leading_monomial
    lead_coefficient = divisor.leading_coefficient
    quotient: Dict[Monomial, Fraction] = {}
    remainder = dividend
    while not remainder.is_zero():
        monomial = monomial_divide(remainder.leading_monomial, lead_monomial)
        if monomial is None:
            return None
        coefficient = remainder.leading_coefficient / lead_coefficient
        quotient[monomial] = quotient.get(monomial, Fraction(0)) + coefficient
        remainder = remainder - Polynomial({monomial: coefficient}) * divisor
    return Polynomial(quotient)


def divide_exact(dividend: Polynomial, divisor: Polynomial) -> Polynomial:
    quotient = try_divide(dividend, divisor)
    if quotient is None:
        raise NonExactDivisionError(f"({dividend}) is not divisible by ({divisor})")
    return quotient


def _monomial_content(poly: Polynomial) -> Monomial:
    common: Optional[Dict[str, int]] = None
    for monomial in poly.terms:
        exponents = dict(monomial)
        if common is None:
            common = exponents
        else:
            common = {n: min(e, exponents[n]) for n, e in common.items() if n in exponents}
    return tuple(sorted((common or {}).items()))


def _pseudo_remainder(dividend: Polynomial, divisor: Polynomial, name: str) -> Polynomial:
    divisor_degree = divisor.degree(name)
    divisor_lead = divisor.coefficients_in(name)[divisor_degree]
    remainder = dividend
    while not remainder.is_zero() and remainder.degree(name) >= divisor_degree:
        degree = remainder.degree(name)
        lead = remainder.coefficients_in(name)[degree]
        shift = Polynomial({((name, degree - divisor_degree),) if degree > divisor_degree else ONE_MONOMIAL: 1})
        remainder = divisor_lead * remainder - lead * shift * divisor
    return remainder


def content(poly: Polynomial, name: str) -> Polynomial:
    """GCD of the coefficients of ``poly`` viewed as a polynomial in ``name``."""
    result = Polynomial()
    for coefficient in poly.coefficients_in(name).values():
        result = gcd(result, coefficient)
        if result.is_constant():
            return Polynomial.constant(1)
    return result


def primitive_part(poly: Polynomial, name: str) -> Polynomial:
    if poly.is_zero():
        return poly
    return unit_normal(divide_exact(poly, content(poly, name)))


def _primitive_prs_gcd(first: Polynomial, second: Polynomial, name: str) -> Polynomial:
    if first.degree(name) < second.degree(name):
        first, second = second, first
    while True:
        remainder = _pseudo_remainder(first, second, name)
        if remainder.is_zero():
            return primitive_part(second, name)
        if remainder.degree(name) == 0:
            return Polynomial.constant(1)
        first, second = second, primitive_part(remainder, name)


def gcd(first: Polynomial, second: Polynomial) -> Polynomial:
    """Greatest common divisor, unit-normalized (content and primitive PRS)."""
    if first.is_zero():
        return unit_normal(second)
    if second.is_zero():
        return unit_normal(first)
    if first.is_constant() or second.is_constant():
        return Polynomial.constant(1)
    if first.is_monomial() or second.is_monomial():
        exponents = dict(_monomial_content(second))
        common = tuple((n, min(e, exponents[n])) for n, e in _monomial_content(first) if n in exponents)
        return Polynomial({common: 1})
    if try_divide(first, second) is not None:
        return unit_normal(second)
    if try_divide(second, first) is not None:
        return unit_normal(first)

    name = min(first.symbols | second.symbols)
    if name not in second.symbols:
        return gcd(content(first, name), second)
    if name not in first.symbols:
        return gcd(first, content(second, name))

    first_content = content(first, name)
    second_content = content(second, name)
    common_content = gcd(first_content, second_content)
    first_primitive = divide_exact(first, first_content)
    second_primitive = divide_exact(second, second_content)
    return unit_normal(common_content * _primitive_prs_gcd(first_primitive, second_primitive, name))


def sqrt_polynomial(poly: Polynomial, max_steps: int = 10_000) -> Polynomial:
    """Square root with positive leading coefficient, term by term from the top."""
    if poly.is_zero():
        return poly
    root_coefficient = _rational_sqrt(poly.leading_coefficient)
    lead_exponents = dict(poly.leading_monomial)
    if root_coefficient is None or any(e % 2 for e in lead_exponents.values()):
        raise NotASquareError(f"{poly} is not a perfect square")
    root_monomial = tuple(sorted((n, e // 2) for n, e in lead_exponents.items()))
    root = Polynomial({root_monomial: root_coefficient})
    for _ in range(max_steps):
        remainder = poly - root * root
        if remainder.is_zero():
            return root
        monomial = monomial_divide(remainder.leading_monomial, root_monomial)
        if monomial is None or monomial_key(monomial) >= monomial_key(root_monomial):
            raise NotASquareError(f"{poly} is not a perfect square")
        root = root + Polynomial({monomial: remainder.leading_coefficient / (2 * root_coefficient)})
    raise NotASquareError(f"square root of {poly} did not terminate")


class RationalFunction:
    """Quotient of two polynomials; arithmetic results are normalized."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=None):
        self.numerator = Polynomial.coerce(numerator)
        self.denominator = Polynomial.constant(1) if denominator is None else Polynomial.coerce(denominator)
        if self.denominator.is_zero():
            raise ZeroDenominatorError(f"zero denominator in ({self.numerator})/0")

    @classmethod
    def constant(cls, value: Scalar) -> "RationalFunction":
        return cls(Polynomial.constant(value))

    @classmethod
    def symbol(cls, name: str) -> "RationalFunction":
        return cls(Polynomial.symbol(name))

    @staticmethod
    def coerce(value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return RationalFunction(value)
        if isinstance(value, (int, Fraction)):
            return RationalFunction.constant(value)
        raise TypeError(f"cannot convert {type(value).__name__} to RationalFunction")

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_constant(self) -> bool:
        normal = normalize(self)
        return normal.numerator.is_constant() and normal.denominator.is_constant()

    def constant_value(self) -> Fraction:
        normal = normalize(self)
        return normal.numerator.constant_value() / normal.denominator.constant_value()

    @property
    def symbols(self) -> Set[str]:
        return self.numerator.symbols | self.denominator.symbols

    def __add__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if self.denominator == other.denominator:
            return normalize(RationalFunction(self.numerator + other.numerator, self.denominator))
        return normalize(RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        ))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RationalFunction.coerce(other) - self

    def __mul__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return normalize(RationalFunction(self.numerator * other.numerator,
                                          self.denominator * other.denominator))

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDenominatorError("reciprocal of zero")
        return normalize(RationalFunction(self.denominator, self.numerator))

    def __truediv__(self, other):
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        return normalize(RationalFunction(self.numerator ** exponent, self.denominator ** exponent))

    def __eq__(self, other) -> bool:
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return equal(self, other)

    def __hash__(self) -> int:
        normal = normalize(self)
        return hash((normal.numerator, normal.denominator))

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def __str__(self) -> str:
        normal = normalize(self)
        numerator = str(normal.numerator)
        if normal.denominator == 1:
            return numerator
        if len(normal.numerator) > 1:
            numerator = f"({numerator})"
        denominator = str(normal.denominator)
        if len(normal.denominator.symbols) != 1 or normal.denominator != Polynomial.symbol(denominator):
            denominator = f"({denominator})"
        return f"{numerator}/{denominator}"


def normalize(value: RationalFunction) -> RationalFunction:
    """Reduced form: coprime parts, primitive integral denominator with positive lead."""
    numerator, denominator = value.numerator, value.denominator
    if denominator.is_zero():
        raise ZeroDenominatorError("zero denominator")
    if numerator.is_zero():
        return RationalFunction(Polynomial(), Polynomial.constant(1))
    if denominator.is_constant():
        return RationalFunction(numerator.scale(1 / denominator.constant_value()), Polynomial.constant(1))
    common = gcd(numerator, denominator)
    if not common.is_constant():
        numerator = divide_exact(numerator, common)
        denominator = divide_exact(denominator, common)
    factor = unit_factor(denominator)
    return RationalFunction(numerator.scale(factor), denominator.scale(factor))


def equal(first: RationalFunction, second: RationalFunction) -> bool:
    """Arithmetic equality by cross-multiplication."""
    difference = first.numerator * second.denominator - second.numerator * first.denominator
    return difference.is_zero()


def eval_numeric(value: RationalFunction, bindings: Mapping[str, Scalar]) -> Fraction:
    """Exact value at a rational point."""
    numerator = value.numerator.evaluate(bindings)
    denominator = value.denominator.evaluate(bindings)
    if denominator == 0:
        raise PoleError(f"pole of ({value}) at "
                        + ", ".join(f"{k}={bindings[k]}" for k in sorted(value.symbols)))
    return numerator / denominator


def sqrt(value: RationalFunction) -> RationalFunction:
    """Exact square root with positive leading coefficients."""
    normal = normalize(value)
    return RationalFunction(sqrt_polynomial(normal.numerator), sqrt_polynomial(normal.denominator))


def from_terms(items: Iterable[Tuple[Monomial, Scalar]]) -> Polynomial:
    terms: Dict[Monomial, Fraction] = {}
    for monomial, coefficient in items:
        terms[monomial] = terms.get(monomial, Fraction(0)) + Fraction(coefficient)
    return Polynomial(terms)
