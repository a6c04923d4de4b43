#!/usr/bin/env python3
"""
Tests for the shared utilities: exact polynomial / rational arithmetic and errors
"""

import os
import sys
import traceback
from fractions import Fraction

import numpy as np
import pytest
import sympy

# Add the parent directory to the path so we can import src modules
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.utils.exceptions import (
    EvaluationError,
    NotASquareError,
    ParseError,
    PoleError,
    UnboundSymbolError,
    ZeroDenominatorError,
)
from src.utils.polynomial_arithmetic import (
    Polynomial,
    RationalFunction,
    equal,
    eval_numeric,
    gcd,
    normalize,
    sqrt,
    try_divide,
)

a = Polynomial.symbol("a")
b = Polynomial.symbol("b")
r = Polynomial.symbol("r")


def to_sympy(poly: Polynomial):
    return sympy.sympify(str(poly).replace("^", "**"))


def random_polynomial(rng, max_degree: int = 2) -> Polynomial:
    terms = {}
    for degree_a in range(max_degree + 1):
        for degree_b in range(max_degree + 1 - degree_a):
            coefficient = int(rng.integers(-3, 4))
            monomial = tuple((n, e) for n, e in (("a", degree_a), ("b", degree_b)) if e)
            terms[monomial] = coefficient
    return Polynomial(terms)


def test_printing_order():
    """Descending graded order: b^2 > a*b > a^2, r above a and b."""
    assert str((b - a) ** 2) == "b^2 - 2*a*b + a^2"
    assert str(r - a) == "r - a"
    assert str(Polynomial.constant(0)) == "0"
    assert str(-(a * b).scale(3)) == "- 3*a*b"
    print("✓ Polynomial printing tests passed")


def test_normalize_cancels_common_factor():
    """(b^2 - 2ab + a^2)/(b - a) reduces to b - a."""
    value = normalize(RationalFunction((b - a) ** 2, b - a))
    assert value.denominator == 1
    assert value.numerator == b - a
    halves = normalize(RationalFunction(a.scale(2), b.scale(4)))
    assert halves == RationalFunction(a, b.scale(2))
    assert halves.denominator == b
    print("✓ Normalization tests passed")


def test_rational_equality_is_arithmetic():
    first = RationalFunction(a * a - b * b, a - b)
    second = RationalFunction(a + b)
    assert equal(first, second)
    assert first == second
    assert RationalFunction.symbol("a") / RationalFunction.symbol("a") == 1
    assert RationalFunction.constant(Fraction(1, 2)) * 2 == 1
    print("✓ Rational equality tests passed")


def test_gcd_against_sympy():
    """gcd(p*q, p*r) agrees with sympy up to a constant on 200 random cases."""
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 200:
        p, q, s = (random_polynomial(rng) for _ in range(3))
        if p.is_zero() or q.is_zero() or s.is_zero():
            continue
        left, right = p * q, p * s
        mine = gcd(left, right)
        assert try_divide(left, mine) is not None
        assert try_divide(right, mine) is not None
        theirs = sympy.gcd(to_sympy(left), to_sympy(right))
        ratio = sympy.cancel(to_sympy(mine) / theirs)
        assert ratio.is_number and ratio != 0
        checked += 1
    print("✓ GCD oracle tests passed")


def test_gcd_round_trip():
    """Reducing (p*q)/(p*s) and multiplying back gives the original quotient."""
    rng = np.random.default_rng(7)
    for _ in range(200):
        p, q, s = (random_polynomial(rng, 1) for _ in range(3))
        if p.is_zero() or s.is_zero():
            continue
        value = RationalFunction(p * q, p * s)
        reduced = normalize(value)
        assert equal(reduced, RationalFunction(q, s))
        assert reduced * RationalFunction(s) == RationalFunction(q)
    print("✓ GCD round-trip tests passed")


def test_square_roots():
    scale = RationalFunction(b, b - a)
    value = scale ** 4 * RationalFunction((r - a) ** 2)
    root = sqrt(value)
    assert root * root == value
    assert root == scale ** 2 * RationalFunction(r - a)
    assert sqrt(RationalFunction.constant(Fraction(9, 4))) == Fraction(3, 2)
    with pytest.raises(NotASquareError):
        sqrt(RationalFunction(a + b))
    print("✓ Square root tests passed")


def test_numeric_evaluation():
    value = RationalFunction(r - a, r)
    assert eval_numeric(value, {"r": 2, "a": 1}) == Fraction(1, 2)
    with pytest.raises(PoleError):
        eval_numeric(value, {"r": 0, "a": 1})
    with pytest.raises(UnboundSymbolError):
        eval_numeric(value, {"r": 2})
    with pytest.raises(ZeroDenominatorError):
        RationalFunction(a, Polynomial())
    print("✓ Numeric evaluation tests passed")


def test_error_exit_codes():
    error = ParseError("expected '}'", 4, ["}"])
    assert error.exit_code == 1
    assert "at position 4" in str(error)
    located = error.located(3, 7)
    assert str(located).startswith("line 3, column 7: expected '}'")
    assert EvaluationError("boom").exit_code == 2
    assert issubclass(PoleError, EvaluationError)
    print("✓ Error hierarchy tests passed")


def main():
    """Run all utility tests."""
    print("=" * 60)
    print("UTILITY TESTS - EXACT ARITHMETIC")
    print("=" * 60)

    tests = [
        test_printing_order,
        test_normalize_cancels_common_factor,
        test_rational_equality_is_arithmetic,
        test_gcd_against_sympy,
        test_gcd_round_trip,
        test_square_roots,
        test_numeric_evaluation,
        test_error_exit_codes,
    ]

    passed = 0
    total = len(tests)

    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"✗ {test.__name__} failed: {e}")
            traceback.print_exc()

    print("\n" + "=" * 60)
    print(f"TEST RESULTS: {passed}/{total} tests passed")
    print("=" * 60)

    return passed == total


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
