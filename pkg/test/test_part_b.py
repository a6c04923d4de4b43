#!/usr/bin/env python3
"""
Tests for Part B: Component Calculation
"""

import itertools
import os
import sys
import traceback
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
import sympy
from sympy.combinatorics import Permutation

# Add the parent directory to the path so we can import src modules
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.part_1_abstract_tensor_algebra.tensor_canonicalizer import canonicalize
from src.part_1_abstract_tensor_algebra.tensor_context import (
    Context,
    SymmetryDecl,
    SymmetryGroup,
    SymmetryKind,
    declare_indices,
    declare_symbols,
    declare_tensor,
)
from src.part_1_abstract_tensor_algebra.tensor_expression import Index, Number, Tensor, make_product, split_term, terms_of
from src.part_1_abstract_tensor_algebra.tensor_expression_parser import parse
from src.part_2_component_calculation.component_engine import (
    ComponentEngine,
    IdRule,
    determinant,
    determinant_expansion,
    inverse,
    levi_civita_sign,
)
from src.part_2_component_calculation.component_scalars import as_rational, rational_to_expression
from src.part_1_abstract_tensor_algebra.tensor_expression_renderer import RenderOptions, render, render_listing
from src.session.script_session import run_script
from src.utils.exceptions import ComponentError
from src.utils.polynomial_arithmetic import RationalFunction

SCRIPT = Path(__file__).parent.parent / "assets" / "scripts" / "cloak_determinant.frm"

DETG_LISTING = "\n".join([
    "detG =",
    "   g(0,0)*g(1,1)*g(2,2)*g(3,3) - g(0",
    "   ,0)*g(1,1)*g(2,3)*g(3,2) - g(0,0)",
    "   *g(1,2)*g(2,1)*g(3,3) + g(0,0)*g(",
    "   1,2)*g(2,3)*g(3,1) + g(0,0)*g(1,3",
    "   )*g(2,1)*g(3,2) - g(0,0)*g(1,3)*",
    "   g(2,2)*g(3,1) - g(0,1)*g(1,0)*g(2",
    "   ,2)*g(3,3) + g(0,1)*g(1,0)*g(2,3)",
    "   *g(3,2) + g(0,1)*g(1,2)*g(2,0)*g(",
    "   3,3) - g(0,1)*g(1,2)*g(2,3)*g(3,0",
    "   ) - g(0,1)*g(1,3)*g(2,0)*g(3,2)",
    "    + g(0,1)*g(1,3)*g(2,2)*g(3,0) + ",
    "   g(0,2)*g(1,0)*g(2,1)*g(3,3) - g(0",
    "   ,2)*g(1,0)*g(2,3)*g(3,1) - g(0,2)",
    "   *g(1,1)*g(2,0)*g(3,3) + g(0,2)*g(",
    "   1,1)*g(2,3)*g(3,0) + g(0,2)*g(1,3",
    "   )*g(2,0)*g(3,1) - g(0,2)*g(1,3)*",
    "   g(2,1)*g(3,0) - g(0,3)*g(1,0)*g(2",
    "   ,1)*g(3,2) + g(0,3)*g(1,0)*g(2,2)",
    "   *g(3,1) + g(0,3)*g(1,1)*g(2,0)*g(",
    "   3,2) - g(0,3)*g(1,1)*g(2,2)*g(3,0",
    "   ) - g(0,3)*g(1,2)*g(2,0)*g(3,1)",
    "    + g(0,3)*g(1,2)*g(2,1)*g(3,0);",
])

DETG_VALUE = "detG =\n    - 1/(b^2 - 2*a*b + a^2)*b^2;"


def form_context(dimension: int = 4) -> Context:
    ctx = declare_indices(Context(dimension=dimension), "indices", ["i", "j", "k", "l", "m"], first_value=0)
    ctx = declare_tensor(ctx, "g", SymmetryDecl())
    return declare_symbols(ctx, ["a", "b"])


def detg_expression(ctx: Context):
    return parse("e_(0,1,2,3) * e_(i,j,k,l) * g(0,i) * g(1,j) * g(2,k) * g(3,l)", ctx)


def permutation_oracle(matrix) -> Fraction:
    size = len(matrix)
    total = Fraction(0)
    for columns in itertools.permutations(range(size)):
        term = Fraction(Permutation(list(columns)).signature())
        for row, column in enumerate(columns):
            term *= matrix[row][column]
        total += term
    return total


def random_rational_matrix(rng, size: int = 4):
    return [[Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for _ in range(size)]
            for _ in range(size)]


def test_levi_civita_sign():
    assert levi_civita_sign((0, 1, 2, 3)) == 1
    assert levi_civita_sign((1, 0, 2, 3)) == -1
    assert levi_civita_sign((1, 2, 3, 0)) == -1
    assert levi_civita_sign((0, 0, 1, 2)) == 0
    print("✓ Levi-Civita sign tests passed")


def test_detg_contraction_has_24_terms():
    ctx = form_context()
    engine = ComponentEngine(ctx)
    result = engine.normalize_components(engine.contract_epsilon(detg_expression(ctx)))
    coefficients = [split_term(term)[0] for term in terms_of(result)]
    assert len(coefficients) == 24
    assert coefficients.count(1) == 12
    assert coefficients.count(-1) == 12
    print("✓ detG contraction tests passed")


def test_detg_listing_is_byte_identical():
    ctx = form_context()
    engine = ComponentEngine(ctx)
    result = engine.normalize_components(engine.contract_epsilon(detg_expression(ctx)))
    assert render_listing("detG", result, RenderOptions(width=40)) == DETG_LISTING
    lines = DETG_LISTING.splitlines()
    assert all(len(line) <= 36 for line in lines)
    print("✓ detG listing tests passed")


def test_detg_script_transcript():
    transcript = run_script(SCRIPT.read_text(encoding="utf-8"))
    assert transcript.status == 0, transcript.error
    assert transcript.outputs == [DETG_LISTING, DETG_VALUE]
    print("✓ detG script tests passed")


def test_id_rules_first_match_wins():
    ctx = form_context()
    rules = [IdRule(*_sides(parse(text, ctx))) for text in (
        "g(0,0) = 1", "g(1,1) = - b^2/(b-a)^2", "g(i?,i?) = - 1", "g(i?,j?) = 0")]
    engine = ComponentEngine(ctx)
    diagonal = parse("g(0,0)*g(1,1)*g(2,2)*g(3,3)", ctx)
    value = engine.apply_id_rules(diagonal, rules)
    expected = rational_to_expression(as_rational("- b^2/(b-a)^2", ctx))
    assert value == expected
    assert render(value) == "- 1/(b^2 - 2*a*b + a^2)*b^2"
    off_diagonal = parse("g(0,0)*g(1,1)*g(2,3)*g(3,2)", ctx)
    assert engine.apply_id_rules(off_diagonal, rules) == Number(0)
    print("✓ id rule tests passed")


def _sides(equation):
    return equation.lhs, equation.rhs


def test_id_rule_validation():
    ctx = form_context()
    rule = IdRule(*_sides(parse("g(i?,i?) = - 1", ctx)))
    assert rule.apply(Tensor("g", (Index.concrete(2), Index.concrete(2)), "call")) == Number(-1)
    assert rule.apply(Tensor("g", (Index.concrete(2), Index.concrete(3)), "call")) is None
    assert rule.apply(Tensor("g", (Index("i"), Index("i")), "call")) is None
    with pytest.raises(ComponentError):
        IdRule(*_sides(parse("g(i?,0) = g(j?,0)", ctx)))
    print("✓ id rule validation tests passed")


def test_epsilon_contractions():
    """Full and triple epsilon contractions in four dimensions."""
    ctx = form_context()
    engine = ComponentEngine(ctx)
    full = engine.contract_epsilon(parse("e_(i,j,k,l) * e_(i,j,k,l)", ctx))
    assert full == Number(24)
    triple = engine.contract_epsilon(parse("e_(i,j,k,l) * e_(i,j,k,m)", ctx))
    assert triple == make_product([Number(6), Tensor("d_", (Index("l"), Index("m")), "call")])
    print("✓ Epsilon contraction tests passed")


def test_epsilon_contraction_soundness():
    """Contracting then evaluating agrees with explicit component summation."""
    ctx = form_context(3)
    engine = ComponentEngine(ctx)
    expr = parse("e_(i,j,k) * e_(i,j,l) * g(k,l)", ctx)
    contracted = engine.contract_epsilon(expr)
    summed = engine.expand_dummies(expr)
    rng = np.random.default_rng(11)
    for _ in range(20):
        values = rng.integers(-4, 5, size=(3, 3))

        def evaluate(expression):
            total = Fraction(0)
            for term in terms_of(engine.expand_dummies(expression)):
                coefficient, factors = split_term(term)
                for factor in factors:
                    first, second = (index.value for index in factor.indices)
                    if factor.head == "d_":
                        coefficient *= int(first == second)
                    else:
                        coefficient *= int(values[first, second])
                total += coefficient
            return total

        assert evaluate(contracted) == evaluate(summed)
        assert evaluate(summed) == 2 * int(np.trace(values))
    print("✓ Epsilon contraction soundness tests passed")


def kronecker_total(expr, engine) -> Fraction:
    total = Fraction(0)
    for term in terms_of(engine.expand_dummies(expr)):
        coefficient, factors = split_term(term)
        for factor in factors:
            assert factor.head == "d_"
            first, second = (index.value for index in factor.indices)
            coefficient *= int(first == second)
        total += coefficient
    return total


def test_random_epsilon_pairs():
    """Random epsilon pairs in dimensions 2-4 against a Levi-Civita brute-force sum."""
    rng = np.random.default_rng(2718)
    names = ["i", "j", "k", "l"]
    for case in range(50):
        dimension = 2 + case % 3
        engine = ComponentEngine(form_context(dimension))
        shared = names[:int(rng.integers(0, dimension + 1))]

        def random_slots():
            indices = [Index.concrete(int(v)) for v in rng.integers(0, dimension, size=dimension)]
            for name, position in zip(shared, rng.permutation(dimension)):
                indices[int(position)] = Index(name)
            return tuple(indices)

        upper, lower = random_slots(), random_slots()
        expr = make_product([Tensor("e_", upper, "call"), Tensor("e_", lower, "call")])

        oracle = 0
        for assignment in itertools.product(range(dimension), repeat=len(shared)):
            values = dict(zip(shared, assignment))
            upper_values = [values[i.name] if i.is_abstract else i.value for i in upper]
            lower_values = [values[i.name] if i.is_abstract else i.value for i in lower]
            oracle += int(sympy.LeviCivita(*upper_values)) * int(sympy.LeviCivita(*lower_values))

        assert kronecker_total(engine.contract_epsilon(expr), engine) == oracle
        assert kronecker_total(engine.expand_dummies(expr), engine) == oracle
    print("✓ Random epsilon pair tests passed")


def test_structural_zero():
    """An epsilon contracted with a symmetric tensor vanishes."""
    ctx = declare_tensor(form_context(), "h", SymmetryDecl((SymmetryGroup((), SymmetryKind.SYMMETRIC),)))
    assert canonicalize(parse("e_(i,j,k,l) * h(i,j)", ctx), ctx) == Number(0)
    print("✓ Structural zero tests passed")


def test_determinant_expansion_signs():
    expansion = determinant_expansion(4)
    assert len(expansion) == 24
    assert sum(sign for sign, _ in expansion) == 0
    for sign, columns in expansion:
        assert sign == Permutation(list(columns)).signature()
    print("✓ Determinant expansion tests passed")


def test_determinant_against_permutation_oracle():
    rng = np.random.default_rng(1234)
    for _ in range(100):
        matrix = random_rational_matrix(rng)
        assert determinant(matrix) == permutation_oracle(matrix)
    print("✓ Determinant oracle tests passed")


def test_determinant_is_multiplicative():
    rng = np.random.default_rng(77)
    for _ in range(20):
        first = np.array(random_rational_matrix(rng), dtype=object)
        second = np.array(random_rational_matrix(rng), dtype=object)
        assert determinant(first.dot(second)) == determinant(first) * determinant(second)
    print("✓ Determinant multiplicativity tests passed")


def test_symbolic_determinant_and_inverse():
    b_over = as_rational("b^2/(b-a)^2")
    matrix = [[1, 0, 0, 0], [0, -b_over, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    assert determinant(matrix) == -b_over

    rng = np.random.default_rng(3)
    numeric = random_rational_matrix(rng)
    while determinant(numeric).is_zero():
        numeric = random_rational_matrix(rng)
    inv = inverse(numeric)
    oracle = sympy.Matrix(4, 4, lambda i, j: sympy.Rational(numeric[i][j].numerator, numeric[i][j].denominator)).inv()
    for row in range(4):
        for column in range(4):
            value = oracle[row, column]
            assert inv[row, column] == Fraction(int(value.p), int(value.q))
    for row in range(4):
        for column in range(4):
            entry = sum((inv[row, k] * numeric[k][column] for k in range(4)), RationalFunction.constant(0))
            assert entry == (1 if row == column else 0)

    with pytest.raises(ComponentError):
        inverse([[1, 2], [2, 4]])
    print("✓ Symbolic determinant and inverse tests passed")


def main():
    """Run all Part B tests."""
    print("=" * 60)
    print("PART B TESTS - COMPONENT CALCULATION")
    print("=" * 60)

    tests = [
        test_levi_civita_sign,
        test_detg_contraction_has_24_terms,
        test_detg_listing_is_byte_identical,
        test_detg_script_transcript,
        test_id_rules_first_match_wins,
        test_id_rule_validation,
        test_epsilon_contractions,
        test_epsilon_contraction_soundness,
        test_random_epsilon_pairs,
        test_structural_zero,
        test_determinant_expansion_signs,
        test_determinant_against_permutation_oracle,
        test_determinant_is_multiplicative,
        test_symbolic_determinant_and_inverse,
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
