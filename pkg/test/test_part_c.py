#!/usr/bin/env python3
"""
Tests for Part C: Maxwell Geometrization and cloak construction
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

from src.part_3_maxwell_geometrization.cloak_analyzer import (
    CloakAnalyzer,
    cylindrical_cloak_metric,
    cylindrical_slice_metric,
    spherical_cloak_metric,
)
from src.part_3_maxwell_geometrization.geometrization_calculator import (
    GeometrizationCalculator,
    Metric4,
    displacement_field,
    field_tensors,
    magnetic_field,
    physical_parameters,
    plebanski_epsilon,
    plebanski_mu,
    sqrt_neg_det,
)
from src.reporting.medium_report_generator import MediumReportGenerator
from src.utils.exceptions import GeometrizationError
from src.utils.polynomial_arithmetic import RationalFunction, equal

a = RationalFunction.symbol("a")
b = RationalFunction.symbol("b")
r = RationalFunction.symbol("r")
s = RationalFunction.symbol("s")
c = b / (b - a)


def diagonal_of(matrix):
    return [matrix[i, i] for i in range(3)]


def off_diagonal_is_zero(matrix) -> bool:
    return all(matrix[i, j].is_zero() for i in range(3) for j in range(3) if i != j)


def random_metric(rng) -> Metric4:
    """g = L^T eta L with L upper triangular, so sqrt(-g) = |det L| is rational."""
    L = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        L[i][i] = Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4)))
    L[0][int(rng.integers(1, 4))] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    L[1][2] = Fraction(int(rng.integers(-2, 3)))
    eta = (1, -1, -1, -1)
    rows = [[sum(eta[k] * L[k][i] * L[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
    return Metric4.from_rows(rows)


def random_vector(rng):
    return [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(3)]


def test_vacuum_fixpoint():
    """Minkowski space is the vacuum: epsilon = mu = identity, D = E, B = H."""
    eta = Metric4.minkowski()
    epsilon = plebanski_epsilon(eta)
    for i in range(3):
        for j in range(3):
            assert epsilon[i, j] == (1 if i == j else 0)
    assert all(w.is_zero() for w in GeometrizationCalculator.magnetoelectric_coupling(eta))
    E = [a, Fraction(2), r]
    H = [b, Fraction(-1, 3), a * r]
    assert list(displacement_field(eta, E, H)) == E
    assert list(magnetic_field(eta, E, H)) == H
    print("✓ Vacuum fixpoint tests passed")


def test_metric_validation():
    with pytest.raises(GeometrizationError):
        Metric4.diagonal((1, -1, -1, 0))
    with pytest.raises(GeometrizationError):
        Metric4.diagonal((0, -1, -1, -1))
    rows = [[1, 2, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    with pytest.raises(GeometrizationError):
        Metric4.from_rows(rows)
    with pytest.raises(GeometrizationError):
        sqrt_neg_det(Metric4.diagonal((1, -2, -1, -1)))
    print("✓ Metric validation tests passed")


def test_slice_metric():
    """diag(1, -b^2/(b-a)^2, -1, -1) gives diag((b-a)/b, b/(b-a), b/(b-a))."""
    metric = cylindrical_slice_metric()
    assert metric[1, 1] == -(b * b) / ((b - a) * (b - a))
    assert sqrt_neg_det(metric) == c
    epsilon = plebanski_epsilon(metric)
    assert off_diagonal_is_zero(epsilon)
    assert diagonal_of(epsilon) == [(b - a) / b, c, c]
    print("✓ Slice metric tests passed")


def test_cylindrical_cloak():
    metric = cylindrical_cloak_metric()
    f = c * (r - a)
    assert metric[2, 2] == -(b * b) * (r - a) * (r - a) / ((b - a) * (b - a))
    assert sqrt_neg_det(metric) == c * f
    epsilon = plebanski_epsilon(metric)
    assert diagonal_of(epsilon) == [f / c, c / f, c * f]

    medium = CloakAnalyzer("cylindrical").physical_medium()
    expected = ((r - a) / r, r / (r - a), c ** 2 * (r - a) / r)
    assert medium.components == ("r", "phi", "z")
    assert all(equal(got, want) for got, want in zip(medium.epsilon, expected))
    assert all(equal(got, want) for got, want in zip(medium.mu, expected))
    print("✓ Cylindrical cloak tests passed")


def test_spherical_cloak():
    metric = spherical_cloak_metric()
    assert sqrt_neg_det(metric) == c * (c * (r - a)) ** 2 * s
    medium = CloakAnalyzer("spherical").physical_medium()
    expected = (((r - a) / r) ** 2 * c, c, c)
    assert medium.components == ("r", "theta", "phi")
    assert all(equal(got, want) for got, want in zip(medium.epsilon, expected))
    assert all(equal(got, want) for got, want in zip(medium.mu, expected))
    print("✓ Spherical cloak tests passed")


def test_epsilon_equals_mu():
    rng = np.random.default_rng(5)
    metrics = [Metric4.minkowski(), cylindrical_slice_metric(), cylindrical_cloak_metric(),
               spherical_cloak_metric()] + [random_metric(rng) for _ in range(5)]
    for metric in metrics:
        epsilon, mu = plebanski_epsilon(metric), plebanski_mu(metric)
        assert all(epsilon[i, j] == mu[i, j] for i in range(3) for j in range(3))
    print("✓ Epsilon = mu tests passed")


def spatial_block_metric() -> Metric4:
    """No time-space terms, an off-diagonal spatial block and sqrt(-g) = 1."""
    return Metric4.from_rows([[1, 0, 0, 0], [0, -1, -1, 0], [0, -1, -2, 0], [0, 0, 0, -1]])


def test_block_diagonal_displacement():
    """Without time-space terms a unit E along axis 1 picks out the first column of epsilon."""
    metric = spatial_block_metric()
    epsilon = plebanski_epsilon(metric)
    assert not off_diagonal_is_zero(epsilon)
    D = displacement_field(metric, [1, 0, 0], [a, b, r])
    assert list(D) == [epsilon[0, 0], epsilon[1, 0], epsilon[2, 0]]
    print("✓ Block-diagonal displacement tests passed")


def test_coupling_sign_flip():
    """With a g_{01} term the coupling of D and B differ only in sign."""
    metric = Metric4.from_rows([[1, Fraction(3, 4), 0, 0], [Fraction(3, 4), Fraction(-7, 16), 0, 0],
                                [0, 0, -1, 0], [0, 0, 0, -1]])
    zero = [0, 0, 0]
    field = [Fraction(0), Fraction(2), Fraction(-1)]
    D = displacement_field(metric, zero, field)
    B = magnetic_field(metric, field, zero)
    assert list(D) == [-x for x in B]
    assert any(not value.is_zero() for value in D)
    print("✓ Coupling sign tests passed")


def test_field_maps_match_tensor_relation():
    """H^{ab} = sqrt(-g) g^{ac} g^{bd} F_{cd} read through the D/H and E/B layouts."""
    rng = np.random.default_rng(2024)
    for _ in range(20):
        metric = random_metric(rng)
        E, H = random_vector(rng), random_vector(rng)
        D = displacement_field(metric, E, H)
        B = magnetic_field(metric, E, H)
        tensors = field_tensors(E, B, H, D)
        excitation = GeometrizationCalculator.excitation_tensor(metric, tensors.F_lower)
        for i in range(4):
            for j in range(4):
                assert excitation[i, j] == tensors.H_upper[i, j], (i, j)
    print("✓ Field map oracle tests passed")


def test_physical_parameters_need_diagonal_medium():
    epsilon = plebanski_epsilon(spatial_block_metric())
    with pytest.raises(GeometrizationError):
        physical_parameters(epsilon, (1, 1, 1))
    print("✓ Physical parameter validation tests passed")


def test_sampling_and_positivity():
    result = CloakAnalyzer("cylindrical", 1, 3).analyze_cloak({"r": 2})
    assert result['sample'] == {
        'epsilon_r': Fraction(1, 2), 'mu_r': Fraction(1, 2),
        'epsilon_phi': Fraction(2), 'mu_phi': Fraction(2),
        'epsilon_z': Fraction(9, 8), 'mu_z': Fraction(9, 8),
    }
    assert result['positive']
    spherical = CloakAnalyzer("spherical", 1, 3).analyze_cloak({"r": 2})
    assert spherical['sample']['epsilon_r'] == Fraction(3, 8)
    assert spherical['sample']['mu_theta'] == Fraction(3, 2)
    assert spherical['positive']
    print("✓ Sampling and positivity tests passed")


def test_sampled_parameters_match_closed_forms():
    """Sampled media agree with the closed-form cloak profiles at several shells."""
    r_, a_, b_ = sympy.symbols("r a b", positive=True)
    scale = b_ / (b_ - a_)
    closed_forms = {
        "cylindrical": {"epsilon_r": (r_ - a_) / r_, "epsilon_phi": r_ / (r_ - a_),
                        "epsilon_z": scale ** 2 * (r_ - a_) / r_},
        "spherical": {"epsilon_r": scale * (r_ - a_) ** 2 / r_ ** 2, "epsilon_theta": scale,
                      "epsilon_phi": scale},
    }
    for a_value, b_value, r_value in ((1, 3, 2), (1, 4, 2), (2, 5, 3)):
        point = {a_: a_value, b_: b_value, r_: r_value}
        for geometry, forms in closed_forms.items():
            result = CloakAnalyzer(geometry, a_value, b_value).analyze_cloak({"r": r_value})
            for name, formula in forms.items():
                value = sympy.Rational(formula.subs(point))
                expected = Fraction(int(value.p), int(value.q))
                assert result['sample'][name] == expected
                assert result['sample'][name.replace("epsilon", "mu")] == expected
            assert result['positive']
    print("✓ Closed-form sampling tests passed")


def test_shell_validation():
    with pytest.raises(GeometrizationError):
        CloakAnalyzer("cylindrical", 3, 1).build_metric()
    with pytest.raises(GeometrizationError):
        CloakAnalyzer("spherical", 2, 2).build_metric()
    with pytest.raises(GeometrizationError):
        CloakAnalyzer("cylindrical", "a", "a").build_metric()
    with pytest.raises(GeometrizationError):
        CloakAnalyzer("toroidal")
    print("✓ Shell validation tests passed")


def test_medium_report():
    generator = MediumReportGenerator()
    result = CloakAnalyzer("cylindrical", 1, 3).analyze_cloak({"r": 2})
    table = generator.build_parameter_table([result])
    assert len(table) == 6
    assert list(table['component']) == ['epsilon_r', 'mu_r', 'epsilon_phi', 'mu_phi', 'epsilon_z', 'mu_z']

    csv = generator.to_csv(table)
    assert csv.splitlines()[0] == "geometry,component,expression,value-at-sample"
    assert "cylindrical,epsilon_r," in csv
    assert csv.splitlines()[1].endswith(",1/2")

    latex = generator.to_latex(table)
    assert latex.startswith("\\begin{tabular}{lll}")
    assert "\\varepsilon_{\\varphi}" in latex
    assert "epsilon_z" in generator.to_text(table)

    symbolic = generator.build_parameter_table([CloakAnalyzer("spherical").analyze_cloak()])
    assert "\\begin{tabular}{ll}" in generator.to_latex(symbolic)
    assert set(symbolic['value-at-sample']) == {''}
    print("✓ Medium report tests passed")


def main():
    """Run all Part C tests."""
    print("=" * 60)
    print("PART C TESTS - MAXWELL GEOMETRIZATION")
    print("=" * 60)

    tests = [
        test_vacuum_fixpoint,
        test_metric_validation,
        test_slice_metric,
        test_cylindrical_cloak,
        test_spherical_cloak,
        test_epsilon_equals_mu,
        test_block_diagonal_displacement,
        test_coupling_sign_flip,
        test_field_maps_match_tensor_relation,
        test_physical_parameters_need_diagonal_medium,
        test_sampling_and_positivity,
        test_sampled_parameters_match_closed_forms,
        test_shell_validation,
        test_medium_report,
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
