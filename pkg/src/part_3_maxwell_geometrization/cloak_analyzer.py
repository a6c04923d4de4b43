"""
Invisibility cloaks built from coordinate maps (Part 3).

The radial map r' = b (r - a) / (b - a) squeezes the ball r' <= b into the
shell a <= r <= b. Pulling the flat metric back through it and feeding the
result to the Plebanski map gives the medium that realizes the cloak.
"""

from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from ..part_2_component_calculation.component_scalars import as_rational
from ..utils.exceptions import GeometrizationError, ZeroDenominatorError
from ..utils.polynomial_arithmetic import RationalFunction, eval_numeric
from .geometrization_calculator import (
    DiagonalMedium,
    GeometrizationCalculator,
    Metric4,
    physical_parameters,
    sqrt_neg_det,
)

RADIUS = "r"
SIN_THETA = "s"

GEOMETRIES = {
    "cylindrical": {"coordinates": ("t", "r", "phi", "z"), "components": ("r", "phi", "z")},
    "spherical": {"coordinates": ("t", "r", "theta", "phi"), "components": ("r", "theta", "phi")},
}


def _check_shell(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    """Scale factor c = b/(b - a) of the radial map."""
    if a.is_constant() and b.is_constant():
        if not 0 <= a.constant_value() < b.constant_value():
            raise GeometrizationError(f"cloak needs 0 <= a < b, got a={a}, b={b}")
    try:
        return b / (b - a)
    except ZeroDenominatorError as exc:
        raise GeometrizationError("cloak needs a < b, got a = b") from exc


def _radial_parts(a, b) -> Tuple[RationalFunction, RationalFunction]:
    a, b = as_rational(a), as_rational(b)
    scale = _check_shell(a, b)
    mapped_radius = scale * (RationalFunction.symbol(RADIUS) - a)
    return scale, mapped_radius


def cylindrical_cloak_metric(a="a", b="b") -> Metric4:
    """Pull-back of diag(1, -1, -r'^2, -1) through the radial map."""
    scale, mapped_radius = _radial_parts(a, b)
    return Metric4.diagonal((1, -scale ** 2, -mapped_radius ** 2, -1), GEOMETRIES["cylindrical"]["coordinates"])


def spherical_cloak_metric(a="a", b="b") -> Metric4:
    """Pull-back of diag(1, -1, -r'^2, -r'^2 sin^2) with ``s`` standing for sin(theta)."""
    scale, mapped_radius = _radial_parts(a, b)
    sin_theta = RationalFunction.symbol(SIN_THETA)
    return Metric4.diagonal((1, -scale ** 2, -mapped_radius ** 2, -(mapped_radius * sin_theta) ** 2),
                            GEOMETRIES["spherical"]["coordinates"])


def cylindrical_slice_metric(a="a", b="b") -> Metric4:
    """diag(1, -b^2/(b-a)^2, -1, -1), the radial slice used by the determinant script."""
    scale, _ = _radial_parts(a, b)
    return Metric4.diagonal((1, -scale ** 2, -1, -1), GEOMETRIES["cylindrical"]["coordinates"])


def background_metric(geometry: str) -> Tuple[RationalFunction, RationalFunction, RationalFunction]:
    """Diagonal of the flat spatial metric in the cloak coordinates."""
    radius = RationalFunction.symbol(RADIUS)
    if geometry == "cylindrical":
        return (RationalFunction.constant(1), radius ** 2, RationalFunction.constant(1))
    if geometry == "spherical":
        return (RationalFunction.constant(1), radius ** 2, (radius * RationalFunction.symbol(SIN_THETA)) ** 2)
    raise GeometrizationError(f"unknown geometry '{geometry}'")


class CloakAnalyzer:
    """Main class for cloak construction and analysis (Part 3)."""

    METRICS = {"cylindrical": cylindrical_cloak_metric, "spherical": spherical_cloak_metric}

    def __init__(self, geometry: str, a="a", b="b"):
        """
        Initialize the analyzer for one geometry.

        Args:
            geometry: 'cylindrical' or 'spherical'
            a: inner radius (symbol name, integer, Fraction or RationalFunction)
            b: outer radius
        """
        if geometry not in self.METRICS:
            raise GeometrizationError(f"unknown geometry '{geometry}', expected one of {sorted(self.METRICS)}")
        self.geometry = geometry
        self.a = as_rational(a)
        self.b = as_rational(b)
        self.metric: Optional[Metric4] = None
        self.medium: Optional[DiagonalMedium] = None

    def build_metric(self) -> Metric4:
        self.metric = self.METRICS[self.geometry](self.a, self.b)
        return self.metric

    def physical_medium(self) -> DiagonalMedium:
        metric = self.metric or self.build_metric()
        parameters = GeometrizationCalculator.medium_parameters(metric)
        self.medium = physical_parameters(parameters.epsilon, background_metric(self.geometry), self.geometry,
                                          GEOMETRIES[self.geometry]["components"], parameters.mu)
        return self.medium

    def sample(self, bindings: Mapping[str, Fraction]) -> Dict[str, Fraction]:
        """Exact parameter values at a point, e.g. {'a': 1, 'b': 3, 'r': 2}."""
        medium = self.medium or self.physical_medium()
        return {name: eval_numeric(value, bindings) for name, value in medium.as_dict().items()}

    def check_positivity(self, a_value=1, b_value=3, points: int = 10) -> bool:
        """Every parameter is strictly positive at ``points`` radii inside the shell."""
        a_value = self.a.constant_value() if self.a.is_constant() else Fraction(a_value)
        b_value = self.b.constant_value() if self.b.is_constant() else Fraction(b_value)
        for k in range(1, points + 1):
            radius = a_value + (b_value - a_value) * Fraction(k, points + 1)
            values = self.sample({"a": a_value, "b": b_value, RADIUS: radius, SIN_THETA: Fraction(1, 2)})
            if any(value <= 0 for value in values.values()):
                return False
        return True

    def analyze_cloak(self, sample: Optional[Mapping[str, Fraction]] = None) -> Dict:
        """
        Run the whole pipeline.

        Args:
            sample: optional point at which the parameters are evaluated

        Returns:
            Dictionary with metric, sqrt(-g), epsilon, mu, physical medium,
            sampled values and the positivity check
        """
        metric = self.build_metric()
        parameters = GeometrizationCalculator.medium_parameters(metric)
        medium = self.physical_medium()
        sampled = None
        if sample:
            bindings = {"a": self.a, "b": self.b}
            bindings = {k: v.constant_value() for k, v in bindings.items() if v.is_constant()}
            bindings.update({k: Fraction(v) for k, v in sample.items()})
            sampled = self.sample(bindings)
        return {
            'geometry': self.geometry,
            'metric': metric,
            'sqrt_neg_det': sqrt_neg_det(metric),
            'epsilon': parameters.epsilon,
            'mu': parameters.mu,
            'magnetoelectric': parameters.magnetoelectric,
            'medium': medium,
            'sample': sampled,
            'positive': self.check_positivity(),
        }


def analyze_cloak(geometry: str, a="a", b="b", sample: Optional[Mapping[str, Fraction]] = None) -> Dict:
    return CloakAnalyzer(geometry, a, b).analyze_cloak(sample)
