"""
Geometrization of Maxwell's equations: the Plebanski map from a 4-metric to
the permittivity, permeability and magnetoelectric coupling of a medium.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..part_2_component_calculation.component_engine import determinant, inverse, levi_civita_sign
from ..part_2_component_calculation.component_scalars import as_rational
from ..utils.exceptions import GeometrizationError, NotASquareError
from ..utils.polynomial_arithmetic import RationalFunction, normalize, sqrt

Row = Tuple[RationalFunction, ...]
Vector3 = Tuple[RationalFunction, RationalFunction, RationalFunction]

SPATIAL = (1, 2, 3)


def _zero() -> RationalFunction:
    return RationalFunction.constant(0)


def _vector(values: Sequence) -> Vector3:
    if len(values) != 3:
        raise GeometrizationError(f"expected a 3-vector, got {len(values)} components")
    return tuple(as_rational(v) for v in values)


def spatial_epsilon(i: int, j: int, k: int) -> int:
    """Permutation symbol on spatial values 1..3."""
    return levi_civita_sign((i, j, k))


@dataclass(frozen=True)
class Metric4:
    """Symmetric 4x4 metric with coordinates (0, 1, 2, 3)."""

    entries: Tuple[Row, Row, Row, Row]
    coordinate_names: Tuple[str, str, str, str] = ("t", "x", "y", "z")

    def __post_init__(self):
        if len(self.entries) != 4 or any(len(row) != 4 for row in self.entries):
            raise GeometrizationError("a metric needs 4x4 entries")
        entries = tuple(tuple(as_rational(v) for v in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        for i in range(4):
            for j in range(i + 1, 4):
                if entries[i][j] != entries[j][i]:
                    raise GeometrizationError(f"metric is not symmetric at ({i},{j})")
        if entries[0][0].is_zero():
            raise GeometrizationError("g00 vanishes")
        if self.determinant().is_zero():
            raise GeometrizationError("metric is singular")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], coordinate_names=("t", "x", "y", "z")) -> "Metric4":
        return cls(tuple(tuple(row) for row in rows), tuple(coordinate_names))

    @classmethod
    def diagonal(cls, values: Sequence, coordinate_names=("t", "x", "y", "z")) -> "Metric4":
        rows = [[values[i] if i == j else 0 for j in range(4)] for i in range(4)]
        return cls.from_rows(rows, coordinate_names)

    @classmethod
    def minkowski(cls) -> "Metric4":
        return cls.diagonal((1, -1, -1, -1))

    @property
    def matrix(self) -> np.ndarray:
        array = np.empty((4, 4), dtype=object)
        for i in range(4):
            for j in range(4):
                array[i, j] = self.entries[i][j]
        return array

    def __getitem__(self, key: Tuple[int, int]) -> RationalFunction:
        i, j = key
        return self.entries[i][j]

    def determinant(self) -> RationalFunction:
        return determinant(self.entries)

    def inverse(self) -> np.ndarray:
        return inverse(self.entries)

    def is_diagonal(self) -> bool:
        return all(self.entries[i][j].is_zero() for i in range(4) for j in range(4) if i != j)


@dataclass(frozen=True)
class FieldTensors:
    """F_{ab} (E, B layout) and H^{ab} (D, H layout) as 4x4 object arrays."""

    F_lower: np.ndarray
    H_upper: np.ndarray


@dataclass(frozen=True)
class MediumParameters:
    """Geometrized epsilon^{ij}, mu^{ij} (spatial 3x3) and the g_{j0}/g00 coupling vector."""

    epsilon: np.ndarray
    mu: np.ndarray
    magnetoelectric: Vector3


@dataclass(frozen=True)
class DiagonalMedium:
    """Physical parameters in the orthonormal frame of the background coordinates."""

    geometry: str
    components: Tuple[str, str, str]
    epsilon: Vector3
    mu: Vector3

    def as_dict(self):
        result = {}
        for name, eps, mu in zip(self.components, self.epsilon, self.mu):
            result[f"epsilon_{name}"] = eps
            result[f"mu_{name}"] = mu
        return result


def field_tensors(E: Sequence, B: Sequence, H: Sequence, D: Sequence) -> FieldTensors:
    """
    Place field components into the antisymmetric layouts.

    F_{0i} = E_i, F_{ij} = -e_{ijk} B^k, H^{0i} = -D^i, H^{ij} = -e^{ijk} H_k.

    Args:
        E: electric field E_i
        B: magnetic induction B^i
        H: magnetic field H_i
        D: electric displacement D^i

    Returns:
        FieldTensors with both 4x4 matrices
    """
    E, B, H, D = (_vector(v) for v in (E, B, H, D))
    F = np.full((4, 4), None, dtype=object)
    Hu = np.full((4, 4), None, dtype=object)
    for a in range(4):
        for b in range(4):
            F[a, b] = _zero()
            Hu[a, b] = _zero()
    for i in SPATIAL:
        F[0, i], F[i, 0] = E[i - 1], -E[i - 1]
        Hu[0, i], Hu[i, 0] = -D[i - 1], D[i - 1]
        for j in SPATIAL:
            for k in SPATIAL:
                sign = spatial_epsilon(i, j, k)
                if sign:
                    F[i, j] = F[i, j] - B[k - 1] * sign
                    Hu[i, j] = Hu[i, j] - H[k - 1] * sign
    return FieldTensors(F, Hu)


def sqrt_neg_det(metric: Metric4) -> RationalFunction:
    """Exact square root of -det(g)."""
    try:
        return sqrt(-metric.determinant())
    except NotASquareError as exc:
        raise GeometrizationError(f"sqrt(-g) is not a rational function: -g = {-metric.determinant()}") from exc


class GeometrizationCalculator:
    """Plebanski constitutive map of a metric."""

    @staticmethod
    def plebanski_epsilon(metric: Metric4) -> np.ndarray:
        """
        Geometrized permittivity epsilon^{ij} = -(sqrt(-g)/g00) g^{ij}.

        Args:
            metric: space-time metric

        Returns:
            3x3 object array of normalized rational functions
        """
        factor = -sqrt_neg_det(metric) / metric[0, 0]
        upper = metric.inverse()
        result = np.empty((3, 3), dtype=object)
        for i in SPATIAL:
            for j in SPATIAL:
                result[i - 1, j - 1] = normalize(factor * upper[i, j])
        return result

    @staticmethod
    def plebanski_mu(metric: Metric4) -> np.ndarray:
        """Geometrized permeability; the same expression as the permittivity."""
        return GeometrizationCalculator.plebanski_epsilon(metric)

    @staticmethod
    def magnetoelectric_coupling(metric: Metric4) -> Vector3:
        """Coupling vector w_j = g_{j0}/g00."""
        return tuple(normalize(metric[j, 0] / metric[0, 0]) for j in SPATIAL)

    @staticmethod
    def medium_parameters(metric: Metric4) -> MediumParameters:
        epsilon = GeometrizationCalculator.plebanski_epsilon(metric)
        return MediumParameters(epsilon, epsilon.copy(), GeometrizationCalculator.magnetoelectric_coupling(metric))

    @staticmethod
    def _constitutive(metric: Metric4, primary: Sequence, secondary: Sequence, coupling_sign: int) -> Vector3:
        primary, secondary = _vector(primary), _vector(secondary)
        epsilon = GeometrizationCalculator.plebanski_epsilon(metric)
        coupling = GeometrizationCalculator.magnetoelectric_coupling(metric)
        result = []
        for i in SPATIAL:
            value = _zero()
            for j in SPATIAL:
                value = value + epsilon[i - 1, j - 1] * primary[j - 1]
                for k in SPATIAL:
                    sign = spatial_epsilon(i, j, k)
                    if sign and not coupling[j - 1].is_zero():
                        value = value + coupling[j - 1] * secondary[k - 1] * (sign * coupling_sign)
            result.append(normalize(value))
        return tuple(result)

    @staticmethod
    def displacement_field(metric: Metric4, E: Sequence, H: Sequence) -> Vector3:
        """D^i = epsilon^{ij} E_j + e^{ijk} (g_{j0}/g00) H_k."""
        return GeometrizationCalculator._constitutive(metric, E, H, 1)

    @staticmethod
    def magnetic_field(metric: Metric4, E: Sequence, H: Sequence) -> Vector3:
        """B^i = mu^{ij} H_j - e^{ijk} (g_{j0}/g00) E_k."""
        return GeometrizationCalculator._constitutive(metric, H, E, -1)

    @staticmethod
    def excitation_tensor(metric: Metric4, F_lower: np.ndarray) -> np.ndarray:
        """H^{ab} = sqrt(-g) g^{ac} g^{bd} F_{cd}, component by component."""
        root = sqrt_neg_det(metric)
        upper = metric.inverse()
        result = np.empty((4, 4), dtype=object)
        for a in range(4):
            for b in range(4):
                value = _zero()
                for c in range(4):
                    if upper[a, c].is_zero():
                        continue
                    for d in range(4):
                        if upper[b, d].is_zero() or F_lower[c, d].is_zero():
                            continue
                        value = value + upper[a, c] * upper[b, d] * F_lower[c, d]
                result[a, b] = normalize(root * value)
        return result


def plebanski_epsilon(metric: Metric4) -> np.ndarray:
    return GeometrizationCalculator.plebanski_epsilon(metric)


def plebanski_mu(metric: Metric4) -> np.ndarray:
    return GeometrizationCalculator.plebanski_mu(metric)


def medium_parameters(metric: Metric4) -> MediumParameters:
    return GeometrizationCalculator.medium_parameters(metric)


def displacement_field(metric: Metric4, E: Sequence, H: Sequence) -> Vector3:
    return GeometrizationCalculator.displacement_field(metric, E, H)


def magnetic_field(metric: Metric4, E: Sequence, H: Sequence) -> Vector3:
    return GeometrizationCalculator.magnetic_field(metric, E, H)


def physical_parameters(epsilon: np.ndarray, background: Sequence, geometry: str = "custom",
                        components: Tuple[str, str, str] = ("1", "2", "3"),
                        mu: Optional[np.ndarray] = None) -> DiagonalMedium:
    """
    Orthonormal-frame parameters: eps^{ii} gamma_ii / sqrt(det gamma).

    Args:
        epsilon: geometrized 3x3 permittivity
        background: diagonal entries of the flat spatial metric gamma (or a 3x3 matrix)
        geometry: label carried into the result
        components: component labels, e.g. ("r", "phi", "z")
        mu: geometrized permeability, defaults to ``epsilon``

    Returns:
        DiagonalMedium
    """
    gamma = _background_diagonal(background)
    mu = epsilon if mu is None else mu
    for matrix in (epsilon, mu):
        for i in range(3):
            for j in range(3):
                if i != j and not as_rational(matrix[i][j]).is_zero():
                    raise GeometrizationError(f"physical parameters need a diagonal medium, entry ({i + 1},{j + 1}) "
                                              f"is {matrix[i][j]}")
    try:
        volume = sqrt(gamma[0] * gamma[1] * gamma[2])
    except NotASquareError as exc:
        raise GeometrizationError("sqrt(det gamma) is not a rational function") from exc
    eps_values = tuple(normalize(as_rational(epsilon[i][i]) * gamma[i] / volume) for i in range(3))
    mu_values = tuple(normalize(as_rational(mu[i][i]) * gamma[i] / volume) for i in range(3))
    return DiagonalMedium(geometry, tuple(components), eps_values, mu_values)


def _background_diagonal(background: Sequence) -> Vector3:
    if len(background) == 3 and all(isinstance(row, (list, tuple, np.ndarray)) for row in background):
        for i in range(3):
            for j in range(3):
                if i != j and not as_rational(background[i][j]).is_zero():
                    raise GeometrizationError("background spatial metric must be diagonal")
        return tuple(as_rational(background[i][i]) for i in range(3))
    return _vector(background)
