"""
Part 3: Maxwell Geometrization Package

The Plebanski map from a space-time metric to medium parameters, the field
tensor layouts, and the cylindrical and spherical invisibility cloaks.
"""

from .cloak_analyzer import (
    CloakAnalyzer,
    analyze_cloak,
    background_metric,
    cylindrical_cloak_metric,
    cylindrical_slice_metric,
    spherical_cloak_metric,
)
from .geometrization_calculator import (
    DiagonalMedium,
    FieldTensors,
    GeometrizationCalculator,
    MediumParameters,
    Metric4,
    displacement_field,
    field_tensors,
    magnetic_field,
    medium_parameters,
    physical_parameters,
    plebanski_epsilon,
    plebanski_mu,
    sqrt_neg_det,
)

__all__ = [
    'CloakAnalyzer',
    'analyze_cloak',
    'background_metric',
    'cylindrical_cloak_metric',
    'cylindrical_slice_metric',
    'spherical_cloak_metric',
    'DiagonalMedium',
    'FieldTensors',
    'GeometrizationCalculator',
    'MediumParameters',
    'Metric4',
    'displacement_field',
    'field_tensors',
    'magnetic_field',
    'medium_parameters',
    'physical_parameters',
    'plebanski_epsilon',
    'plebanski_mu',
    'sqrt_neg_det',
]
