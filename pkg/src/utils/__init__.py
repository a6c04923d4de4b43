"""
Utilities Package

Shared error hierarchy and the exact multivariate polynomial / rational
function arithmetic used by the component and geometrization modules.
"""

from .exceptions import (
    ComponentError,
    DeclarationError,
    EvaluationError,
    GeometrizationError,
    ParseError,
    RewriteError,
    TcasError,
)
from .polynomial_arithmetic import Polynomial, RationalFunction, equal, eval_numeric, gcd, normalize, sqrt

__all__ = [
    'ComponentError',
    'DeclarationError',
    'EvaluationError',
    'GeometrizationError',
    'ParseError',
    'RewriteError',
    'TcasError',
    'Polynomial',
    'RationalFunction',
    'equal',
    'eval_numeric',
    'gcd',
    'normalize',
    'sqrt',
]
