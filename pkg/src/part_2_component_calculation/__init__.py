"""
Part 2: Component Calculation Package

FORM-style component work: dummy expansion over declared index ranges,
Levi-Civita contraction, ordered ``id`` rules, ``.sort`` normalization of
scalar coefficients, and the epsilon-formula determinant and inverse.
"""

from .component_engine import (
    ComponentEngine,
    IdRule,
    apply_id_rules,
    contract_epsilon,
    determinant,
    expand_dummies,
    inverse,
    levi_civita_sign,
    normalize_components,
)
from .component_scalars import (
    as_rational,
    expression_to_rational,
    polynomial_to_expression,
    rational_to_expression,
    rational_to_terms,
)

__all__ = [
    'ComponentEngine',
    'IdRule',
    'apply_id_rules',
    'contract_epsilon',
    'determinant',
    'expand_dummies',
    'inverse',
    'levi_civita_sign',
    'normalize_components',
    'as_rational',
    'expression_to_rational',
    'polynomial_to_expression',
    'rational_to_expression',
    'rational_to_terms',
]
