"""
Part 1: Abstract Tensor Algebra Package

Cadabra-style work on tensors with abstract indices: the expression tree,
declarations, parsing, rendering, canonicalization and rule substitution.
"""

from .tensor_canonicalizer import TensorCanonicalizer, canonicalize, collect_terms, permutation_sign
from .tensor_context import (
    Context,
    DerivativeKind,
    IndexFamily,
    SymmetryDecl,
    SymmetryGroup,
    SymmetryKind,
    declare,
    declare_indices,
    declare_symbols,
    declare_tensor,
)
from .tensor_expression import (
    Derivative,
    Equation,
    Expression,
    Index,
    Number,
    Power,
    Product,
    SqrtNegDet,
    Sum,
    Symbol,
    Tensor,
    Variance,
    free_indices,
)
from .tensor_expression_parser import TensorExpressionParser, parse
from .tensor_expression_renderer import RenderOptions, render, render_latex, render_listing, render_plain
from .tensor_rewriter import Rule, TensorRewriter, distribute, match, substitute

__all__ = [
    'TensorCanonicalizer',
    'canonicalize',
    'collect_terms',
    'permutation_sign',
    'Context',
    'DerivativeKind',
    'IndexFamily',
    'SymmetryDecl',
    'SymmetryGroup',
    'SymmetryKind',
    'declare',
    'declare_indices',
    'declare_symbols',
    'declare_tensor',
    'Derivative',
    'Equation',
    'Expression',
    'Index',
    'Number',
    'Power',
    'Product',
    'SqrtNegDet',
    'Sum',
    'Symbol',
    'Tensor',
    'Variance',
    'free_indices',
    'TensorExpressionParser',
    'parse',
    'RenderOptions',
    'render',
    'render_latex',
    'render_listing',
    'render_plain',
    'Rule',
    'TensorRewriter',
    'distribute',
    'match',
    'substitute',
]
