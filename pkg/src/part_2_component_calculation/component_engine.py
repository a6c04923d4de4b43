"""
Component (FORM-style) engine: dummy expansion over index ranges,
Levi-Civita contraction, ordered ``id`` rules, ``.sort`` normalization and
the determinant through the Levi-Civita formula.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..part_1_abstract_tensor_algebra.tensor_canonicalizer import TensorCanonicalizer, permutation_sign
from ..part_1_abstract_tensor_algebra.tensor_context import EPSILON_HEADS, Context, declare_indices
from ..part_1_abstract_tensor_algebra.tensor_expression import (
    Derivative,
    Equation,
    Expression,
    Index,
    Number,
    Power,
    Sum,
    Tensor,
    dummy_names,
    iter_nodes,
    make_product,
    make_sum,
    make_term,
    map_indices,
    split_term,
    terms_of,
)
from ..part_1_abstract_tensor_algebra.tensor_rewriter import distribute
from ..utils.exceptions import ComponentError
from ..utils.polynomial_arithmetic import RationalFunction
from .component_scalars import expression_to_rational, rational_to_terms

KRONECKER_HEAD = "d_"


def levi_civita_sign(values: Sequence[int]) -> int:
    """Sign of the permutation ``values`` of 0..n-1 (or its shifted range); 0 on repeats."""
    if len(set(values)) != len(values):
        return 0
    return permutation_sign(list(values))


def is_epsilon(factor: Expression) -> bool:
    return isinstance(factor, Tensor) and factor.head in EPSILON_HEADS


def _concrete_values(tensor: Tensor) -> Optional[List[int]]:
    if all(i.is_concrete for i in tensor.indices):
        return [i.value for i in tensor.indices]
    return None


def _assign(expr: Expression, values: Dict[str, int]) -> Expression:
    return map_indices(expr, lambda i: i.with_value(values[i.name]) if i.is_abstract and i.name in values else i)


def _evaluate_epsilons(factors: Sequence[Expression], dimension: int) -> Tuple[int, List[Expression]]:
    """Replace fully concrete epsilons by their sign."""
    sign = 1
    remaining: List[Expression] = []
    for factor in factors:
        if is_epsilon(factor):
            values = _concrete_values(factor)
            if values is not None:
                if len(values) != dimension and dimension:
                    raise ComponentError(f"epsilon of arity {len(values)} in dimension {dimension}")
                sign *= levi_civita_sign(values)
                if sign == 0:
                    return 0, []
                continue
        remaining.append(factor)
    return sign, remaining


class ComponentEngine:
    """FORM-style operations bound to one Context."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.canonicalizer = TensorCanonicalizer(ctx)

    # dummy expansion

    def _assignments(self, factors: Sequence[Expression], dummies: List[str]) -> Iterator[Dict[str, int]]:
        ranges = [self.ctx.index_range(Index(name)) for name in dummies]
        epsilons = [f for f in factors if is_epsilon(f)]

        def clashes(values: Dict[str, int]) -> bool:
            for epsilon in epsilons:
                seen = set()
                for index in epsilon.indices:
                    value = index.value if index.is_concrete else values.get(index.name)
                    if value is None:
                        continue
                    if value in seen:
                        return True
                    seen.add(value)
            return False

        def search(position: int, values: Dict[str, int]):
            if position == len(dummies):
                yield dict(values)
                return
            for value in ranges[position]:
                values[dummies[position]] = value
                if not clashes(values):
                    yield from search(position + 1, values)
                del values[dummies[position]]

        yield from search(0, {})

    def expand_dummies(self, expr: Expression) -> Expression:
        """Sum every dummy index over its range; concrete epsilons become signs."""
        if isinstance(expr, Equation):
            return Equation(self.expand_dummies(expr.lhs), self.expand_dummies(expr.rhs))
        results: List[Expression] = []
        for term in terms_of(distribute(expr, self.ctx)):
            coefficient, factors = split_term(term)
            dummies = dummy_names(term)
            # inner scopes first, so an outer dummy never reaches an inner one of the same name
            factors = [self._expand_inner(f) for f in factors]
            for values in self._assignments(factors, dummies):
                assigned = [_assign(f, values) for f in factors]
                sign, remaining = _evaluate_epsilons(assigned, self.ctx.dimension)
                if sign:
                    results.append(make_term(coefficient * sign, self.canonicalizer.sort_factors(remaining)))
        return self.canonicalizer.collect_terms(make_sum(results))

    def _expand_inner(self, factor: Expression) -> Expression:
        if isinstance(factor, Derivative):
            return Derivative(factor.operator, factor.index, self.expand_dummies(factor.argument))
        if isinstance(factor, Sum):
            return self.expand_dummies(factor)
        if isinstance(factor, Power):
            return Power(self._expand_inner(factor.base), factor.exponent)
        return factor

    # epsilon contraction

    def _kronecker_expansion(self, upper: Tensor, lower: Tensor) -> List[Tuple[int, List[Expression]]]:
        pairs = []
        for permutation in itertools.permutations(range(len(lower.indices))):
            deltas = [Tensor(KRONECKER_HEAD, (upper.indices[k], lower.indices[p]), "call")
                      for k, p in enumerate(permutation)]
            pairs.append((permutation_sign(permutation), deltas))
        return pairs

    def _resolve_deltas(self, factors: List[Expression]) -> Optional[List[Expression]]:
        """Eliminate Kronecker deltas; None when one of them vanishes."""
        factors = list(factors)
        changed = True
        while changed:
            changed = False
            for position, factor in enumerate(factors):
                if not (isinstance(factor, Tensor) and factor.head == KRONECKER_HEAD):
                    continue
                first, second = factor.indices
                if first.is_concrete and second.is_concrete:
                    if first.value != second.value:
                        return None
                    del factors[position]
                    changed = True
                    break
                if first.is_abstract and second.is_abstract and first.name == second.name:
                    # trace
                    del factors[position]
                    factors.append(Number(len(self.ctx.index_range(first))))
                    changed = True
                    break
                others = factors[:position] + factors[position + 1:]
                names = dummy_names(make_product(factors))
                if first.is_abstract and first.name in names:
                    source, target = first, second
                elif second.is_abstract and second.name in names:
                    source, target = second, first
                else:
                    continue
                if target.is_concrete:
                    factors = [_assign(f, {source.name: target.value}) for f in others]
                else:
                    factors = [map_indices(f, lambda i, s=source, t=target: i.with_name(t.name)
                                           if i.is_abstract and i.name == s.name else i) for f in others]
                changed = True
                break
        return factors

    def contract_epsilon(self, expr: Expression) -> Expression:
        """Replace epsilon pairs by Kronecker-delta expansions and resolve the deltas."""
        if isinstance(expr, Equation):
            return Equation(self.contract_epsilon(expr.lhs), self.contract_epsilon(expr.rhs))
        results: List[Expression] = []
        for term in terms_of(distribute(expr, self.ctx)):
            coefficient, factors = split_term(term)
            epsilons = [k for k, f in enumerate(factors) if is_epsilon(f)]
            if len(epsilons) < 2:
                sign, factors = _evaluate_epsilons(factors, self.ctx.dimension)
                if sign:
                    results.append(make_term(coefficient * sign, factors))
                continue
            first, second = factors[epsilons[0]], factors[epsilons[1]]
            rest = [f for k, f in enumerate(factors) if k not in epsilons[:2]]
            for permutation_sign_value, deltas in self._kronecker_expansion(first, second):
                resolved = self._resolve_deltas(deltas + rest)
                if resolved is None:
                    continue
                inner_sign, resolved = _evaluate_epsilons(resolved, self.ctx.dimension)
                if inner_sign:
                    results.append(make_term(coefficient * permutation_sign_value * inner_sign,
                                             self.canonicalizer.sort_factors(resolved)))
        return self.canonicalizer.collect_terms(make_sum(results))

    # id rules

    def apply_id_rules(self, expr: Expression, rules: Sequence["IdRule"]) -> Expression:
        """First matching rule fires for each tensor occurrence; scalars are renormalized."""
        if isinstance(expr, Equation):
            return Equation(self.apply_id_rules(expr.lhs, rules), self.apply_id_rules(expr.rhs, rules))
        results: List[Expression] = []
        for term in terms_of(expr):
            coefficient, factors = split_term(term)
            replaced: List[Expression] = []
            for factor in factors:
                replacement = None
                if isinstance(factor, Tensor):
                    for rule in rules:
                        replacement = rule.apply(factor)
                        if replacement is not None:
                            break
                replaced.append(factor if replacement is None else replacement)
            results.append(make_term(coefficient, replaced))
        return self.normalize_components(make_sum(results))

    # .sort

    def normalize_components(self, expr: Expression) -> Expression:
        """Merge scalar coefficients of terms with equal tensor factors as rational functions."""
        if isinstance(expr, Equation):
            return Equation(self.normalize_components(expr.lhs), self.normalize_components(expr.rhs))
        groups: Dict[Tuple[Expression, ...], RationalFunction] = {}
        for term in terms_of(distribute(expr, self.ctx)):
            coefficient, factors = split_term(term)
            tensors = self.canonicalizer.sort_factors(f for f in factors if _contains_tensor(f))
            scalar = expression_to_rational(make_term(coefficient, [f for f in factors if not _contains_tensor(f)]))
            groups[tensors] = groups.get(tensors, RationalFunction.constant(0)) + scalar
        ordered = sorted(groups.items(), key=lambda item: self.canonicalizer.term_key(item[0]))
        terms: List[Expression] = []
        for tensors, scalar in ordered:
            for scalar_term in rational_to_terms(scalar):
                terms.append(make_product([scalar_term, *tensors]))
        return make_sum(terms)


def _contains_tensor(expr: Expression) -> bool:
    return any(isinstance(node, Tensor) for node in iter_nodes(expr))


@dataclass(frozen=True)
class IdRule:
    """``id lhs = rhs`` with concrete values and ``i?`` wildcards in ``lhs``."""

    lhs: Tensor
    rhs: Expression

    def __post_init__(self):
        if not isinstance(self.lhs, Tensor):
            raise ComponentError("id rule left-hand side must be a single tensor")
        wildcards = {i.name for i in self.lhs.indices if i.wildcard}
        for node_index in _indices_in(self.rhs):
            if node_index.wildcard and node_index.name not in wildcards:
                raise ComponentError(f"wildcard {node_index.name}? appears only on the right-hand side")

    def bind(self, tensor: Tensor) -> Optional[Dict[str, int]]:
        if tensor.head != self.lhs.head or len(tensor.indices) != len(self.lhs.indices):
            return None
        values: Dict[str, int] = {}
        for pattern, target in zip(self.lhs.indices, tensor.indices):
            if not target.is_concrete:
                return None
            if pattern.wildcard:
                if values.setdefault(pattern.name, target.value) != target.value:
                    return None
            elif pattern.is_concrete:
                if pattern.value != target.value:
                    return None
            else:
                return None
        return values

    def apply(self, tensor: Tensor) -> Optional[Expression]:
        values = self.bind(tensor)
        if values is None:
            return None
        return map_indices(self.rhs, lambda i: i.with_value(values[i.name])
                           if i.wildcard and i.name in values else i)


def _indices_in(expr: Expression) -> List[Index]:
    found: List[Index] = []
    for node in iter_nodes(expr):
        if isinstance(node, Tensor):
            found.extend(node.indices)
    return found


def expand_dummies(expr: Expression, ctx: Context) -> Expression:
    return ComponentEngine(ctx).expand_dummies(expr)


def contract_epsilon(expr: Expression, ctx: Context) -> Expression:
    return ComponentEngine(ctx).contract_epsilon(expr)


def apply_id_rules(expr: Expression, rules: Sequence[IdRule], ctx: Context = Context()) -> Expression:
    return ComponentEngine(ctx).apply_id_rules(expr, rules)


def normalize_components(expr: Expression, ctx: Context = Context()) -> Expression:
    return ComponentEngine(ctx).normalize_components(expr)


# determinant

def _form_context(size: int) -> Context:
    names = [f"i{k}" for k in range(size)]
    return declare_indices(Context(dimension=size), "indices", names, first_value=0)


@lru_cache(maxsize=None)
def determinant_expansion(size: int) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
    """
    Signed column permutations of the Levi-Civita determinant formula.

    Expands e_(0,..,n-1) * e_(i0,..,in-1) * m(0,i0) * ... * m(n-1,in-1)
    through expand_dummies and reads every term back as (sign, columns).
    """
    ctx = _form_context(size)
    names = [f"i{k}" for k in range(size)]
    epsilon_fixed = Tensor("e_", tuple(Index.concrete(k) for k in range(size)), "call")
    epsilon_free = Tensor("e_", tuple(Index(n) for n in names), "call")
    entries = [Tensor("m", (Index.concrete(k), Index(n)), "call") for k, n in enumerate(names)]
    expanded = ComponentEngine(ctx).expand_dummies(make_product([epsilon_fixed, epsilon_free, *entries]))
    result = []
    for term in terms_of(expanded):
        coefficient, factors = split_term(term)
        columns = tuple(f.indices[1].value for f in sorted(factors, key=lambda f: f.indices[0].value))
        result.append((int(coefficient), columns))
    return tuple(result)


def _as_matrix(matrix) -> np.ndarray:
    array = np.empty((len(matrix), len(matrix)), dtype=object)
    for row in range(len(matrix)):
        if len(matrix[row]) != len(matrix):
            raise ComponentError("determinant needs a square matrix")
        for column in range(len(matrix)):
            array[row, column] = RationalFunction.coerce(matrix[row][column])
    return array


def determinant(matrix, ctx: Optional[Context] = None) -> RationalFunction:
    """Determinant of a square matrix of rational functions via the epsilon formula."""
    array = _as_matrix(matrix)
    size = array.shape[0]
    if size == 0:
        return RationalFunction.constant(1)
    total = RationalFunction.constant(0)
    for sign, columns in determinant_expansion(size):
        product = RationalFunction.constant(sign)
        for row, column in enumerate(columns):
            product = product * array[row, column]
            if product.is_zero():
                break
        total = total + product
    return total


def inverse(matrix) -> np.ndarray:
    """Inverse through the adjugate; raises ComponentError for a singular matrix."""
    array = _as_matrix(matrix)
    size = array.shape[0]
    det = determinant(array)
    if det.is_zero():
        raise ComponentError("matrix is singular")
    result = np.empty((size, size), dtype=object)
    for row in range(size):
        for column in range(size):
            minor = np.delete(np.delete(array, column, axis=0), row, axis=1)
            cofactor = determinant(minor) * (-1 if (row + column) % 2 else 1)
            result[row, column] = cofactor / det
    return result
