"""
Pattern matching, rule substitution and distribution.

Pattern indices are variables; ``A?`` heads bind tensor names. A rule is
applied to every match in one pass; dummies introduced by the right-hand
side get the first names of their family unused in the target term.
"""

import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..utils.exceptions import RewriteError
from .tensor_context import Context
from .tensor_expression import (
    Derivative,
    Equation,
    Expression,
    Index,
    Number,
    Power,
    Product,
    Sum,
    Tensor,
    all_index_names,
    dummy_names,
    free_indices,
    iter_nodes,
    make_power,
    make_product,
    make_sum,
    make_term,
    rename_free_indices,
    split_term,
    terms_of,
)


@dataclass(frozen=True)
class Bindings:
    head_map: Dict[str, str] = field(default_factory=dict)
    index_map: Dict[str, Index] = field(default_factory=dict)

    def bind_head(self, wildcard: str, head: str) -> Optional["Bindings"]:
        bound = self.head_map.get(wildcard)
        if bound is not None:
            return self if bound == head else None
        return replace(self, head_map={**self.head_map, wildcard: head})

    def bind_index(self, pattern: Index, target: Index) -> Optional["Bindings"]:
        if pattern.is_concrete:
            return self if target.is_concrete and target.value == pattern.value else None
        if pattern.variance != target.variance:
            return None
        bound = self.index_map.get(pattern.name)
        if bound is not None:
            return self if bound.name == target.name and bound.value == target.value else None
        if target.is_abstract and any(i.is_abstract and i.name == target.name for i in self.index_map.values()):
            return None
        return replace(self, index_map={**self.index_map, pattern.name: target})


@dataclass(frozen=True)
class Rule:
    """``lhs -> rhs`` with wildcard heads and index variables."""

    lhs: Expression
    rhs: Expression
    label: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.lhs, (Sum, Equation)):
            raise RewriteError("rule left-hand side must be a single term")
        lhs_heads = {n.head for n in iter_nodes(self.lhs) if isinstance(n, Tensor) and n.is_wildcard}
        rhs_heads = {n.head for n in iter_nodes(self.rhs) if isinstance(n, Tensor) and n.is_wildcard}
        missing = rhs_heads - lhs_heads
        if missing:
            raise RewriteError(f"wildcard(s) {', '.join(sorted(missing))} appear only on the right-hand side")
        lhs_free = sorted(i.name for i in free_indices(self.lhs))
        rhs_free = sorted(i.name for i in free_indices(self.rhs))
        if lhs_free != rhs_free:
            raise RewriteError(f"rule sides have different free indices: {lhs_free} vs {rhs_free}")


# matching

def _match_indices(patterns: Sequence[Index], targets: Sequence[Index], bindings: Bindings) -> Optional[Bindings]:
    if len(patterns) != len(targets):
        return None
    for pattern, target in zip(patterns, targets):
        bindings = bindings.bind_index(pattern, target)
        if bindings is None:
            return None
    return bindings


def _match_factor(pattern: Expression, target: Expression, bindings: Bindings) -> Optional[Bindings]:
    if isinstance(pattern, Tensor):
        if not isinstance(target, Tensor):
            return None
        if pattern.is_wildcard:
            bindings = bindings.bind_head(pattern.head, target.head)
        elif pattern.head != target.head:
            return None
        return _match_indices(pattern.indices, target.indices, bindings) if bindings else None
    if isinstance(pattern, Derivative):
        if not isinstance(target, Derivative) or pattern.operator != target.operator:
            return None
        bindings = bindings.bind_index(pattern.index, target.index)
        return _match_factor(pattern.argument, target.argument, bindings) if bindings else None
    if isinstance(pattern, Power):
        if not isinstance(target, Power) or pattern.exponent != target.exponent:
            return None
        return _match_factor(pattern.base, target.base, bindings)
    if isinstance(pattern, Product):
        return _match_product(pattern, target, bindings)
    return bindings if pattern == target else None


def _match_product(pattern: Expression, target: Expression, bindings: Bindings) -> Optional[Bindings]:
    p_coefficient, p_factors = split_term(pattern)
    t_coefficient, t_factors = split_term(target)
    if p_coefficient != t_coefficient or len(p_factors) != len(t_factors):
        return None
    result = _match_subset(p_factors, t_factors, bindings)
    return result[0] if result else None


def _match_subset(patterns: Sequence[Expression], targets: Sequence[Expression],
                  bindings: Bindings) -> Optional[Tuple[Bindings, Tuple[int, ...]]]:
    """Assign every pattern factor to a distinct target factor (backtracking)."""
    def search(position: int, used: Tuple[int, ...], current: Bindings):
        if position == len(patterns):
            return current, used
        for k, target in enumerate(targets):
            if k in used:
                continue
            extended = _match_factor(patterns[position], target, current)
            if extended is not None:
                found = search(position + 1, used + (k,), extended)
                if found:
                    return found
        return None
    return search(0, (), bindings)


def match(pattern: Expression, target: Expression, ctx: Optional[Context] = None) -> Optional[Bindings]:
    """Bindings making ``pattern`` equal to ``target``, or None."""
    return _match_factor(pattern, target, Bindings())


# instantiation

def _fresh_names(rhs: Expression, bindings: Bindings, ctx: Context, avoid: Set[str]) -> Dict[str, str]:
    fresh: Dict[str, str] = {}
    used = set(avoid) | {i.name for i in bindings.index_map.values() if i.is_abstract}
    for name in sorted(all_index_names(rhs), key=lambda n: ctx.family_position(n)):
        if name in bindings.index_map:
            continue
        family = ctx.family_of(name)
        if family is None:
            raise RewriteError(f"index {name} in rule right-hand side has no family")
        candidates = [n for n in family.names if n not in used]
        if not candidates:
            raise RewriteError(f"no unused index left in family '{family.name}' for a fresh dummy")
        fresh[name] = candidates[0]
        used.add(candidates[0])
    return fresh


def instantiate(rhs: Expression, bindings: Bindings, ctx: Context, avoid: Set[str]) -> Expression:
    """Rule right-hand side with bound heads/indices and fresh dummies."""
    fresh = _fresh_names(rhs, bindings, ctx, avoid)

    def convert(index: Index) -> Index:
        if index.is_abstract and index.name in bindings.index_map:
            target = bindings.index_map[index.name]
            return Index(target.name, index.variance, target.value)
        if index.is_abstract and index.name in fresh:
            return index.with_name(fresh[index.name])
        return index

    def rebuild(expr: Expression) -> Expression:
        if isinstance(expr, Tensor):
            head = bindings.head_map.get(expr.head, expr.head)
            return Tensor(head, tuple(convert(i) for i in expr.indices), expr.notation)
        if isinstance(expr, Derivative):
            return Derivative(expr.operator, convert(expr.index), rebuild(expr.argument))
        if isinstance(expr, Power):
            return make_power(rebuild(expr.base), expr.exponent)
        if isinstance(expr, Product):
            return make_product(rebuild(f) for f in expr.factors)
        if isinstance(expr, Sum):
            return make_sum(rebuild(t) for t in expr.terms)
        return expr

    return rebuild(rhs)


# substitution

class TensorRewriter:
    """Applies rules to expressions under a Context."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.replacements = 0

    def _substitute_factor(self, factor: Expression, rule: Rule, avoid: Set[str]) -> Expression:
        if not isinstance(rule.lhs, Product):
            bindings = _match_factor(rule.lhs, factor, Bindings())
            if bindings is not None:
                self.replacements += 1
                return instantiate(rule.rhs, bindings, self.ctx, avoid)
        if isinstance(factor, Derivative):
            inner_avoid = avoid | all_index_names(factor.argument)
            return Derivative(factor.operator, factor.index,
                              self._substitute_sum(factor.argument, rule, inner_avoid))
        if isinstance(factor, Sum):
            return self._substitute_sum(factor, rule, avoid)
        return factor

    def _substitute_term(self, term: Expression, rule: Rule, avoid: Set[str]) -> Expression:
        coefficient, factors = split_term(term)
        avoid = avoid | all_index_names(term)
        if isinstance(rule.lhs, Product):
            p_coefficient, p_factors = split_term(rule.lhs)
            found = _match_subset(p_factors, factors, Bindings())
            if found is not None:
                bindings, used = found
                self.replacements += 1
                rest = [f for k, f in enumerate(factors) if k not in used]
                replacement = instantiate(rule.rhs, bindings, self.ctx, avoid)
                return make_product([Number(coefficient / p_coefficient), replacement, *rest])
        return make_term(coefficient, [self._substitute_factor(f, rule, avoid) for f in factors])

    def _substitute_sum(self, expr: Expression, rule: Rule, avoid: Set[str]) -> Expression:
        return make_sum(self._substitute_term(t, rule, avoid) for t in terms_of(expr))

    def substitute(self, expr: Expression, rule: Rule) -> Expression:
        if isinstance(expr, Equation):
            return Equation(self.substitute(expr.lhs, rule), self.substitute(expr.rhs, rule))
        result = distribute(self._substitute_sum(expr, rule, set()), self.ctx)
        free_indices(result)
        return result


def substitute(expr: Expression, rule: Rule, ctx: Context) -> Expression:
    """Replace every match of ``rule.lhs`` in ``expr`` in one pass, then distribute."""
    return TensorRewriter(ctx).substitute(expr, rule)


# distribution

def _separate_dummies(left: Expression, right: Expression, ctx: Optional[Context]) -> Expression:
    """Rename dummies of ``right`` that clash with index names of ``left``."""
    clashes = set(dummy_names(right)) & all_index_names(left)
    if not clashes:
        return right
    if ctx is None:
        raise RewriteError(f"dummy index clash on {', '.join(sorted(clashes))} needs a context to rename")
    used = all_index_names(left) | all_index_names(right)
    renaming: Dict[str, str] = {}
    for name in sorted(clashes):
        family = ctx.family_of(name)
        candidates = [n for n in (family.names if family else ()) if n not in used]
        if not candidates:
            raise RewriteError(f"no unused index left in family '{family.name if family else name}'")
        renaming[name] = candidates[0]
        used.add(candidates[0])
    return rename_free_indices(right, renaming)


def _distribute_term(term: Expression, ctx: Optional[Context]) -> List[Expression]:
    coefficient, factors = split_term(term)
    expanded: List[List[Expression]] = []
    for factor in factors:
        if isinstance(factor, Sum):
            expanded.append([t for s in factor.terms for t in _distribute_term(s, ctx)])
        elif isinstance(factor, Power) and isinstance(factor.base, Sum) and factor.exponent > 1:
            repeated = make_product([factor.base] * factor.exponent)
            expanded.append(_distribute_term(repeated, ctx) if isinstance(repeated, Product)
                            else list(terms_of(repeated)))
        elif isinstance(factor, Derivative):
            expanded.append([Derivative(factor.operator, factor.index, distribute(factor.argument, ctx))])
        else:
            expanded.append([factor])
    results: List[Expression] = []
    for combination in itertools.product(*expanded):
        current: Expression = Number(coefficient)
        for piece in combination:
            current = make_product([current, _separate_dummies(current, piece, ctx)])
        results.append(current)
    return results


def distribute(expr: Expression, ctx: Optional[Context] = None) -> Expression:
    """Fully expanded sum of products."""
    if isinstance(expr, Equation):
        return Equation(distribute(expr.lhs, ctx), distribute(expr.rhs, ctx))
    return make_sum(t for term in terms_of(expr) for t in _distribute_term(term, ctx))
