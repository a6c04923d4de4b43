"""
Symmetry-aware canonicalization and like-term collection.

Each term is brought to a unique representative: slot groups are sorted
with sign tracking, dummy indices are relabeled to the first free names
of their family (minimum over all relabelings), and factors are sorted by
the canonical factor order.
"""

import itertools
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .tensor_context import EPSILON_HEADS, Context, SymmetryGroup, SymmetryKind
from .tensor_expression import (
    ZERO,
    Derivative,
    Equation,
    Expression,
    Index,
    Power,
    SqrtNegDet,
    Sum,
    Symbol,
    Tensor,
    dummy_names,
    fold_sqrt_neg_det,
    free_indices,
    make_sum,
    make_term,
    rename_free_indices,
    split_term,
    terms_of,
    visible_indices,
)
from .tensor_expression_renderer import render_plain

MAX_EXHAUSTIVE_RELABELINGS = 720


def permutation_sign(order: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct sortable items."""
    inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    return -1 if inversions % 2 else 1


class TensorCanonicalizer:
    """Canonical forms of terms under a Context's declared symmetries."""

    def __init__(self, ctx: Optional[Context] = None):
        self.ctx = ctx if ctx is not None else Context()
        self.diagnostics: List[str] = []

    # ordering

    def index_key(self, index: Index) -> tuple:
        if index.is_concrete:
            return (0, index.value, index.variance.value)
        if index.wildcard:
            return (2, 0, 0, index.name, index.variance.value)
        family, position = self.ctx.family_position(index.name)
        return (1, family, position, index.name, index.variance.value)

    def factor_key(self, factor: Expression) -> tuple:
        text = render_plain(factor)
        if isinstance(factor, Symbol):
            return (1, factor.name, (1,), text)
        if isinstance(factor, SqrtNegDet):
            return (1, f"\\sqrt{{-{factor.metric}}}", (1,), text)
        if isinstance(factor, Power) and isinstance(factor.base, (Symbol, SqrtNegDet)):
            base = factor.base.name if isinstance(factor.base, Symbol) else f"\\sqrt{{-{factor.base.metric}}}"
            return (1, base, (factor.exponent,), text)
        if isinstance(factor, Tensor):
            return (2, factor.head, tuple(self.index_key(i) for i in factor.indices), text)
        if isinstance(factor, Derivative):
            return (3, factor.operator, (self.index_key(factor.index),), text)
        return (4, "", (), text)

    def term_key(self, factors: Sequence[Expression]) -> tuple:
        return tuple(self.factor_key(f) for f in factors)

    def sort_factors(self, factors: Iterable[Expression]) -> Tuple[Expression, ...]:
        return tuple(sorted(factors, key=self.factor_key))

    # slot symmetries

    def _groups_of(self, tensor: Tensor) -> Tuple[SymmetryGroup, ...]:
        if tensor.head in EPSILON_HEADS:
            return (SymmetryGroup(tuple(range(len(tensor.indices))), SymmetryKind.ANTISYMMETRIC),)
        decl = self.ctx.symmetry_of(tensor.head)
        if decl is None:
            if not tensor.is_wildcard:
                note = f"undeclared tensor {tensor.head} left unsorted"
                if note not in self.diagnostics:
                    self.diagnostics.append(note)
            return ()
        return decl.groups

    def sort_slots(self, tensor: Tensor) -> Tuple[int, Tensor]:
        """Sort each symmetry group; returns (sign, tensor) with sign 0 for a vanishing tensor."""
        indices = list(tensor.indices)
        sign = 1
        for group in self._groups_of(tensor):
            slots = group.slots or tuple(range(len(indices)))
            if any(slot >= len(indices) for slot in slots):
                continue
            current = [indices[slot] for slot in slots]
            order = sorted(range(len(current)), key=lambda k: self.index_key(current[k]))
            if group.kind is SymmetryKind.ANTISYMMETRIC:
                names = [i.name for i in current]
                if len(set(names)) != len(names):
                    return 0, tensor
                sign *= permutation_sign(order)
            for slot, k in zip(slots, order):
                indices[slot] = current[k]
        return sign, Tensor(tensor.head, tuple(indices), tensor.notation)

    # terms

    def _normalize_factors(self, coefficient: Fraction, factors: Sequence[Expression],
                           reserved: FrozenSet[str] = frozenset()) -> Tuple[Fraction, Tuple[Expression, ...]]:
        # inner dummies stay clear of every name the enclosing term uses
        outer = reserved | {i.name for f in factors for i in visible_indices(f)}
        result: List[Expression] = []
        for factor in factors:
            if isinstance(factor, Power) and isinstance(factor.base, SqrtNegDet) and abs(factor.exponent) >= 2:
                folded_coefficient, folded = split_term(fold_sqrt_neg_det(factor.base.metric, factor.exponent))
                coefficient *= folded_coefficient
                result.extend(folded)
                continue
            if isinstance(factor, Tensor):
                sign, factor = self.sort_slots(factor)
                if sign == 0:
                    return Fraction(0), ()
                coefficient *= sign
            elif isinstance(factor, Derivative):
                argument = collect_terms(self.canonicalize(factor.argument, outer), self.ctx)
                inner_coefficient, inner_factors = (split_term(argument)
                                                    if not isinstance(argument, Sum) else (Fraction(1), None))
                if inner_coefficient == 0:
                    return Fraction(0), ()
                if inner_factors is not None and inner_coefficient != 1:
                    coefficient *= inner_coefficient
                    argument = make_term(Fraction(1), inner_factors)
                factor = Derivative(factor.operator, factor.index, argument)
            elif isinstance(factor, Sum):
                factor = collect_terms(self.canonicalize(factor, outer), self.ctx)
            result.append(factor)
        return coefficient, self.sort_factors(result)

    def _relabelings(self, dummies: List[str], taken: set) -> Optional[List[Dict[str, str]]]:
        by_family: Dict[str, List[str]] = {}
        for name in dummies:
            family = self.ctx.family_of(name)
            by_family.setdefault(family.name if family else "", []).append(name)
        choices = []
        count = 1
        for family_name, names in by_family.items():
            family = self.ctx.family_named(family_name)
            pool = [n for n in (family.names if family else names) if n not in taken]
            targets = pool[:len(names)] if len(pool) >= len(names) else names
            options = list(itertools.permutations(targets))
            count *= len(options)
            choices.append((names, options))
        if count > MAX_EXHAUSTIVE_RELABELINGS:
            return None
        relabelings = []
        for combination in itertools.product(*(options for _, options in choices)):
            mapping: Dict[str, str] = {}
            for (names, _), targets in zip(choices, combination):
                mapping.update(zip(names, targets))
            relabelings.append(mapping)
        return relabelings

    def _greedy_relabeling(self, factors: Sequence[Expression], dummies: List[str], taken: set) -> Dict[str, str]:
        ordered = dummy_names(make_term(Fraction(1), factors))
        mapping: Dict[str, str] = {}
        used = set(taken)
        for name in ordered + [d for d in dummies if d not in ordered]:
            family = self.ctx.family_of(name)
            pool = [n for n in (family.names if family else [name]) if n not in used]
            target = pool[0] if pool else name
            mapping[name] = target
            used.add(target)
        return mapping

    def canonical_term(self, term: Expression, reserved: FrozenSet[str] = frozenset()) -> Expression:
        coefficient, factors = split_term(term)
        coefficient, factors = self._normalize_factors(coefficient, factors, reserved)
        if coefficient == 0:
            return ZERO
        base = make_term(Fraction(1), factors)
        dummies = dummy_names(base)
        if not dummies:
            return make_term(coefficient, factors)

        taken = {i.name for i in free_indices(base)} | reserved
        relabelings = self._relabelings(dummies, taken)
        if relabelings is None:
            self.diagnostics.append(f"greedy dummy relabeling used for {len(dummies)} dummies")
            relabelings = [self._greedy_relabeling(factors, dummies, taken)]

        best_key = None
        best: Optional[Tuple[Fraction, Tuple[Expression, ...]]] = None
        signs = set()
        for mapping in relabelings:
            renamed = [rename_free_indices(f, mapping) for f in factors]
            sign, candidate = self._normalize_factors(Fraction(1), renamed, reserved)
            if sign == 0:
                return ZERO
            key = self.term_key(candidate)
            if best_key is None or key < best_key:
                best_key, best, signs = key, (sign, candidate), {sign > 0}
            elif key == best_key:
                signs.add(sign > 0)
        if len(signs) > 1:
            return ZERO
        sign, candidate = best
        return make_term(coefficient * sign, candidate)

    def canonicalize(self, expr: Expression, reserved: FrozenSet[str] = frozenset()) -> Expression:
        if isinstance(expr, Equation):
            return Equation(self.canonicalize(expr.lhs, reserved), self.canonicalize(expr.rhs, reserved))
        return make_sum(self.canonical_term(term, reserved) for term in terms_of(expr))

    def collect_terms(self, expr: Expression) -> Expression:
        if isinstance(expr, Equation):
            return Equation(self.collect_terms(expr.lhs), self.collect_terms(expr.rhs))
        totals: Dict[Tuple[Expression, ...], Fraction] = {}
        for term in terms_of(expr):
            coefficient, factors = split_term(term)
            totals[factors] = totals.get(factors, Fraction(0)) + coefficient
        kept = [(factors, c) for factors, c in totals.items() if c != 0]
        kept.sort(key=lambda item: (self.term_key(item[0]), render_plain(make_term(item[1], item[0]))))
        return make_sum(make_term(c, factors) for factors, c in kept)


def canonicalize(expr: Expression, ctx: Context) -> Expression:
    """Canonical representative of every term of ``expr`` (terms are not merged)."""
    return TensorCanonicalizer(ctx).canonicalize(expr)


def collect_terms(expr: Expression, ctx: Optional[Context] = None) -> Expression:
    """Merge syntactically identical terms, drop zeros, sort by the canonical order."""
    return TensorCanonicalizer(ctx).collect_terms(expr)
