"""
Declaration context: index families, tensor symmetries, derivative operators,
named expressions and rules.

A Context is an immutable value; every declaration returns a new Context.
"""

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..utils.exceptions import ComponentError, DeclarationError
from .tensor_expression import Expression, Index

GREEK_NAMES = {
    "\\alpha", "\\beta", "\\gamma", "\\delta", "\\epsilon", "\\varepsilon", "\\zeta", "\\eta",
    "\\theta", "\\iota", "\\kappa", "\\lambda", "\\mu", "\\nu", "\\xi", "\\rho", "\\sigma",
    "\\tau", "\\upsilon", "\\phi", "\\chi", "\\psi", "\\omega",
}
EPSILON_HEADS = ("e_",)


class SymmetryKind(Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


class DerivativeKind(Enum):
    PARTIAL = "partial"
    COVARIANT = "covariant"


@dataclass(frozen=True)
class IndexFamily:
    """Ordered index names sharing one component range."""

    name: str
    names: Tuple[str, ...]
    first_value: int = 0
    values: Optional[Tuple[int, ...]] = None

    def value_range(self, dimension: int) -> Tuple[int, ...]:
        if self.values is not None:
            return self.values
        return tuple(range(self.first_value, dimension))

    def position(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class SymmetryGroup:
    slots: Tuple[int, ...]
    kind: SymmetryKind


@dataclass(frozen=True)
class SymmetryDecl:
    """Disjoint symmetric/antisymmetric slot groups of one tensor head."""

    groups: Tuple[SymmetryGroup, ...] = ()
    arity: Optional[int] = None

    def __post_init__(self):
        seen = set()
        for group in self.groups:
            if seen & set(group.slots):
                raise DeclarationError("symmetry groups must use disjoint slots")
            seen.update(group.slots)
            if self.arity is not None and any(s < 0 or s >= self.arity for s in group.slots):
                raise DeclarationError(f"symmetry slot outside tensor arity {self.arity}")


@dataclass(frozen=True)
class Context:
    dimension: int = 4
    families: Tuple[IndexFamily, ...] = ()
    tensor_decls: Dict[str, SymmetryDecl] = field(default_factory=dict)
    derivative_decls: Dict[str, DerivativeKind] = field(
        default_factory=lambda: {"\\partial": DerivativeKind.PARTIAL, "\\nabla": DerivativeKind.COVARIANT}
    )
    symbols: Tuple[str, ...] = ()
    named_exprs: Dict[str, Expression] = field(default_factory=dict)
    rules: Dict[str, Any] = field(default_factory=dict)

    # lookups

    def family_of(self, name: str) -> Optional[IndexFamily]:
        for family in self.families:
            if name in family.names:
                return family
        return None

    def family_named(self, name: str) -> Optional[IndexFamily]:
        for family in self.families:
            if family.name == name:
                return family
        return None

    def is_index_name(self, name: str) -> bool:
        return self.family_of(name) is not None

    def index_range(self, index: Index) -> Tuple[int, ...]:
        family = self.family_of(index.name)
        if family is None:
            raise ComponentError(f"index {index.name} has no declared component range")
        return family.value_range(self.dimension)

    def family_position(self, name: str) -> Tuple[int, int]:
        for number, family in enumerate(self.families):
            if name in family.names:
                return number, family.position(name)
        return len(self.families), 0

    def symmetry_of(self, head: str) -> Optional[SymmetryDecl]:
        return self.tensor_decls.get(head)

    def is_derivative(self, name: str) -> bool:
        return name in self.derivative_decls

    # functional updates

    def with_dimension(self, dimension: int) -> "Context":
        if dimension < 1:
            raise DeclarationError(f"dimension must be positive, got {dimension}")
        return replace(self, dimension=dimension)

    def with_named(self, label: str, expr: Expression) -> "Context":
        return replace(self, named_exprs={**self.named_exprs, label: expr})

    def with_rule(self, label: str, rule: Any) -> "Context":
        return replace(self, rules={**self.rules, label: rule})

    def describe(self) -> List[str]:
        """Human-readable summary used by the REPL ``:ctx`` command."""
        lines = [f"dimension: {self.dimension}"]
        for family in self.families:
            values = family.value_range(self.dimension)
            lines.append(f"indices {family.name}: {', '.join(family.names)} "
                         f"(range {values[0] if values else '-'}..{values[-1] if values else '-'})")
        for head, decl in sorted(self.tensor_decls.items()):
            groups = ", ".join(f"{g.kind.value}{list(g.slots)}" for g in decl.groups) or "no symmetry"
            lines.append(f"tensor {head}: {groups}")
        for name, kind in sorted(self.derivative_decls.items()):
            lines.append(f"derivative {name}: {kind.value}")
        if self.symbols:
            lines.append(f"symbols: {', '.join(self.symbols)}")
        if self.rules:
            lines.append(f"rules: {', '.join(self.rules)}")
        if self.named_exprs:
            lines.append(f"expressions: {', '.join(self.named_exprs)}")
        return lines


# declarations

def declare_indices(ctx: Context, family_name: str, names: Sequence[str],
                    first_value: Optional[int] = None,
                    values: Optional[Sequence[int]] = None) -> Context:
    """Add names to an index family, creating it when needed."""
    names = tuple(names)
    for name in names:
        owner = ctx.family_of(name)
        if owner is not None and owner.name != family_name:
            raise DeclarationError(f"index {name} already belongs to family {owner.name}")
    if first_value is None:
        first_value = 0 if all(n in GREEK_NAMES or n.startswith("\\") for n in names) else 1
    existing = ctx.family_named(family_name)
    if existing is None:
        family = IndexFamily(family_name, names, first_value,
                             tuple(values) if values is not None else None)
        return replace(ctx, families=ctx.families + (family,))
    merged = existing.names + tuple(n for n in names if n not in existing.names)
    family = replace(existing, names=merged,
                     values=tuple(values) if values is not None else existing.values)
    families = tuple(family if f.name == family_name else f for f in ctx.families)
    return replace(ctx, families=families)


def declare_tensor(ctx: Context, head: str, decl: SymmetryDecl) -> Context:
    existing = ctx.tensor_decls.get(head)
    if existing is not None and existing.groups != decl.groups:
        raise DeclarationError(f"conflicting redeclaration of tensor {head}")
    return replace(ctx, tensor_decls={**ctx.tensor_decls, head: decl})


def declare_derivative(ctx: Context, operator: str, kind: DerivativeKind) -> Context:
    existing = ctx.derivative_decls.get(operator)
    if existing is not None and existing != kind and operator not in ("\\partial", "\\nabla"):
        raise DeclarationError(f"conflicting redeclaration of derivative {operator}")
    return replace(ctx, derivative_decls={**ctx.derivative_decls, operator: kind})


def declare_symbols(ctx: Context, names: Sequence[str]) -> Context:
    merged = ctx.symbols + tuple(n for n in names if n not in ctx.symbols)
    return replace(ctx, symbols=merged)


_DECLARATION = re.compile(r"^\s*(?P<target>.+?)\s*::\s*(?P<keyword>\w+)\s*(?:\((?P<args>.*)\))?\s*$", re.S)
_INDEX_LIST = re.compile(r"^\{(?P<names>[^}]*)\}$")
_DERIVATIVE_TARGET = re.compile(r"^(?P<op>\\?[A-Za-z]+)\s*_\s*\{\s*#\s*\}$")
_TENSOR_TARGET = re.compile(r"^(?P<head>\\?[A-Za-z][A-Za-z0-9]*)(?P<groups>(?:\s*[_^]\s*\{[^}]*\})+)$")
_GROUP = re.compile(r"[_^]\s*\{([^}]*)\}")
_BRACED_ARG = re.compile(r"(\w+)\s*=\s*\{([^}]*)\}")


def _split_names(text: str) -> List[str]:
    return [n for n in re.split(r"[\s,]+", text.strip()) if n]


def _tensor_arity(target: str) -> Tuple[str, int]:
    match = _TENSOR_TARGET.match(target.strip())
    if not match:
        raise DeclarationError(f"cannot read tensor in declaration '{target}'")
    arity = sum(len(_split_names(g)) for g in _GROUP.findall(match.group("groups")))
    return match.group("head"), arity


def declare(ctx: Context, decl: str) -> Context:
    """
    Apply one ``target::Keyword(args)`` declaration statement.

    Args:
        ctx: Context to extend
        decl: Declaration text without terminator

    Returns:
        New Context; ``ctx`` itself is unchanged
    """
    match = _DECLARATION.match(decl)
    if not match:
        raise DeclarationError(f"not a declaration: '{decl.strip()}'")
    target = match.group("target").strip()
    keyword = match.group("keyword")
    args = match.group("args") or ""

    if keyword == "Indices":
        names_match = _INDEX_LIST.match(target)
        if not names_match:
            raise DeclarationError(f"Indices expects a braced name list, got '{target}'")
        names = _split_names(names_match.group("names"))
        family_name = _split_names(args.split(",")[0])[0] if args.strip() else "default"
        options = dict(_BRACED_ARG.findall(args))
        values = [int(v) for v in _split_names(options["values"])] if "values" in options else None
        return declare_indices(ctx, family_name, names, values=values)

    if keyword in ("PartialDerivative", "Derivative"):
        derivative = _DERIVATIVE_TARGET.match(target)
        if not derivative:
            raise DeclarationError(f"derivative declaration needs 'op_{{#}}', got '{target}'")
        kind = DerivativeKind.PARTIAL if keyword == "PartialDerivative" else DerivativeKind.COVARIANT
        return declare_derivative(ctx, derivative.group("op"), kind)

    if keyword in ("AntiSymmetric", "Symmetric"):
        head, arity = _tensor_arity(target)
        kind = SymmetryKind.ANTISYMMETRIC if keyword == "AntiSymmetric" else SymmetryKind.SYMMETRIC
        group = SymmetryGroup(tuple(range(arity)), kind)
        return declare_tensor(ctx, head, SymmetryDecl((group,), arity))

    if keyword == "TableauSymmetry":
        head, arity = _tensor_arity(target)
        options = dict(_BRACED_ARG.findall(args))
        if "shape" not in options or "indices" not in options:
            raise DeclarationError("TableauSymmetry needs shape={..} and indices={..}")
        shape = [int(v) for v in _split_names(options["shape"])]
        slots = tuple(int(v) for v in _split_names(options["indices"]))
        if sum(shape) != len(slots):
            raise DeclarationError("TableauSymmetry shape does not match the number of indices")
        if len(shape) == 1:
            kind = SymmetryKind.SYMMETRIC
        elif all(row == 1 for row in shape):
            kind = SymmetryKind.ANTISYMMETRIC
        else:
            raise DeclarationError(f"only single-row or single-column tableaux are supported, got {shape}")
        return declare_tensor(ctx, head, SymmetryDecl((SymmetryGroup(slots, kind),), arity))

    raise DeclarationError(f"unknown declaration keyword '{keyword}'")
