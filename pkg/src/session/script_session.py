"""
Script and REPL sessions.

A Session is an immutable value. ``execute_statement`` returns a new Session
with the statement's transcript entry appended; ``run_script`` folds a whole
script through it and ``repl_step`` does the same for one input line.
"""

import re
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from ..part_1_abstract_tensor_algebra.tensor_canonicalizer import TensorCanonicalizer
from ..part_1_abstract_tensor_algebra.tensor_context import (
    Context,
    SymmetryDecl,
    SymmetryGroup,
    SymmetryKind,
    declare,
    declare_indices,
    declare_symbols,
    declare_tensor,
)
from ..part_1_abstract_tensor_algebra.tensor_expression import Equation, Expression, Tensor
from ..part_1_abstract_tensor_algebra.tensor_expression_parser import TensorExpressionParser
from ..part_1_abstract_tensor_algebra.tensor_expression_renderer import (
    RenderOptions,
    render_listing,
    render_text,
    wrap_text,
)
from ..part_1_abstract_tensor_algebra.tensor_rewriter import Rule, TensorRewriter, distribute
from ..part_2_component_calculation.component_engine import ComponentEngine, IdRule
from ..utils.exceptions import DeclarationError, EvaluationError, ParseError, TcasError
from .script_statements import Statement, StatementKind, classify, split_statements

FORM_FAMILY = "indices"
LAST_EXPRESSION = "%"

_LOCAL = re.compile(r"^(?P<name>[A-Za-z][A-Za-z0-9]*)\s*=(?P<expr>.*)$", re.S)
_TENSOR_ITEM = re.compile(r"^(?P<head>[A-Za-z][A-Za-z0-9]*_?)\s*(?:\(\s*(?P<option>\w+)\s*\))?$")


@dataclass(frozen=True)
class TranscriptEntry:
    statement: str
    output: str = ""
    notes: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Transcript:
    """Result of run_script: entries in execution order plus exit status."""

    entries: Tuple[TranscriptEntry, ...] = ()
    status: int = 0
    error: Optional[str] = None
    line: Optional[int] = None
    column: Optional[int] = None
    statement_index: Optional[int] = None

    @property
    def outputs(self) -> List[str]:
        return [entry.output for entry in self.entries if entry.output]

    @property
    def notes(self) -> List[str]:
        return [note for entry in self.entries for note in entry.notes]

    def text(self) -> str:
        return "\n".join(self.outputs)


@dataclass(frozen=True)
class Session:
    ctx: Context = field(default_factory=Context)
    mode: str = "batch"
    render: RenderOptions = field(default_factory=RenderOptions)
    transcript: Tuple[TranscriptEntry, ...] = ()
    pending: Tuple[Statement, ...] = ()
    locals: Tuple[str, ...] = ()
    last_label: Optional[str] = None
    buffer: str = ""
    finished: bool = False

    def show(self, label: str) -> str:
        if label in self.ctx.named_exprs:
            return _echo(label, self.ctx.named_exprs[label], self.render)
        if label in self.ctx.rules:
            return _echo_rule(label, self.ctx.rules[label], self.render)
        raise EvaluationError(f"nothing is stored under '{label}'")


# rendering helpers

def _echo(label: Optional[str], expr: Expression, opts: RenderOptions) -> str:
    text = render_text(expr, opts.format)
    return wrap_text(f"{label}:= {text};" if label else f"{text};", opts.width)


def _echo_rule(label: str, rule: Rule, opts: RenderOptions) -> str:
    arrow = "\\rightarrow" if opts.format == "latex" else "->"
    lhs, rhs = render_text(rule.lhs, opts.format), render_text(rule.rhs, opts.format)
    return wrap_text(f"{label}:= {lhs} {arrow} {rhs};", opts.width)


# statement execution

class StatementExecutor:
    """Executes one classified statement against a Session."""

    def __init__(self, session: Session, statement: Statement):
        self.session = session
        self.statement = statement
        self.notes: List[str] = []

    # parsing with script locations

    @staticmethod
    def _located(error: ParseError, statement: Statement, offset: int) -> ParseError:
        if error.line is not None:
            return error
        return error.located(*statement.locate(offset + (error.position or 0)))

    def parse_at(self, statement: Statement, text: str, offset: int,
                 ctx: Optional[Context] = None) -> Expression:
        """Parse ``text`` found at ``offset`` inside ``statement``."""
        parser = TensorExpressionParser(ctx or self.session.ctx)
        try:
            expr = parser.parse(text)
        except ParseError as exc:
            raise self._located(exc, statement, offset) from exc
        self.notes.extend(parser.diagnostics)
        return expr

    def parse(self, text: str, offset: int) -> Expression:
        return self.parse_at(self.statement, text, offset)

    def parse_rule(self, text: str, offset: int) -> Tuple[Expression, Expression]:
        parser = TensorExpressionParser(self.session.ctx)
        try:
            sides = parser.parse_rule_sides(text)
        except ParseError as exc:
            raise self._located(exc, self.statement, offset) from exc
        self.notes.extend(parser.diagnostics)
        return sides

    # dispatch

    def run(self) -> Session:
        statement = self.statement
        handler = {
            StatementKind.DIRECTIVE: self._directive,
            StatementKind.DECLARATION: self._declaration,
            StatementKind.ALGORITHM: self._algorithm,
            StatementKind.FORM: self._form,
            StatementKind.RULE: self._rule,
            StatementKind.ASSIGNMENT: self._assignment,
            StatementKind.EXPRESSION: self._expression,
        }[statement.kind]
        session, output = handler()
        entry = TranscriptEntry(statement.text, output, tuple(dict.fromkeys(self.notes)))
        return replace(session, transcript=session.transcript + (entry,))

    # Cadabra-style statements

    def _declaration(self) -> Tuple[Session, str]:
        return replace(self.session, ctx=declare(self.session.ctx, self.statement.body)), ""

    def _rule(self) -> Tuple[Session, str]:
        statement = self.statement
        lhs, rhs = self.parse_rule(statement.body, statement.body_offset)
        rule = Rule(lhs, rhs, statement.label)
        session = replace(self.session, ctx=self.session.ctx.with_rule(statement.label, rule))
        return session, _echo_rule(statement.label, rule, session.render) if statement.prints else ""

    def _assignment(self) -> Tuple[Session, str]:
        statement = self.statement
        expr = self.parse(statement.body, statement.body_offset)
        return self._store(statement.label, expr)

    def _store(self, label: str, expr: Expression) -> Tuple[Session, str]:
        session = replace(self.session, ctx=self.session.ctx.with_named(label, expr), last_label=label)
        return session, _echo(label, expr, session.render) if self.statement.prints else ""

    def _target(self, label: str) -> Tuple[str, Expression]:
        if label == LAST_EXPRESSION:
            if self.session.last_label is None:
                raise EvaluationError("'%' used before any expression was defined")
            label = self.session.last_label
        if label not in self.session.ctx.named_exprs:
            raise EvaluationError(f"no expression labelled '{label}'")
        return label, self.session.ctx.named_exprs[label]

    def _algorithm(self) -> Tuple[Session, str]:
        statement = self.statement
        ctx = self.session.ctx
        label, expr = self._target(statement.label)
        if statement.head == "substitute":
            rule = ctx.rules.get(statement.rule)
            if rule is None:
                raise EvaluationError(f"no rule labelled '{statement.rule}'")
            rewriter = TensorRewriter(ctx)
            result = rewriter.substitute(expr, rule)
            if rewriter.replacements == 0:
                self.notes.append(f"rule '{statement.rule}' did not match '{label}'")
        elif statement.head == "distribute":
            result = distribute(expr, ctx)
        else:
            canonicalizer = TensorCanonicalizer(ctx)
            if statement.head == "canonicalize":
                result = canonicalizer.canonicalize(expr)
            else:
                result = canonicalizer.collect_terms(expr)
            self.notes.extend(canonicalizer.diagnostics)
        return self._store(label, result)

    def _expression(self) -> Tuple[Session, str]:
        text = self.statement.body.strip()
        if text in self.session.ctx.named_exprs or text in self.session.ctx.rules:
            return self.session, self.session.show(text) if self.statement.prints else ""
        expr = self.parse(self.statement.body, 0)
        return self.session, _echo(None, expr, self.session.render) if self.statement.prints else ""

    # FORM-style statements

    def _form(self) -> Tuple[Session, str]:
        head = self.statement.head
        body = self.statement.body.strip()
        session = self.session
        ctx = session.ctx
        if head == "off":
            return session, ""
        if head == "format":
            width = self._integer(body, "Format")
            if width < 20:
                raise DeclarationError(f"Format width must be at least 20, got {width}")
            return replace(session, render=replace(session.render, width=width)), ""
        if head == "dimension":
            return replace(session, ctx=ctx.with_dimension(self._integer(body, "Dimension"))), ""
        if head == "indices":
            names = _items(body)
            return replace(session, ctx=declare_indices(ctx, FORM_FAMILY, names, first_value=0)), ""
        if head == "tensors":
            for item in _items(body):
                ctx = declare_tensor(ctx, *_tensor_declaration(item))
            return replace(session, ctx=ctx), ""
        if head == "symbols":
            return replace(session, ctx=declare_symbols(ctx, _items(body))), ""
        return replace(session, pending=session.pending + (self.statement,)), ""

    def _integer(self, text: str, keyword: str) -> int:
        if not text.isdigit():
            raise ParseError(f"{keyword} expects a positive integer, got '{text}'", self.statement.body_offset,
                             ["integer"], *self.statement.locate(self.statement.body_offset))
        return int(text)

    def _directive(self) -> Tuple[Session, str]:
        session, output = ModuleRunner(self).run()
        if self.statement.head == ".end":
            session = replace(session, finished=True)
        return session, output


def _items(body: str) -> List[str]:
    items, depth, current = [], 0, ""
    for char in body:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == "," and depth == 0:
            items.append(current.strip())
            current = ""
        else:
            current += char
    items.append(current.strip())
    return [item for item in items if item]


def _tensor_declaration(item: str) -> Tuple[str, SymmetryDecl]:
    match = _TENSOR_ITEM.match(item)
    if not match:
        raise DeclarationError(f"cannot read tensor declaration '{item}'")
    option = (match.group("option") or "").lower()
    if not option:
        return match.group("head"), SymmetryDecl()
    kinds = {"symmetric": SymmetryKind.SYMMETRIC, "antisymmetric": SymmetryKind.ANTISYMMETRIC}
    if option not in kinds:
        raise DeclarationError(f"unknown tensor option '{option}'")
    return match.group("head"), SymmetryDecl((SymmetryGroup((), kinds[option]),))


class ModuleRunner:
    """Runs the queued FORM statements of one module at ``.sort`` / ``.end``."""

    def __init__(self, executor: StatementExecutor):
        self.executor = executor
        self.session = executor.session

    def _parse_id(self, statement: Statement, ctx: Context) -> IdRule:
        equation = self.executor.parse_at(statement, statement.body, statement.body_offset, ctx)
        if not isinstance(equation, Equation) or not isinstance(equation.lhs, Tensor):
            raise ParseError("id expects 'tensor = expression'", statement.body_offset, ["="],
                             *statement.locate(statement.body_offset))
        return IdRule(equation.lhs, equation.rhs)

    def run(self) -> Tuple[Session, str]:
        session = self.session
        ctx = session.ctx
        engine = ComponentEngine(ctx)
        expressions: Dict[str, Expression] = {name: ctx.named_exprs[name] for name in session.locals}
        order = list(session.locals)
        printing = False
        queue = list(session.pending)
        position = 0
        while position < len(queue):
            statement = queue[position]
            position += 1
            if statement.head == "local":
                match = _LOCAL.match(statement.body)
                if not match:
                    raise ParseError("Local expects 'name = expression'", statement.body_offset, ["="],
                                     *statement.locate(statement.body_offset))
                name = match.group("name")
                offset = statement.body_offset + match.start("expr")
                expressions[name] = self.executor.parse_at(statement, match.group("expr"), offset, ctx)
                if name not in order:
                    order.append(name)
            elif statement.head == "contract":
                expressions = {n: engine.contract_epsilon(e) for n, e in expressions.items()}
            elif statement.head == "id":
                rules = [self._parse_id(statement, ctx)]
                while position < len(queue) and queue[position].head == "id":
                    rules.append(self._parse_id(queue[position], ctx))
                    position += 1
                expressions = {n: engine.apply_id_rules(e, rules) for n, e in expressions.items()}
            elif statement.head == "print":
                printing = True

        sorted_expressions = {n: engine.normalize_components(expressions[n]) for n in order}
        for name, expr in sorted_expressions.items():
            ctx = ctx.with_named(name, expr)
        self.executor.notes.extend(engine.canonicalizer.diagnostics)
        output = ""
        if printing:
            output = "\n".join(render_listing(n, sorted_expressions[n], session.render) for n in order)
        session = replace(session, ctx=ctx, pending=(), locals=tuple(order),
                          last_label=order[-1] if order else session.last_label)
        return session, output


def execute_statement(session: Session, statement: Statement) -> Session:
    """Execute one statement; classification happens here when needed."""
    if statement.kind is None:
        statement = classify(statement)
    return StatementExecutor(session, statement).run()


def _flush(session: Session) -> Session:
    if not session.pending:
        return session
    end = Statement(".sort", "", 0, 0, StatementKind.DIRECTIVE, head=".sort")
    return execute_statement(session, end)


def run_script(source: str, session: Optional[Session] = None) -> Transcript:
    """
    Execute a whole script.

    Args:
        source: script text
        session: starting session (width, dimension, format); a fresh one by default

    Returns:
        Transcript with status 0, 1 (parse error, with line/column) or
        2 (evaluation error, with the 1-based statement index)
    """
    session = session or Session()
    start = len(session.transcript)
    try:
        statements = split_statements(source).statements
    except ParseError as exc:
        return Transcript((), 1, str(exc), exc.line, exc.column)

    for index, statement in enumerate(statements, start=1):
        try:
            session = execute_statement(session, statement)
        except ParseError as exc:
            if exc.line is None:
                exc = exc.located(*statement.locate(exc.position))
            return Transcript(session.transcript[start:], 1, str(exc), exc.line, exc.column, index)
        except TcasError as exc:
            message = f"statement {index} (line {statement.line}): {exc}"
            return Transcript(session.transcript[start:], exc.exit_code, message, statement.line, None, index)
        if session.finished:
            break
    try:
        session = _flush(session)
    except TcasError as exc:
        return Transcript(session.transcript[start:], exc.exit_code, str(exc), None, None, len(statements))
    return Transcript(session.transcript[start:], 0)


META_COMMANDS = (":show", ":ctx", ":quit")


def repl_step(session: Session, line: str) -> Tuple[Session, str]:
    """
    Feed one input line to an interactive session.

    Incomplete statements are buffered. On error the diagnostic is returned
    and the session is left exactly as it was.
    """
    stripped = line.strip()
    if stripped.startswith(":") and not session.buffer.strip():
        return _meta(session, stripped)
    try:
        split = split_statements(session.buffer + line + "\n", final=False)
        current = replace(session, mode="repl")
        outputs = []
        for statement in split.statements:
            current = execute_statement(current, statement)
            if current.transcript[-1].output:
                outputs.append(current.transcript[-1].output)
            if current.finished:
                break
        return replace(current, buffer=split.remainder), "\n".join(outputs)
    except TcasError as exc:
        return session, f"error: {exc}"


def _meta(session: Session, command: str) -> Tuple[Session, str]:
    word, _, argument = command.partition(" ")
    if word == ":quit":
        return replace(session, finished=True), ""
    if word == ":ctx":
        return session, "\n".join(session.ctx.describe())
    if word == ":show":
        try:
            return session, session.show(argument.strip())
        except TcasError as exc:
            return session, f"error: {exc}"
    return session, f"error: unknown command '{word}', expected one of {', '.join(META_COMMANDS)}"
