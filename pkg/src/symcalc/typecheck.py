"""Typing rules for expressions, substitutions, commands and programs.

All judgements are parameterized by a StrategyMode, because an argument may
only be passed when it is substitutable under the active evaluation order.

Binders inside a term (mu binders, local case binders) may shadow enclosing
variables.  A function's parameters and the binders of its own cases must be
disjoint, and no single context may bind a name twice.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import (
    Binding,
    Call,
    Context,
    Cut,
    Done,
    Match,
    MatchCase,
    Mu,
    Orientation,
    Program,
    Var,
)
from .diagnostics import UNKNOWN_SPAN, Diagnostic, SourceSpan
from .modes import StrategyMode, is_substitutable


@dataclass(frozen=True)
class TypeJudgement:
    orientation: Orientation
    type_name: str

    def __str__(self):
        return f"{self.orientation.value} {self.type_name}"


class TypeCheckError(Exception):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.diagnostic = Diagnostic("error", message, span or UNKNOWN_SPAN)
        super().__init__(self.diagnostic.render())


def _span(node, fallback=None):
    return getattr(node, "span", None) or fallback


def check_context(program: Program, context: Context, span=None) -> None:
    seen = set()
    for b in context:
        if b.name in seen:
            raise TypeCheckError(f"duplicate binder {b.name!r} in context", span)
        seen.add(b.name)
        if b.type_name not in program.types:
            raise TypeCheckError(f"unknown type {b.type_name!r} for binder {b.name!r}", span)


def check_substitution(
    program: Program, mode: StrategyMode, gamma: Context, subst, delta: Context, span=None
) -> None:
    if len(subst) != len(delta):
        raise TypeCheckError(
            f"expected {len(delta)} arguments, got {len(subst)}", span
        )
    for e, b in zip(subst, delta):
        j = infer_expression(program, mode, gamma, e)
        want = TypeJudgement(b.orientation, b.type_name)
        if j != want:
            raise TypeCheckError(
                f"argument for {b.name!r} has type {j}, expected {want}", _span(e, span)
            )
        if not is_substitutable(program, mode, e):
            raise TypeCheckError(
                f"argument for {b.name!r} is not substitutable under {mode.value} evaluation",
                _span(e, span),
            )


def infer_expression(program: Program, mode: StrategyMode, gamma: Context, e, span=None) -> TypeJudgement:
    span = _span(e, span)
    match e:
        case Var(name):
            for b in reversed(gamma):
                if b.name == name:
                    return TypeJudgement(b.orientation, b.type_name)
            raise TypeCheckError(f"unbound variable {name!r}", span)
        case Call(name, args):
            if name in program.xtors:
                decl, sig = program.xtors[name]
                check_substitution(program, mode, gamma, args, sig.params, span)
                return TypeJudgement(decl.polarity.val, decl.name)
            if name in program.functions:
                decl, fun = program.functions[name]
                check_substitution(program, mode, gamma, args, fun.params, span)
                return TypeJudgement(decl.polarity.cnt, decl.name)
            raise TypeCheckError(f"unknown xtor or function {name!r}", span)
        case Match(polarity, type_name, cases):
            decl = program.types.get(type_name)
            if decl is None:
                raise TypeCheckError(f"match on unknown type {type_name!r}", span)
            if polarity is not decl.polarity:
                raise TypeCheckError(
                    f"match declared {polarity.value} but {type_name} is {decl.polarity.value}",
                    span,
                )
            _check_coverage(decl, cases, span)
            for case in cases:
                check_case(program, mode, gamma, case, span)
            return TypeJudgement(polarity.cnt, type_name)
        case Mu(var, orientation, type_name, body):
            if type_name not in program.types:
                raise TypeCheckError(f"unknown type {type_name!r} on mu binder {var!r}", span)
            check_command(program, mode, gamma + (Binding(var, orientation, type_name),), body, span)
            return TypeJudgement(orientation.flip(), type_name)
    raise TypeCheckError(f"not an expression: {e!r}", span)


def _check_coverage(decl, cases, span) -> None:
    counts = Counter(c.xtor for c in cases)
    dupes = sorted(x for x, n in counts.items() if n > 1)
    if dupes:
        raise TypeCheckError(f"duplicate case(s) {', '.join(dupes)} in match on {decl.name}", span)
    declared = [x.name for x in decl.xtors]
    extra = sorted(set(counts) - set(declared))
    if extra:
        raise TypeCheckError(f"{', '.join(extra)} not xtor(s) of {decl.name}", span)
    missing = [x for x in declared if x not in counts]
    if missing:
        raise TypeCheckError(
            f"non-exhaustive match on {decl.name}: missing {', '.join(missing)}", span
        )


def check_case(program: Program, mode: StrategyMode, gamma: Context, case: MatchCase, span=None) -> None:
    span = _span(case, span)
    params = program.xtors[case.xtor][1].params
    if tuple(case.binders) != tuple(params):
        raise TypeCheckError(
            f"case {case.xtor} must bind exactly ({', '.join(b.name for b in params)})", span
        )
    check_context(program, case.binders, span)
    check_command(program, mode, gamma + case.binders, case.body, span)


def _check_function_case(program, mode, params: Context, case: MatchCase, span) -> None:
    clash = {b.name for b in params} & {b.name for b in case.binders}
    if clash:
        raise TypeCheckError(
            f"case {case.xtor} rebinds parameter(s) {', '.join(sorted(clash))}", _span(case, span)
        )
    check_case(program, mode, params, case, span)


def check_command(program: Program, mode: StrategyMode, gamma: Context, c, span=None) -> None:
    span = _span(c, span)
    match c:
        case Done():
            return
        case Cut(left, right):
            lj = infer_expression(program, mode, gamma, left, span)
            rj = infer_expression(program, mode, gamma, right, span)
            if lj.orientation is not Orientation.PRD:
                raise TypeCheckError(f"left side of cut is a consumer ({lj})", _span(left, span))
            if rj.orientation is not Orientation.CON:
                raise TypeCheckError(f"right side of cut is a producer ({rj})", _span(right, span))
            if lj.type_name != rj.type_name:
                raise TypeCheckError(
                    f"cut between different types {lj.type_name} and {rj.type_name}", span
                )
            return
    raise TypeCheckError(f"not a command: {c!r}", span)


def check_program(program: Program, mode: StrategyMode = StrategyMode.NOMINAL) -> list[Diagnostic]:
    """Well-formedness of a whole program; returns every diagnostic found."""
    errors: list[Diagnostic] = []

    def attempt(fn, *args):
        try:
            fn(*args)
        except TypeCheckError as exc:
            errors.append(exc.diagnostic)
            return False
        return True

    type_names = Counter(d.name for d in program.declarations)
    term_names = Counter(
        x.name for d in program.declarations for x in (*d.xtors, *d.functions)
    )
    for name, n in type_names.items():
        if n > 1:
            errors.append(Diagnostic("error", f"duplicate type name {name!r}", program.span or UNKNOWN_SPAN))
    for name, n in term_names.items():
        if n > 1:
            errors.append(
                Diagnostic("error", f"duplicate xtor/function name {name!r}", program.span or UNKNOWN_SPAN)
            )
    if errors:
        return errors

    for decl in program.declarations:
        for sig in decl.xtors:
            attempt(check_context, program, sig.params, sig.span or decl.span)
        for fun in decl.functions:
            span = fun.span or decl.span
            if fun.type_name != decl.name:
                errors.append(Diagnostic(
                    "error",
                    f"function {fun.name} is declared in {decl.name} but matches on {fun.type_name}",
                    span or UNKNOWN_SPAN,
                ))
                continue
            if not attempt(check_context, program, fun.params, span):
                continue
            body = fun.body
            if fun.polarity is not decl.polarity:
                errors.append(Diagnostic(
                    "error",
                    f"match declared {fun.polarity.value} but {decl.name} is {decl.polarity.value}",
                    span or UNKNOWN_SPAN,
                ))
                continue
            if not attempt(_check_coverage, decl, body.cases, span):
                continue
            for case in fun.cases:
                attempt(_check_function_case, program, mode, fun.params, case, span)
    attempt(check_command, program, mode, (), program.main, program.main.span)
    return errors
