"""Canonical pretty-printer.  Output re-parses to an alpha-equal program."""
from __future__ import annotations

from .core import (
    Call,
    Context,
    Cut,
    Done,
    FunctionDeclaration,
    Match,
    MatchCase,
    Mu,
    Program,
    TypeDeclaration,
    Var,
    XtorSig,
)


def _context(ctx: Context) -> str:
    if not ctx:
        return ""
    inner = ", ".join(f"{b.name}: {b.orientation.value} {b.type_name}" for b in ctx)
    return f"({inner})"


def print_expression(e, scope: frozenset[str] = frozenset()) -> str:
    match e:
        case Var(name):
            return name
        case Call(name, args):
            if args:
                return f"{name}({', '.join(print_expression(a, scope) for a in args)})"
            # a bare name would re-parse as the shadowing variable
            return f"{name}()" if name in scope else name
        case Match(_, type_name, cases):
            if not cases:
                return f"match {type_name} {{}}"
            body = "; ".join(_case(c, scope) for c in cases)
            return f"match {type_name} {{ {body} }}"
        case Mu(var, orientation, type_name, body):
            return f"mu({var}: {orientation.value} {type_name}) => {print_command(body, scope | {var})}"
    raise TypeError(f"not an expression: {e!r}")


def print_command(c, scope: frozenset[str] = frozenset()) -> str:
    match c:
        case Done():
            return "Done"
        case Cut(p, k):
            return f"{print_expression(p, scope)} >> {print_expression(k, scope)}"
    raise TypeError(f"not a command: {c!r}")


def _case(case: MatchCase, scope) -> str:
    names = [b.name for b in case.binders]
    head = f"{case.xtor}({', '.join(names)})" if names else case.xtor
    return f"{head} => {print_command(case.body, scope | set(names))}"


def _xtor(sig: XtorSig) -> str:
    return sig.name + _context(sig.params)


def _function(f: FunctionDeclaration) -> list[str]:
    scope = frozenset(b.name for b in f.params)
    head = f"  {f.name}{_context(f.params)} := match {f.type_name}"
    if not f.cases:
        return [head + " {}"]
    lines = [head + " {"]
    for i, case in enumerate(f.cases):
        sep = ";" if i < len(f.cases) - 1 else ""
        lines.append(f"    {_case(case, scope)}{sep}")
    lines.append("  }")
    return lines


def print_declaration(d: TypeDeclaration) -> str:
    head = f"{d.strategy.value} {d.polarity.value} type {d.name}"
    if not d.xtors:
        lines = [head + " {}"]
        if d.functions:
            lines[0] += " with"
    else:
        lines = [head + " {"]
        for i, sig in enumerate(d.xtors):
            sep = ";" if i < len(d.xtors) - 1 else ""
            lines.append(f"  {_xtor(sig)}{sep}")
        lines.append("} with" if d.functions else "}")
    for f in d.functions:
        lines.extend(_function(f))
    return "\n".join(lines)


def pretty_print(program: Program) -> str:
    blocks = [print_declaration(d) for d in program.declarations]
    blocks.append(f"main := {print_command(program.main)}")
    return "\n\n".join(blocks) + "\n"
