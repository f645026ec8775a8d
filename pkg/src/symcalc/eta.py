"""Eta expansion and contraction, and the eta-equality used by the checkers.

Two terms are eta-equal when their contracted normal forms are alpha-equal.
Contraction recognises exactly the two eta shapes, nothing smarter.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .core import (
    Binding,
    Call,
    Context,
    Cut,
    Done,
    Match,
    MatchCase,
    Mu,
    Polarity,
    Program,
    Var,
    alpha_equal,
    free_vars,
    identity_substitution,
)
from .modes import StrategyMode
from .typecheck import TypeCheckError, infer_expression

Path = tuple[int, ...]


class EtaError(ValueError):
    pass


@dataclass(frozen=True)
class EtaStep:
    direction: str  # "expand" | "contract"
    path: Path
    type_name: str
    polarity: Polarity


def eta_expand(program: Program, e, type_name: str) -> Match:
    """match T { X(D) => X(id) >> e } for data T, match T { X(D) => e >> X(id) } for codata."""
    decl = program.types.get(type_name)
    if decl is None:
        raise EtaError(f"unknown type {type_name!r}")
    fv = free_vars(e)
    cases = []
    for sig in decl.xtors:
        clash = fv & {b.name for b in sig.params}
        if clash:
            raise EtaError(
                f"binder(s) {', '.join(sorted(clash))} of {sig.name} occur free in the expression"
            )
        x = Call(sig.name, identity_substitution(sig.params))
        body = Cut(x, e) if decl.polarity is Polarity.DATA else Cut(e, x)
        cases.append(MatchCase(sig.name, sig.params, body))
    return Match(decl.polarity, type_name, tuple(cases))


def eta_contract(e):
    """The inner expression if `e` is an eta-redex, else None."""
    if not isinstance(e, Match) or not e.cases:
        return None
    inner = None
    for case in e.cases:
        body = case.body
        if not isinstance(body, Cut):
            return None
        if e.polarity is Polarity.DATA:
            xtor_side, rest = body.producer, body.consumer
        else:
            xtor_side, rest = body.consumer, body.producer
        if xtor_side != Call(case.xtor, identity_substitution(case.binders)):
            return None
        if free_vars(rest) & {b.name for b in case.binders}:
            return None
        if inner is None:
            inner = rest
        elif rest != inner:
            return None
    return inner


def eta_normalize(node):
    """Contract every eta-redex, innermost first."""
    match node:
        case Var() | Done():
            return node
        case Call(_, args):
            return replace(node, args=tuple(eta_normalize(a) for a in args))
        case Match(_, _, cases):
            node = replace(node, cases=tuple(replace(c, body=eta_normalize(c.body)) for c in cases))
            inner = eta_contract(node)
            return node if inner is None else inner
        case Mu(body=body):
            return replace(node, body=eta_normalize(body))
        case Cut(p, k):
            return replace(node, producer=eta_normalize(p), consumer=eta_normalize(k))
    raise TypeError(f"not a term: {node!r}")


def eta_equal(a, b) -> bool:
    return alpha_equal(eta_normalize(a), eta_normalize(b))


# ---------------------------------------------------------------------------
# positions inside a command


def positions(node, gamma: Context = (), path: Path = ()):
    """Yield (path, expression, context) for every expression below `node`.

    Path steps: cut 0/1 for producer/consumer, call i for argument i,
    match i for the body of case i, mu 0 for its body.
    """
    match node:
        case Cut(p, k):
            yield from positions(p, gamma, path + (0,))
            yield from positions(k, gamma, path + (1,))
            return
        case Done():
            return
    yield path, node, gamma
    match node:
        case Call(_, args):
            for i, a in enumerate(args):
                yield from positions(a, gamma, path + (i,))
        case Match(_, _, cases):
            for i, c in enumerate(cases):
                yield from positions(c.body, gamma + c.binders, path + (i,))
        case Mu(var, orientation, type_name, body):
            yield from positions(body, gamma + (Binding(var, orientation, type_name),), path + (0,))


def replace_at(node, path: Path, new):
    if not path:
        return new
    head, rest = path[0], path[1:]
    match node:
        case Cut(p, k):
            if head == 0:
                return replace(node, producer=replace_at(p, rest, new))
            return replace(node, consumer=replace_at(k, rest, new))
        case Call(_, args):
            args = list(args)
            args[head] = replace_at(args[head], rest, new)
            return replace(node, args=tuple(args))
        case Match(_, _, cases):
            cases = list(cases)
            cases[head] = replace(cases[head], body=replace_at(cases[head].body, rest, new))
            return replace(node, cases=tuple(cases))
        case Mu(body=body):
            return replace(node, body=replace_at(body, rest, new))
    raise ValueError(f"bad path {path} into {node!r}")


def expandable(program: Program, command, mode: StrategyMode = StrategyMode.POLAR):
    """Every (path, expression, type name) where an eta expansion is allowed."""
    out = []
    for path, e, gamma in positions(command):
        try:
            j = infer_expression(program, mode, gamma, e)
        except TypeCheckError:
            continue
        decl = program.types[j.type_name]
        # the expansion cuts e against the xtors, so e must sit opposite them
        if j.orientation is decl.polarity.val:
            continue
        names = {b.name for x in decl.xtors for b in x.params}
        if names & free_vars(e):
            continue
        out.append((path, e, j.type_name))
    return out


def expand_at(program: Program, command, path: Path, type_name: str):
    target = dict((p, e) for p, e, _ in positions(command))[path]
    new = eta_expand(program, target, type_name)
    step = EtaStep("expand", path, type_name, program.types[type_name].polarity)
    return replace_at(command, path, new), step


def contract_at(program: Program, command, path: Path):
    target = dict((p, e) for p, e, _ in positions(command))[path]
    inner = eta_contract(target)
    if inner is None:
        raise EtaError(f"no eta-redex at {path}")
    step = EtaStep("contract", path, target.type_name, target.polarity)
    return replace_at(command, path, inner), step

