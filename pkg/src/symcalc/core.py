"""Abstract syntax of the symmetric data/codata calculus.

Programs are immutable trees of frozen dataclasses.  Source spans ride along
on every node but are excluded from equality, so two trees built from
different text (or by a transformation) compare equal when their structure
does.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Union

from .diagnostics import SourceSpan


class Polarity(enum.Enum):
    DATA = "data"
    CODATA = "codata"

    def flip(self) -> Polarity:
        return Polarity.CODATA if self is Polarity.DATA else Polarity.DATA

    @property
    def val(self) -> Orientation:
        """Orientation of the canonical terms (the xtors) of this polarity."""
        return Orientation.PRD if self is Polarity.DATA else Orientation.CON

    @property
    def cnt(self) -> Orientation:
        """Orientation of matches and function calls of this polarity."""
        return self.val.flip()


class Strategy(enum.Enum):
    CBV = "cbv"
    CBN = "cbn"

    def flip(self) -> Strategy:
        return Strategy.CBN if self is Strategy.CBV else Strategy.CBV


class Orientation(enum.Enum):
    PRD = "prd"
    CON = "con"

    def flip(self) -> Orientation:
        return Orientation.CON if self is Orientation.PRD else Orientation.PRD


class Binding(NamedTuple):
    name: str
    orientation: Orientation
    type_name: str


Context = tuple[Binding, ...]

_SPAN = dict(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Var:
    name: str
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class Call:
    """An xtor or function applied to a substitution.

    Whether `name` is an xtor or a function is decided by program lookup only.
    """

    name: str
    args: tuple[Expression, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class MatchCase:
    xtor: str
    binders: Context
    body: Command
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class Match:
    polarity: Polarity
    type_name: str
    cases: tuple[MatchCase, ...]
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class Mu:
    """mu(x: o T) => c.  Binds a variable of orientation `orientation`, so the
    abstraction itself has the flipped orientation."""

    var: str
    orientation: Orientation
    type_name: str
    body: Command
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class Cut:
    producer: Expression
    consumer: Expression
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class Done:
    span: SourceSpan | None = field(**_SPAN)


Expression = Union[Var, Call, Match, Mu]
Command = Union[Cut, Done]
Substitution = tuple[Expression, ...]


@dataclass(frozen=True)
class XtorSig:
    name: str
    params: Context = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class FunctionDeclaration:
    name: str
    params: Context
    polarity: Polarity
    type_name: str
    cases: tuple[MatchCase, ...]
    span: SourceSpan | None = field(**_SPAN)

    @property
    def body(self) -> Match:
        return Match(self.polarity, self.type_name, self.cases, span=self.span)

    def case_for(self, xtor: str) -> MatchCase | None:
        for case in self.cases:
            if case.xtor == xtor:
                return case
        return None


@dataclass(frozen=True)
class TypeDeclaration:
    strategy: Strategy
    polarity: Polarity
    name: str
    xtors: tuple[XtorSig, ...] = ()
    functions: tuple[FunctionDeclaration, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True)
class Program:
    declarations: tuple[TypeDeclaration, ...] = ()
    main: Command = field(default_factory=Done)
    span: SourceSpan | None = field(**_SPAN)

    @cached_property
    def types(self) -> dict[str, TypeDeclaration]:
        return {d.name: d for d in self.declarations}

    @cached_property
    def xtors(self) -> dict[str, tuple[TypeDeclaration, XtorSig]]:
        return {x.name: (d, x) for d in self.declarations for x in d.xtors}

    @cached_property
    def functions(self) -> dict[str, tuple[TypeDeclaration, FunctionDeclaration]]:
        return {f.name: (d, f) for d in self.declarations for f in d.functions}

    def replace_declaration(self, decl: TypeDeclaration) -> Program:
        decls = tuple(decl if d.name == decl.name else d for d in self.declarations)
        return replace(self, declarations=decls)


class NameLookupError(KeyError):
    def __str__(self):
        return self.args[0]


def lookup_type(program: Program, name: str) -> TypeDeclaration:
    try:
        return program.types[name]
    except KeyError:
        raise NameLookupError(f"unknown type name {name!r}") from None


def lookup_xtor(program: Program, name: str) -> tuple[str, Context]:
    """Resolve an xtor to (owning type name, declared parameter context)."""
    try:
        decl, sig = program.xtors[name]
    except KeyError:
        raise NameLookupError(f"{name!r} is not an xtor") from None
    return decl.name, sig.params


def lookup_fun(program: Program, name: str) -> FunctionDeclaration:
    try:
        return program.functions[name][1]
    except KeyError:
        raise NameLookupError(f"{name!r} is not a function") from None


def identity_substitution(context: Context) -> Substitution:
    return tuple(Var(b.name) for b in context)


# ---------------------------------------------------------------------------
# free variables and substitution


def free_vars(node: Expression | Command) -> frozenset[str]:
    match node:
        case Var(name):
            return frozenset((name,))
        case Call(_, args):
            return frozenset().union(*(free_vars(a) for a in args))
        case Match(_, _, cases):
            return frozenset().union(
                *(free_vars(c.body) - {b.name for b in c.binders} for c in cases)
            )
        case Mu(var, _, _, body):
            return free_vars(body) - {var}
        case Cut(p, c):
            return free_vars(p) | free_vars(c)
        case Done():
            return frozenset()
    raise TypeError(f"not a term: {node!r}")


def fresh_name(base: str, avoid) -> str:
    if base not in avoid:
        return base
    for i in itertools.count(1):
        candidate = f"{base}{i}"
        if candidate not in avoid:
            return candidate


def apply_substitution(command: Command, substitution: Substitution, context: Context) -> Command:
    """Simultaneously replace the variables of `context` by `substitution`."""
    if len(substitution) != len(context):
        raise ValueError(
            f"substitution has {len(substitution)} entries for a context of {len(context)}"
        )
    return substitute(command, {b.name: e for b, e in zip(context, substitution)})


def substitute(node, mapping: dict[str, Expression]):
    """Capture-avoiding simultaneous substitution on expressions and commands."""
    if not mapping:
        return node
    match node:
        case Var(name):
            return mapping.get(name, node)
        case Call(name, args):
            return replace(node, args=tuple(substitute(a, mapping) for a in args))
        case Match(_, _, cases):
            return replace(node, cases=tuple(_subst_case(c, mapping) for c in cases))
        case Mu(var, orientation, type_name, body):
            (var,), body = _under_binders((var,), body, mapping)
            return replace(node, var=var, body=body)
        case Cut(p, c):
            return replace(node, producer=substitute(p, mapping), consumer=substitute(c, mapping))
        case Done():
            return node
    raise TypeError(f"not a term: {node!r}")


def _subst_case(case: MatchCase, mapping) -> MatchCase:
    names = tuple(b.name for b in case.binders)
    new_names, body = _under_binders(names, case.body, mapping)
    binders = tuple(b._replace(name=n) for b, n in zip(case.binders, new_names))
    return replace(case, binders=binders, body=body)


def _under_binders(names, body, mapping):
    inner = {k: v for k, v in mapping.items() if k not in names}
    if not inner:
        return names, body
    body_fv = free_vars(body)
    inner = {k: v for k, v in inner.items() if k in body_fv}
    if not inner:
        return names, body
    incoming = frozenset().union(*(free_vars(v) for v in inner.values()))
    if not incoming.intersection(names):
        return names, substitute(body, inner)
    avoid = set(incoming) | body_fv | set(inner) | set(names)
    renamed = []
    for n in names:
        if n in incoming:
            new = fresh_name(n + "'", avoid)
            avoid.add(new)
            inner[n] = Var(new)
            renamed.append(new)
        else:
            renamed.append(n)
    return tuple(renamed), substitute(body, inner)


# ---------------------------------------------------------------------------
# alpha equivalence


def alpha_equal(a, b) -> bool:
    """Structural equality up to consistent renaming of bound variables.

    Works on expressions, commands and whole programs.  Declaration order and
    case order are significant; xtor signatures are compared by name since
    match cases must repeat them verbatim.
    """
    if type(a) is not type(b):
        return False
    if isinstance(a, Program):
        return (
            len(a.declarations) == len(b.declarations)
            and all(_canon_decl(x) == _canon_decl(y) for x, y in zip(a.declarations, b.declarations))
            and _canon(a.main, {}, itertools.count()) == _canon(b.main, {}, itertools.count())
        )
    return _canon(a, {}, itertools.count()) == _canon(b, {}, itertools.count())


def _canon_decl(decl: TypeDeclaration) -> TypeDeclaration:
    funcs = []
    for f in decl.functions:
        counter = itertools.count()
        env = {}
        params = []
        for b in f.params:
            env[b.name] = f"#{next(counter)}"
            params.append(b._replace(name=env[b.name]))
        cases = tuple(_canon_case(c, env, counter) for c in f.cases)
        funcs.append(replace(f, params=tuple(params), cases=cases))
    return replace(decl, functions=tuple(funcs))


def _canon_case(case: MatchCase, env, counter) -> MatchCase:
    env = dict(env)
    binders = []
    for b in case.binders:
        env[b.name] = f"#{next(counter)}"
        binders.append(b._replace(name=env[b.name]))
    return replace(case, binders=tuple(binders), body=_canon(case.body, env, counter))


def _canon(node, env, counter):
    match node:
        case Var(name):
            return Var(env.get(name, name))
        case Call(name, args):
            return Call(name, tuple(_canon(a, env, counter) for a in args))
        case Match(polarity, type_name, cases):
            return Match(polarity, type_name, tuple(_canon_case(c, env, counter) for c in cases))
        case Mu(var, orientation, type_name, body):
            fresh = f"#{next(counter)}"
            return Mu(fresh, orientation, type_name, _canon(body, {**env, var: fresh}, counter))
        case Cut(p, c):
            return Cut(_canon(p, env, counter), _canon(c, env, counter))
        case Done():
            return Done()
    raise TypeError(f"not a term: {node!r}")


# ---------------------------------------------------------------------------
# traversal helpers shared by the transformations


def program_commands(program: Program):
    """Yield every top-level command: function case bodies, then main."""
    for decl in program.declarations:
        for f in decl.functions:
            for case in f.cases:
                yield case.body
    yield program.main


def subterms(node):
    """Pre-order walk over all expressions and commands below `node`."""
    yield node
    match node:
        case Call(_, args):
            for a in args:
                yield from subterms(a)
        case Match(_, _, cases):
            for c in cases:
                yield from subterms(c.body)
        case Mu(body=body):
            yield from subterms(body)
        case Cut(p, c):
            yield from subterms(p)
            yield from subterms(c)


def bound_names(program: Program) -> set[str]:
    """Every variable name that occurs anywhere in the program."""
    names = set()
    for decl in program.declarations:
        for x in decl.xtors:
            names.update(b.name for b in x.params)
        for f in decl.functions:
            names.update(b.name for b in f.params)
            for case in f.cases:
                names.update(b.name for b in case.binders)
    for cmd in program_commands(program):
        for t in subterms(cmd):
            match t:
                case Var(name):
                    names.add(name)
                case Mu(var=var):
                    names.add(var)
                case Match(cases=cases):
                    for c in cases:
                        names.update(b.name for b in c.binders)
    return names
