"""Changing the evaluation order of one type through shift types.

`evaltrans` retargets a type's strategy and threads every use of it through a
shift wrapper that keeps the old strategy, so the program's behaviour is
unchanged up to administrative steps.  Going around the square twice leaves
double shifts behind; `remove_double_shifts` cleans them up.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

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
    Polarity,
    Program,
    Strategy,
    TypeDeclaration,
    Var,
    XtorSig,
    alpha_equal,
    bound_names,
    free_vars,
    fresh_name,
    program_commands,
    subterms,
)
from .polarity import TransformError, TransformReport, xfun

_WRAPPER_SHAPE = {
    # wrapper strategy -> (polarity, binder orientation, type prefix, xtor prefix)
    Strategy.CBV: (Polarity.DATA, Orientation.PRD, "Down", "CBV"),
    Strategy.CBN: (Polarity.CODATA, Orientation.CON, "Up", "CBN"),
}


@dataclass(frozen=True)
class ShiftSpec:
    type_name: str
    wrapper: Strategy
    shift_type: str
    xtor: str
    binder: str = "x"

    @property
    def polarity(self) -> Polarity:
        return _WRAPPER_SHAPE[self.wrapper][0]

    @property
    def orientation(self) -> Orientation:
        return _WRAPPER_SHAPE[self.wrapper][1]

    def declaration(self) -> TypeDeclaration:
        param = Binding(self.binder, self.orientation, self.type_name)
        return TypeDeclaration(self.wrapper, self.polarity, self.shift_type, (XtorSig(self.xtor, (param,)),))


def _shift_spec_of(decl: TypeDeclaration) -> ShiftSpec | None:
    """Read a declaration back as a shift wrapper, if it has the exact shape."""
    if decl.functions or len(decl.xtors) != 1 or len(decl.xtors[0].params) != 1:
        return None
    polarity, orientation, _, _ = _WRAPPER_SHAPE[decl.strategy]
    param = decl.xtors[0].params[0]
    if decl.polarity is not polarity or param.orientation is not orientation:
        return None
    return ShiftSpec(param.type_name, decl.strategy, decl.name, decl.xtors[0].name, param.name)


def _fresh_spec(program: Program, type_name: str, wrapper: Strategy) -> ShiftSpec:
    _, _, type_prefix, xtor_prefix = _WRAPPER_SHAPE[wrapper]
    taken = set(program.types) | set(program.xtors) | set(program.functions)
    base_type, base_xtor = f"{type_prefix}_{type_name}", f"{xtor_prefix}_{type_name}"
    shift_type, xtor, i = base_type, base_xtor, 0
    while shift_type in taken or xtor in taken:
        i += 1
        shift_type, xtor = f"{base_type}_{i}", f"{base_xtor}_{i}"
    binder = fresh_name("x", bound_names(program))
    return ShiftSpec(type_name, wrapper, shift_type, xtor, binder)


def _insert_after(program: Program, anchor: str, decl: TypeDeclaration) -> Program:
    decls = []
    for d in program.declarations:
        decls.append(d)
        if d.name == anchor:
            decls.append(decl)
    return replace(program, declarations=tuple(decls))


def declare_shift(program: Program, type_name: str, wrapper: Strategy) -> tuple[Program, ShiftSpec]:
    """Add the shift wrapper for `type_name`, reusing an identical existing one."""
    if type_name not in program.types:
        raise TransformError(f"unknown type {type_name!r}")
    for d in program.declarations:
        spec = _shift_spec_of(d)
        if spec and spec.type_name == type_name and spec.wrapper is wrapper:
            return program, spec
    spec = _fresh_spec(program, type_name, wrapper)
    return _insert_after(program, type_name, spec.declaration()), spec


def wrap_shift(e, orientation: Orientation, spec: ShiftSpec):
    """Embed `e` (of `orientation` at the shifted type) into the shift type."""
    b = spec.binder
    match orientation, spec.wrapper:
        case Orientation.PRD, Strategy.CBV:
            return Call(spec.xtor, (e,))
        case Orientation.CON, Strategy.CBN:
            return Call(spec.xtor, (e,))
        case Orientation.CON, Strategy.CBV:
            binders = (Binding(b, Orientation.PRD, spec.type_name),)
            return Match(Polarity.DATA, spec.shift_type, (MatchCase(spec.xtor, binders, Cut(Var(b), e)),))
        case Orientation.PRD, Strategy.CBN:
            binders = (Binding(b, Orientation.CON, spec.type_name),)
            return Match(Polarity.CODATA, spec.shift_type, (MatchCase(spec.xtor, binders, Cut(e, Var(b))),))
    raise ValueError(f"bad shift request {orientation}, {spec.wrapper}")


# ---------------------------------------------------------------------------
# generic declaration/term rewriting


class _Rewriter:
    """Bottom-up rewrite of every context, expression and command of a program."""

    def context(self, ctx: Context) -> Context:
        return ctx

    def expression(self, e):
        return e

    def mu_type(self, type_name: str) -> str:
        return type_name

    def term(self, node):
        match node:
            case Var():
                return self.expression(node)
            case Call(_, args):
                return self.expression(replace(node, args=tuple(self.term(a) for a in args)))
            case Match(_, _, cases):
                return self.expression(replace(node, cases=self.cases(cases)))
            case Mu(_, _, type_name, body):
                return self.expression(replace(node, type_name=self.mu_type(type_name), body=self.term(body)))
            case Cut(p, k):
                return replace(node, producer=self.term(p), consumer=self.term(k))
            case Done():
                return node
        raise TypeError(f"not a term: {node!r}")

    def cases(self, cases):
        return tuple(replace(c, binders=self.context(c.binders), body=self.term(c.body)) for c in cases)

    def declaration(self, d: TypeDeclaration) -> TypeDeclaration:
        xtors = tuple(replace(x, params=self.context(x.params)) for x in d.xtors)
        functions = tuple(
            replace(f, params=self.context(f.params), cases=self.cases(f.cases)) for f in d.functions
        )
        return replace(d, xtors=xtors, functions=functions)

    def program(self, program: Program) -> Program:
        return replace(
            program,
            declarations=tuple(self.declaration(d) for d in program.declarations),
            main=self.term(program.main),
        )


class _EvalTrans(_Rewriter):
    def __init__(self, program: Program, decl: TypeDeclaration, spec: ShiftSpec):
        self.decl = decl
        self.spec = spec
        self.xtors = {x.name for x in decl.xtors}
        self.functions = {f.name for f in decl.functions}

    def context(self, ctx):
        t = self.decl.name
        return tuple(b._replace(type_name=self.spec.shift_type) if b.type_name == t else b for b in ctx)

    def mu_type(self, type_name):
        return self.spec.shift_type if type_name == self.decl.name else type_name

    def expression(self, e):
        p = self.decl.polarity
        match e:
            case Call(name) if name in self.xtors:
                return wrap_shift(e, p.val, self.spec)
            case Call(name) if name in self.functions:
                return wrap_shift(e, p.cnt, self.spec)
            case Match(_, type_name) if type_name == self.decl.name:
                return wrap_shift(e, p.cnt, self.spec)
        return e


def evaltrans(program: Program, type_name: str, target: Strategy) -> Program:
    """Switch `type_name` to strategy `target`; it must currently use the other one."""
    decl = program.types.get(type_name)
    if decl is None:
        raise TransformError(f"unknown type {type_name!r}")
    if decl.strategy is target:
        raise TransformError(f"{type_name} is already {target.value}; evaltrans only flips strategies")
    # always a fresh wrapper: an older one for the same type is itself rewritten below
    spec = _fresh_spec(program, type_name, decl.strategy)
    out = _EvalTrans(program, decl, spec).program(program)
    out = out.replace_declaration(replace(out.types[type_name], strategy=target))
    return _insert_after(out, type_name, spec.declaration())


# ---------------------------------------------------------------------------
# double-shift removal


class DoubleShiftError(TransformError):
    pass


def find_double_shift(program: Program, type_name: str) -> tuple[ShiftSpec, ShiftSpec] | None:
    """(outer, inner) wrappers with outer wrapping inner wrapping `type_name`."""
    specs = {d.name: s for d in program.declarations if (s := _shift_spec_of(d))}
    for outer in specs.values():
        inner = specs.get(outer.type_name)
        if inner and inner.type_name == type_name and inner.wrapper is not outer.wrapper:
            return outer, inner
    return None


def _single_case(e, polarity, type_name, xtor):
    if (
        isinstance(e, Match) and e.polarity is polarity and e.type_name == type_name
        and len(e.cases) == 1 and e.cases[0].xtor == xtor and len(e.cases[0].binders) == 1
    ):
        return e.cases[0].binders[0].name, e.cases[0].body
    return None


def _unary_call(e, xtor):
    if isinstance(e, Call) and e.name == xtor and len(e.args) == 1:
        return e.args[0]
    return None


class _Collapse(_Rewriter):
    def __init__(self, type_name: str, outer: ShiftSpec, inner: ShiftSpec):
        self.t, self.outer, self.inner = type_name, outer, inner

    def context(self, ctx):
        return tuple(b._replace(type_name=self.t) if b.type_name == self.outer.shift_type else b for b in ctx)

    def mu_type(self, type_name):
        return self.t if type_name == self.outer.shift_type else type_name

    def expression(self, e):
        o, i = self.outer, self.inner
        # The wrapper binder must not occur in the payload, or it was not a wrapper.
        if o.wrapper is Strategy.CBV:
            # CBV_o(match Up_i { CBN_i(k) => e >> k })
            if (arg := _unary_call(e, o.xtor)) is not None:
                hit = _single_case(arg, Polarity.CODATA, i.shift_type, i.xtor)
                if hit and isinstance(hit[1], Cut) and hit[1].consumer == Var(hit[0]) \
                        and hit[0] not in free_vars(hit[1].producer):
                    return hit[1].producer
            # match Down_o { CBV_o(x) => x >> CBN_i(e) }
            hit = _single_case(e, Polarity.DATA, o.shift_type, o.xtor)
            if hit and isinstance(hit[1], Cut) and hit[1].producer == Var(hit[0]):
                payload = _unary_call(hit[1].consumer, i.xtor)
                if payload is not None and hit[0] not in free_vars(payload):
                    return payload
        else:
            # CBN_o(match Down_i { CBV_i(x) => x >> e })
            if (arg := _unary_call(e, o.xtor)) is not None:
                hit = _single_case(arg, Polarity.DATA, i.shift_type, i.xtor)
                if hit and isinstance(hit[1], Cut) and hit[1].producer == Var(hit[0]) \
                        and hit[0] not in free_vars(hit[1].consumer):
                    return hit[1].consumer
            # match Up_o { CBN_o(k) => CBV_i(e) >> k }
            hit = _single_case(e, Polarity.CODATA, o.shift_type, o.xtor)
            if hit and isinstance(hit[1], Cut) and hit[1].consumer == Var(hit[0]):
                payload = _unary_call(hit[1].producer, i.xtor)
                if payload is not None and hit[0] not in free_vars(payload):
                    return payload
        return e


def _mentions(program: Program, names: set[str]) -> list[str]:
    found = []
    for d in program.declarations:
        for x in d.xtors:
            found += [f"signature of {x.name}" for b in x.params if b.type_name in names]
        for f in d.functions:
            found += [f"parameters of {f.name}" for b in f.params if b.type_name in names]
            for c in f.cases:
                found += [f"case {c.xtor} of {f.name}" for b in c.binders if b.type_name in names]
    for cmd in program_commands(program):
        for t in subterms(cmd):
            match t:
                case Call(name) if name in names:
                    found.append(f"call to {name}")
                case Match(_, type_name, cases):
                    if type_name in names:
                        found.append(f"match on {type_name}")
                    found += [f"case binder of {c.xtor}" for c in cases for b in c.binders if b.type_name in names]
                case Mu(var, _, type_name) if type_name in names:
                    found.append(f"mu binder {var}")
    return found


def remove_double_shifts(program: Program, type_name: str) -> Program:
    if type_name not in program.types:
        raise TransformError(f"unknown type {type_name!r}")
    pair = find_double_shift(program, type_name)
    if pair is None:
        return program
    outer, inner = pair
    collapsed = _Collapse(type_name, outer, inner).program(program)
    kept = tuple(d for d in collapsed.declarations if d.name not in (outer.shift_type, inner.shift_type))
    result = replace(collapsed, declarations=kept)
    leftovers = _mentions(result, {outer.shift_type, inner.shift_type, outer.xtor, inner.xtor})
    if leftovers:
        raise DoubleShiftError(
            f"double shift {outer.shift_type}/{inner.shift_type} occurs outside the round-trip "
            f"patterns: {', '.join(dict.fromkeys(leftovers))}"
        )
    return result


# ---------------------------------------------------------------------------
# pipelines


@dataclass(frozen=True)
class Stage:
    name: str
    type_name: str
    before: str
    after: str

    def __str__(self):
        return f"{self.name}: {self.type_name} {self.before} -> {self.after}"


@dataclass
class PipelineReport:
    stages: list[Stage] = field(default_factory=list)
    identical: bool | None = None

    def record(self, name: str, type_name: str, before: Program, after: Program):
        def corner(p):
            d = p.types[type_name]
            return f"{d.strategy.value} {d.polarity.value}"

        self.stages.append(Stage(name, type_name, corner(before), corner(after)))

    def __str__(self):
        return "\n".join(str(s) for s in self.stages)


def _xfun_stage(program, type_name, report):
    out, rep = xfun(program, type_name)
    report.record("refunc" if rep.old_polarity is Polarity.DATA else "defunc", type_name, program, out)
    return out


def _shift_stage(program, type_name, target, report):
    out = evaltrans(program, type_name, target)
    report.record(f"shift-{target.value}", type_name, program, out)
    return out


def full_refunc(program: Program, type_name: str) -> tuple[Program, PipelineReport]:
    decl = program.types.get(type_name)
    if decl is None or (decl.strategy, decl.polarity) != (Strategy.CBV, Polarity.DATA):
        raise TransformError(f"full refunctionalization needs a cbv data type, {type_name} is not one")
    report = PipelineReport()
    out = _xfun_stage(program, type_name, report)
    return _shift_stage(out, type_name, Strategy.CBN, report), report


def full_defunc(program: Program, type_name: str) -> tuple[Program, PipelineReport]:
    decl = program.types.get(type_name)
    if decl is None or (decl.strategy, decl.polarity) != (Strategy.CBN, Polarity.CODATA):
        raise TransformError(f"full defunctionalization needs a cbn codata type, {type_name} is not one")
    report = PipelineReport()
    out = _xfun_stage(program, type_name, report)
    return _shift_stage(out, type_name, Strategy.CBV, report), report


def roundtrip(program: Program, type_name: str) -> tuple[Program, PipelineReport]:
    """Go to the opposite corner and back, then remove the double shifts."""
    decl = program.types.get(type_name)
    if decl is None:
        raise TransformError(f"unknown type {type_name!r}")
    s0 = decl.strategy
    report = PipelineReport()
    p = _xfun_stage(program, type_name, report)
    p = _shift_stage(p, type_name, s0.flip(), report)
    p = _xfun_stage(p, type_name, report)
    p = _shift_stage(p, type_name, s0, report)
    before = p
    p = remove_double_shifts(p, type_name)
    report.record("simplify", type_name, before, p)
    report.identical = alpha_equal(p, program)
    return p, report


__all__ = [
    "DoubleShiftError",
    "PipelineReport",
    "ShiftSpec",
    "Stage",
    "TransformError",
    "TransformReport",
    "declare_shift",
    "evaltrans",
    "find_double_shift",
    "full_defunc",
    "full_refunc",
    "remove_double_shifts",
    "roundtrip",
    "wrap_shift",
]
