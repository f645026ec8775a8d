"""Random well-formed programs for the property harness.

Types are T0..Tn; T0 is the pivot and never has a local match, so it can be
de/refunctionalized.  Every name is globally unique: xtors K*, functions f*,
xtor parameters a*, function parameters p*, mu binders v*.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .core import (
    Binding,
    Call,
    Context,
    Cut,
    Done,
    FunctionDeclaration,
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
)
from .modes import StrategyMode, effective_strategy
from .typecheck import check_program

PIVOT = "T0"


@dataclass(frozen=True)
class GeneratorConfig:
    max_declarations: int = 3
    max_xtors: int = 3
    max_depth: int = 4
    seed: int = 0
    mode: StrategyMode = StrategyMode.NOMINAL

    def __post_init__(self):
        for name in ("max_declarations", "max_xtors", "max_depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


class _Gen:
    def __init__(self, config: GeneratorConfig, rng: random.Random):
        self.cfg = config
        self.rng = rng
        self.counters: dict[str, int] = {}
        self.program: Program | None = None

    def fresh(self, prefix: str) -> str:
        n = self.counters.get(prefix, 0)
        self.counters[prefix] = n + 1
        return f"{prefix}{n}"

    # -- signatures ----------------------------------------------------------

    def context(self, prefix: str, type_names: list[str]) -> Context:
        n = self.rng.randint(0, min(2, self.cfg.max_depth - 1))
        return tuple(
            Binding(self.fresh(prefix), self.rng.choice(list(Orientation)), self.rng.choice(type_names))
            for _ in range(n)
        )

    def skeleton(self) -> list[TypeDeclaration]:
        cfg, rng = self.cfg, self.rng
        names = [f"T{i}" for i in range(rng.randint(1, cfg.max_declarations))]
        decls = []
        for name in names:
            xtors = []
            for i in range(rng.randint(1, cfg.max_xtors)):
                nullary = i == 0 and rng.random() < 0.9
                params = () if nullary else self.context("a", names)
                xtors.append(XtorSig(self.fresh("K"), params))
            functions = [
                FunctionDeclaration(self.fresh("f"), self.context("p", names), Polarity.DATA, name, ())
                for _ in range(rng.randint(0, cfg.max_xtors - 1))
            ]
            polarity = rng.choice(list(Polarity))
            functions = [replace(f, polarity=polarity) for f in functions]
            decls.append(TypeDeclaration(rng.choice(list(Strategy)), polarity, name, tuple(xtors), tuple(functions)))
        return decls

    # -- terms ---------------------------------------------------------------

    def substitutable_mu(self, orientation: Orientation, type_name: str) -> bool:
        """Would a mu producing `orientation` at the type be substitutable?"""
        strategy = effective_strategy(self.program, self.cfg.mode, type_name)
        binder = orientation.flip()
        return (strategy is Strategy.CBV) == (binder is Orientation.PRD)

    def args(self, params: Context, gamma: Context, budget: int):
        out = []
        for b in params:
            e = self.expression(b.orientation, b.type_name, gamma, budget, argument=True)
            if e is None:
                return None
            out.append(e)
        return tuple(out)

    def expression(self, o: Orientation, t: str, gamma: Context, budget: int, argument=False):
        if budget < 1:
            return None
        decl = self.program.types[t]
        options = ["var", "call", "match", "mu"]
        self.rng.shuffle(options)
        for choice in options:
            e = None
            if choice == "var":
                hits = [b.name for b in gamma if b.orientation is o and b.type_name == t]
                if hits:
                    e = Var(self.rng.choice(hits))
            elif choice == "call":
                pool = list(decl.xtors) if o is decl.polarity.val else list(decl.functions)
                self.rng.shuffle(pool)
                for sig in pool:
                    if sig.params and budget < 2:
                        continue
                    args = self.args(sig.params, gamma, budget - 1)
                    if args is not None:
                        e = Call(sig.name, args)
                        break
            elif choice == "match":
                if o is decl.polarity.cnt and t != PIVOT and budget >= 2:
                    cases = tuple(
                        MatchCase(x.name, x.params, self.command(gamma + x.params, budget - 1))
                        for x in decl.xtors
                    )
                    e = Match(decl.polarity, t, cases)
            elif choice == "mu":
                if budget >= 2 and (not argument or self.substitutable_mu(o, t)):
                    var = self.fresh("v")
                    binder = Binding(var, o.flip(), t)
                    e = Mu(var, o.flip(), t, self.command(gamma + (binder,), budget - 1))
            if e is not None:
                return e
        return None

    def command(self, gamma: Context, budget: int):
        if budget <= 1 or self.rng.random() < 0.1:
            return Done()
        types = list(self.program.types)
        self.rng.shuffle(types)
        for t in types:
            p = self.expression(Orientation.PRD, t, gamma, budget - 1)
            if p is None:
                continue
            k = self.expression(Orientation.CON, t, gamma, budget - 1)
            if k is not None:
                return Cut(p, k)
        return Done()

    def build(self) -> Program:
        decls = self.skeleton()
        self.program = Program(tuple(decls))
        full = []
        for d in decls:
            funcs = []
            for f in d.functions:
                cases = tuple(
                    MatchCase(x.name, x.params, self.command(f.params + x.params, self.cfg.max_depth))
                    for x in d.xtors
                )
                funcs.append(replace(f, cases=cases))
            full.append(replace(d, functions=tuple(funcs)))
        main = self.command((), self.cfg.max_depth)
        return Program(tuple(full), main)


def _minimal() -> Program:
    return Program((TypeDeclaration(Strategy.CBV, Polarity.DATA, PIVOT, (XtorSig("K0"),)),), Done())


def generate_program(config: GeneratorConfig, attempts: int = 20) -> Program:
    """A program well-formed under `config.mode`, deterministic per seed."""
    rng = random.Random(config.seed)
    for _ in range(attempts):
        program = _Gen(config, rng).build()
        if not check_program(program, config.mode):
            return program
    return _minimal()
