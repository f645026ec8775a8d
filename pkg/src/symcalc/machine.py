"""Small-step evaluation of closed commands.

Six rules: Match, Comatch, ConCall, PrdCall and the two mu rules.  The mu
rules fire only when the other side of the cut is substitutable under the
active StrategyMode, which is how the evaluation order is selected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .core import (
    Call,
    Command,
    Cut,
    Done,
    Match,
    Mu,
    Orientation,
    Polarity,
    Program,
    Var,
    apply_substitution,
    free_vars,
    substitute,
)
from .modes import StrategyMode, is_substitutable
from .printer import print_command

DEFAULT_FUEL = 10_000


@dataclass(frozen=True)
class Stepped:
    command: Command
    rule: str


@dataclass(frozen=True)
class Finished:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


StepResult = Union[Stepped, Finished, Stuck]


@dataclass(frozen=True)
class Completed:
    steps: int
    kind = "completed"

    def __str__(self):
        return f"Completed({self.steps})"


@dataclass(frozen=True)
class FuelExhausted:
    command: Command
    steps: int
    kind = "fuel-exhausted"

    def __str__(self):
        return f"FuelExhausted({self.steps})"


@dataclass(frozen=True)
class StuckState:
    command: Command
    reason: str
    steps: int
    kind = "stuck"

    def __str__(self):
        return f"Stuck({self.reason})"


Outcome = Union[Completed, FuelExhausted, StuckState]


def _head(program: Program, e) -> str:
    match e:
        case Var(name):
            return f"variable {name}"
        case Call(name):
            if name in program.xtors:
                return f"xtor {name}"
            if name in program.functions:
                return f"function {name}"
            return f"unknown name {name}"
        case Match(polarity, type_name):
            return f"{polarity.value} match on {type_name}"
        case Mu(_, orientation, type_name):
            return f"mu ({orientation.value} binder) at {type_name}"
    return repr(e)


def _owner(program: Program, name: str, table: str):
    entry = getattr(program, table).get(name)
    return entry[0] if entry else None


def _call_function(program, fun_name, fun_args, xtor_name, xtor_args):
    """Shared body of ConCall and PrdCall: case binders first, then Pi."""
    decl, fun = program.functions[fun_name]
    case = fun.case_for(xtor_name)
    if case is None:
        return None
    body = apply_substitution(case.body, xtor_args, case.binders)
    return apply_substitution(body, fun_args, fun.params)


def applicable_rules(program: Program, mode: StrategyMode, c: Command) -> list[tuple[str, Command]]:
    """Every rule that applies to the cut `c`, with its result."""
    if not isinstance(c, Cut):
        return []
    left, right = c.producer, c.consumer
    out = []
    match left, right:
        case Call(x, tau), Match(Polarity.DATA, _, _) if (d := _owner(program, x, "xtors")) and d.polarity is Polarity.DATA:
            case = next((k for k in right.cases if k.xtor == x), None)
            if case is not None:
                out.append(("Match", apply_substitution(case.body, tau, case.binders)))
        case Match(Polarity.CODATA, _, _), Call(y, tau) if (d := _owner(program, y, "xtors")) and d.polarity is Polarity.CODATA:
            case = next((k for k in left.cases if k.xtor == y), None)
            if case is not None:
                out.append(("Comatch", apply_substitution(case.body, tau, case.binders)))
        case Call(y, tau), Call(f, sigma) if (
            (d := _owner(program, y, "xtors")) and d.polarity is Polarity.DATA
            and f in program.functions
        ):
            result = _call_function(program, f, sigma, y, tau)
            if result is not None:
                out.append(("ConCall", result))
        case Call(f, sigma), Call(y, tau) if (
            (d := _owner(program, y, "xtors")) and d.polarity is Polarity.CODATA
            and f in program.functions
        ):
            result = _call_function(program, f, sigma, y, tau)
            if result is not None:
                out.append(("PrdCall", result))
    if isinstance(left, Mu) and left.orientation is Orientation.CON and is_substitutable(program, mode, right):
        out.append(("R-mu1", substitute(left.body, {left.var: right})))
    if isinstance(right, Mu) and right.orientation is Orientation.PRD and is_substitutable(program, mode, left):
        out.append(("R-mu2", substitute(right.body, {right.var: left})))
    return out


def step(program: Program, mode: StrategyMode, c: Command) -> StepResult:
    if isinstance(c, Done):
        return Finished()
    if free_vars(c):
        return Stuck(f"open term (free: {', '.join(sorted(free_vars(c)))})")
    rules = applicable_rules(program, mode, c)
    if len(rules) == 1:
        rule, result = rules[0]
        return Stepped(result, rule)
    heads = f"{_head(program, c.producer)} >> {_head(program, c.consumer)}"
    if rules:
        return Stuck(f"ambiguous: rules {', '.join(r for r, _ in rules)} all apply to {heads}")
    if isinstance(c.producer, Mu) and isinstance(c.consumer, Mu):
        return Stuck(f"substitutability blocked on both sides of {heads}")
    return Stuck(f"no rule applies to {heads}")


def run(program: Program, mode: StrategyMode, c: Command, fuel: int = DEFAULT_FUEL) -> Outcome:
    return trace(program, mode, c, fuel).outcome


@dataclass(frozen=True)
class TraceStep:
    rule: str
    command: Command


@dataclass(frozen=True)
class Trace:
    initial: Command
    steps: tuple[TraceStep, ...]
    outcome: Outcome = field(compare=False)

    @property
    def commands(self) -> list[Command]:
        return [self.initial, *(s.command for s in self.steps)]

    def to_text(self) -> str:
        lines = [f"{s.rule} ⊢ {print_command(s.command)}" for s in self.steps]
        return "\n".join(lines + [str(self.outcome)])

    def to_json_lines(self) -> str:
        records = [{"step": 0, "rule": None, "command": print_command(self.initial)}]
        for i, s in enumerate(self.steps, 1):
            records.append({"step": i, "rule": s.rule, "command": print_command(s.command)})
        outcome = {"outcome": self.outcome.kind, "steps": len(self.steps)}
        if isinstance(self.outcome, StuckState):
            outcome["reason"] = self.outcome.reason
        records.append(outcome)
        return "\n".join(json.dumps(r, ensure_ascii=False) for r in records)


def trace(program: Program, mode: StrategyMode, c: Command, fuel: int = DEFAULT_FUEL) -> Trace:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    steps, current = [], c
    for _ in range(fuel):
        match step(program, mode, current):
            case Finished():
                return Trace(c, tuple(steps), Completed(len(steps)))
            case Stuck(reason):
                return Trace(c, tuple(steps), StuckState(current, reason, len(steps)))
            case Stepped(nxt, rule):
                steps.append(TraceStep(rule, nxt))
                current = nxt
    if isinstance(current, Done):
        return Trace(c, tuple(steps), Completed(len(steps)))
    return Trace(c, tuple(steps), FuelExhausted(current, len(steps)))
