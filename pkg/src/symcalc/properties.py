"""Executable checks for the calculus' metatheory, plus the harness driving them."""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field

from .core import (
    Call,
    Cut,
    Done,
    Match,
    MatchCase,
    Mu,
    Orientation,
    Program,
    Var,
    alpha_equal,
)
from .eta import EtaError, eta_equal, expand_at, expandable, positions
from .evalorder import _shift_spec_of, evaltrans, roundtrip, wrap_shift
from .generator import PIVOT, GeneratorConfig, generate_program
from .machine import Finished, Stepped, Stuck, applicable_rules, step, trace
from .modes import StrategyMode, is_substitutable
from .polarity import has_local_match_on, xfun
from .typecheck import TypeCheckError, check_command, check_program

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
TRANSFORM_MODES = (StrategyMode.GLOBAL_CBV, StrategyMode.GLOBAL_CBN, StrategyMode.NOMINAL)


@dataclass(frozen=True)
class Verdict:
    status: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def __str__(self):
        return f"{self.status}: {self.detail}" if self.detail else self.status


def _verdict(condition: bool, failure: str, success: str = "") -> Verdict:
    return Verdict(PASS, success) if condition else Verdict(FAIL, failure)


# ---------------------------------------------------------------------------
# eta


def check_subst_eta_lemma(program: Program, e, e_prime) -> Verdict:
    """Under polar evaluation, substitutability survives an eta step."""
    mode = StrategyMode.POLAR
    if not is_substitutable(program, mode, e):
        return Verdict(PASS, "vacuous: e is not substitutable")
    return _verdict(is_substitutable(program, mode, e_prime), "e is substitutable but its eta-variant is not")


def check_eta_simulation(
    program: Program, c1, c1_prime, fuel: int = 1000, mode: StrategyMode = StrategyMode.POLAR
) -> Verdict:
    """If c1 steps to c2, some reduct of c1' (zero or more steps) is eta-equal to c2."""
    match step(program, mode, c1):
        case Finished():
            return Verdict(PASS, "vacuous: c1 is Done")
        case Stuck(reason):
            return Verdict(INCONCLUSIVE, f"c1 does not step: {reason}")
        case Stepped(c2, _):
            pass
    current = c1_prime
    for n in range(fuel + 1):
        if eta_equal(c2, current):
            return Verdict(PASS, f"matched after {n} step(s)")
        match step(program, mode, current):
            case Stepped(nxt, _):
                current = nxt
            case Finished():
                return Verdict(FAIL, f"c1' finished after {n} step(s) without meeting c2")
            case Stuck(reason):
                return Verdict(FAIL, f"c1' got stuck after {n} step(s): {reason}")
    return Verdict(INCONCLUSIVE, f"no match within {fuel} steps")


def eta_pairs(program: Program, command, rng: random.Random, count: int = 3, depth: int = 2):
    """Random (c1', [(e, e')...]) eta expansions of `command`, each up to `depth` deep."""
    out = []
    for _ in range(count):
        current, pairs = command, []
        for _ in range(depth):
            sites = expandable(program, current)
            if not sites:
                break
            path, e, type_name = rng.choice(sites)
            try:
                nxt, _ = expand_at(program, current, path, type_name)
            except EtaError:
                break
            e_prime = dict((p, x) for p, x, _ in positions(nxt))[path]
            pairs.append((e, e_prime))
            current = nxt
        if pairs:
            out.append((current, pairs))
    return out


# ---------------------------------------------------------------------------
# machine


def check_preservation_progress(program: Program, mode: StrategyMode, fuel: int = 500) -> Verdict:
    t = trace(program, mode, program.main, fuel)
    for i, cmd in enumerate(t.commands):
        try:
            check_command(program, mode, (), cmd)
        except TypeCheckError as exc:
            return Verdict(FAIL, f"step {i} does not typecheck: {exc.diagnostic.message}")
    if t.outcome.kind == "stuck":
        return Verdict(FAIL, f"stuck after {t.outcome.steps} step(s): {t.outcome.reason}")
    return Verdict(PASS, str(t.outcome))


def closed_expressions(program: Program, mode: StrategyMode, o: Orientation, type_name: str, depth: int):
    """Variable-free expressions of (o, T) with nesting at most `depth`.

    Mu bodies and match bodies are Done, so no variables are ever needed.
    """
    decl = program.types[type_name]
    out = []
    pool = decl.xtors if o is decl.polarity.val else decl.functions
    for sig in pool:
        if not sig.params:
            out.append(Call(sig.name))
        elif depth > 0:
            choices = [
                [a for a in closed_expressions(program, mode, b.orientation, b.type_name, depth - 1)
                 if is_substitutable(program, mode, a)]
                for b in sig.params
            ]
            out.extend(Call(sig.name, args) for args in itertools.product(*choices))
    if o is decl.polarity.cnt:
        out.append(Match(decl.polarity, type_name, tuple(MatchCase(x.name, x.params, Done()) for x in decl.xtors)))
    out.append(Mu("z", o.flip(), type_name, Done()))
    return out


def check_determinism(program: Program, modes=tuple(StrategyMode), depth: int = 2) -> Verdict:
    """At most one rule applies to any closed well-typed cut of enumerated head forms."""
    cuts = 0
    for mode in modes:
        for t in program.types:
            prds = closed_expressions(program, mode, Orientation.PRD, t, depth)
            cons = closed_expressions(program, mode, Orientation.CON, t, depth)
            for p, k in itertools.product(prds, cons):
                c = Cut(p, k)
                try:
                    check_command(program, mode, (), c)
                except TypeCheckError:
                    continue
                cuts += 1
                rules = applicable_rules(program, mode, c)
                if len(rules) > 1:
                    names = ", ".join(r for r, _ in rules)
                    return Verdict(FAIL, f"{mode.value}: {names} all apply to a cut at {t}")
    return Verdict(PASS, f"{cuts} cuts checked")


# ---------------------------------------------------------------------------
# polarity transform


def check_xfun_involution(program: Program, type_name: str) -> Verdict:
    once, _ = xfun(program, type_name)
    twice, _ = xfun(once, type_name)
    return _verdict(alpha_equal(twice, program), "xfun twice differs from the input")


def check_typeability(program: Program, type_name: str, modes=TRANSFORM_MODES) -> Verdict:
    after, _ = xfun(program, type_name)
    for mode in modes:
        if not check_program(program, mode) and check_program(after, mode):
            msg = check_program(after, mode)[0].message
            return Verdict(FAIL, f"{mode.value}: well-formed before, not after ({msg})")
    return Verdict(PASS)


def check_semantic_preservation(program: Program, type_name: str, mode: StrategyMode, fuel: int = 1000) -> Verdict:
    after, _ = xfun(program, type_name)
    before_trace = trace(program, mode, program.main, fuel)
    after_trace = trace(after, mode, after.main, fuel)
    a, b = before_trace.commands, after_trace.commands
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return Verdict(FAIL, f"{mode.value}: traces diverge at step {i}")
    if len(a) != len(b) or before_trace.outcome.kind != after_trace.outcome.kind:
        return Verdict(FAIL, f"{mode.value}: {before_trace.outcome} before, {after_trace.outcome} after")
    return Verdict(PASS, f"{len(a) - 1} identical step(s)")


# ---------------------------------------------------------------------------
# evaluation-order transform


def check_roundtrip(program: Program, type_name: str) -> Verdict:
    result, report = roundtrip(program, type_name)
    return _verdict(report.identical, "round trip does not restore the program", "identical")


def check_shift_unwrap(program: Program) -> Verdict:
    """Every shift wrapper unwraps in exactly one step: S(v) against S(k) gives v >> k."""
    checked = 0
    v, k = Var("v"), Var("k")
    for decl in program.declarations:
        spec = _shift_spec_of(decl)
        if spec is None or spec.type_name not in program.types:
            continue
        if spec.binder in ("v", "k"):
            continue
        cut = Cut(wrap_shift(v, Orientation.PRD, spec), wrap_shift(k, Orientation.CON, spec))
        # the wrapped placeholders stand for arbitrary substitutable expressions
        rules = applicable_rules(program, StrategyMode.NOMINAL, cut)
        if len(rules) != 1 or rules[0][1] != Cut(v, k):
            return Verdict(FAIL, f"{decl.name} does not unwrap in one step")
        checked += 1
    return Verdict(PASS, f"{checked} shift type(s)")


# ---------------------------------------------------------------------------
# harness


@dataclass
class HarnessReport:
    rows: dict[str, Counter] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def add(self, name: str, verdict: Verdict, where: str = ""):
        self.rows.setdefault(name, Counter())[verdict.status] += 1
        if verdict.status == FAIL:
            self.failures.append(f"{name} [{where}]: {verdict.detail}")

    @property
    def ok(self) -> bool:
        return all(c[FAIL] == 0 for c in self.rows.values())

    def table(self) -> str:
        width = max([len(n) for n in self.rows] + [8])
        lines = [f"{'property':<{width}}  {'pass':>6}  {'fail':>6}  {'inconcl':>7}"]
        for name, c in self.rows.items():
            lines.append(f"{name:<{width}}  {c[PASS]:>6}  {c[FAIL]:>6}  {c[INCONCLUSIVE]:>7}")
        return "\n".join(lines)


def population(seeds: int, modes=tuple(StrategyMode), start: int = 0, **config):
    for seed in range(start, start + seeds):
        for mode in modes:
            yield mode, seed, generate_program(GeneratorConfig(seed=seed, mode=mode, **config))


def run_harness(seeds: int = 100, fuel: int = 1000, start: int = 0) -> HarnessReport:
    from . import corpus

    report = HarnessReport()
    rng = random.Random(start)
    programs = [(f"corpus:{n}", None, corpus.load(n)) for n in corpus.names()]
    programs += [(f"seed {s} ({m.value})", m, p) for m, s, p in population(seeds, start=start)]
    for where, mode, p in programs:
        modes = [mode] if mode else [m for m in StrategyMode if not check_program(p, m)]
        for m in modes:
            report.add("preservation+progress", check_preservation_progress(p, m, min(fuel, 500)), where)
        types = [PIVOT] if mode else list(p.types)
        for t in types:
            if has_local_match_on(p, t):
                continue
            report.add("xfun involution", check_xfun_involution(p, t), where)
            report.add("typeability", check_typeability(p, t), where)
            for m in (TRANSFORM_MODES if mode is None else [mode] if mode in TRANSFORM_MODES else []):
                if check_program(p, m):
                    continue
                report.add("semantic preservation", check_semantic_preservation(p, t, m, fuel), where)
            if mode in (None, StrategyMode.NOMINAL):
                report.add("overall inverse", check_roundtrip(p, t), where)
        if mode is StrategyMode.POLAR or (mode is None and not check_program(p, StrategyMode.POLAR)):
            for c1p, pairs in eta_pairs(p, p.main, rng):
                for e, e2 in pairs:
                    report.add("eta subst lemma", check_subst_eta_lemma(p, e, e2), where)
                    report.add("eta subst lemma", check_subst_eta_lemma(p, e2, e), where)
                report.add("eta simulation", check_eta_simulation(p, p.main, c1p, fuel), where)
    for name in corpus.names():
        for shifted in shifted_variants(corpus.load(name)):
            report.add("shift unwrap", check_shift_unwrap(shifted), f"corpus:{name}")
    report.add("machine determinism", check_determinism(corpus.load("stream")), "corpus:stream")
    return report


def shifted_variants(program: Program):
    """Every intermediate program of the evaluation-order round trip, per type."""
    for t, decl in program.types.items():
        yield evaltrans(program, t, decl.strategy.flip())
        if has_local_match_on(program, t):
            continue
        p = xfun(program, t)[0]
        p = evaltrans(p, t, decl.strategy.flip())
        yield p
        yield evaltrans(xfun(p, t)[0], t, decl.strategy)


__all__ = [
    "FAIL",
    "INCONCLUSIVE",
    "PASS",
    "HarnessReport",
    "Verdict",
    "check_determinism",
    "check_eta_simulation",
    "check_preservation_progress",
    "check_roundtrip",
    "check_semantic_preservation",
    "check_shift_unwrap",
    "check_subst_eta_lemma",
    "check_typeability",
    "check_xfun_involution",
    "closed_expressions",
    "eta_pairs",
    "population",
    "run_harness",
    "shifted_variants",
]
