"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

Tolerances are pinned below. Population sizes are minimums, not samples.
"""
import random
import time

import pytest
from conftest import ACCEPTANCE_LINES

from symcalc import corpus
from symcalc.core import Call, Done, Strategy, alpha_equal
from symcalc.evalorder import _shift_spec_of, evaltrans, roundtrip
from symcalc.machine import trace
from symcalc.modes import StrategyMode
from symcalc.parser import parse_command
from symcalc.polarity import has_local_match_on, xfun
from symcalc.printer import pretty_print
from symcalc.properties import (
    FAIL,
    INCONCLUSIVE,
    TRANSFORM_MODES,
    check_determinism,
    check_eta_simulation,
    check_preservation_progress,
    check_semantic_preservation,
    check_shift_unwrap,
    check_subst_eta_lemma,
    check_typeability,
    check_xfun_involution,
    eta_pairs,
    population,
    shifted_variants,
)
from symcalc.typecheck import check_program

GOLDEN_SECONDS = 1.0
POPULATION = 500
ROUNDTRIP_POPULATION = 200
FUEL = 1000
MAX_INCONCLUSIVE_RATE = 0.01
DETERMINISM_DEPTH = 2

NOMINAL, POLAR = StrategyMode.NOMINAL, StrategyMode.POLAR
CBV, CBN = StrategyMode.GLOBAL_CBV, StrategyMode.GLOBAL_CBN


def record(n: int, ok: bool, summary: str):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {summary}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def generated(modes, seeds=POPULATION):
    return list(population(seeds, modes=modes))


def transformable(program):
    return [t for t in program.types if not has_local_match_on(program, t)]


# -- 1 ----------------------------------------------------------------------


def test_golden_transforms():
    start = time.perf_counter()
    nat_data, nat_codata = corpus.load("nat_data"), corpus.load("nat_codata")
    pred_data, pred_codata, pred_cbn = corpus.load("pred_data"), corpus.load("pred_codata"), corpus.load("pred_cbn")
    checks = {
        "nat_data -> nat_codata": alpha_equal(xfun(nat_data, "Nat")[0], nat_codata),
        "nat_codata -> nat_data": alpha_equal(xfun(nat_codata, "Nat")[0], nat_data),
        "pred_data -> pred_codata": alpha_equal(xfun(pred_data, "Nat")[0], pred_codata),
        "pred_codata -> pred_cbn": alpha_equal(evaltrans(pred_codata, "Nat", Strategy.CBN), pred_cbn),
        "nat_codata text": pretty_print(xfun(nat_data, "Nat")[0]) == pretty_print(nat_codata),
    }
    elapsed = time.perf_counter() - start
    bad = [k for k, ok in checks.items() if not ok]
    ok = not bad and elapsed < GOLDEN_SECONDS
    record(1, ok, f"golden transforms exact ({len(checks) - len(bad)}/{len(checks)}), {elapsed:.3f}s")


# -- 2 ----------------------------------------------------------------------


def _administrative(program, t):
    """Steps whose redex is a shift wrapper against its own match."""
    shifts = {s.xtor for d in program.declarations if (s := _shift_spec_of(d))}
    count = 0
    for before, s in zip(t.commands, t.steps):
        sides = (before.producer, before.consumer)
        if s.rule in ("Match", "Comatch") and any(isinstance(e, Call) and e.name in shifts for e in sides):
            count += 1
    return count


def test_pred_corpus_semantics():
    start = time.perf_counter()
    traces = {n: trace(corpus.load(n), NOMINAL, corpus.load(n).main) for n in ("pred_data", "pred_codata", "pred_cbn")}
    completed = all(t.outcome.kind == "completed" and t.commands[-1] == Done() for t in traces.values())
    base = len(traces["pred_data"].steps)
    extra = len(traces["pred_cbn"].steps) - base
    admin = _administrative(corpus.load("pred_cbn"), traces["pred_cbn"])
    ok = (completed and len(traces["pred_codata"].steps) == base and extra >= 0 and extra == admin
          and time.perf_counter() - start < GOLDEN_SECONDS)
    steps = ", ".join(f"{n}={len(t.steps)}" for n, t in traces.items())
    record(2, ok, f"all mains Done under nominal ({steps})")


# -- 3 ----------------------------------------------------------------------


@pytest.mark.slow
def test_preservation_and_progress():
    counts, failures = {}, []
    for mode, seed, p in generated(tuple(StrategyMode)):
        counts[mode] = counts.get(mode, 0) + 1
        v = check_preservation_progress(p, mode, FUEL)
        if not v.ok:
            failures.append(f"seed {seed} {mode.value}: {v.detail}")
    ok = not failures and all(counts.get(m, 0) >= POPULATION for m in StrategyMode)
    per = ", ".join(f"{m.value}={n}" for m, n in counts.items())
    record(3, ok, f"every step typechecks and nothing is stuck ({per}; {len(failures)} failures)")


# -- 4 ----------------------------------------------------------------------


@pytest.mark.slow
def test_mutual_inverse():
    checked, failures = 0, []
    for name in corpus.names():
        p = corpus.load(name)
        for t in transformable(p):
            checked += 1
            if not check_xfun_involution(p, t).ok:
                failures.append(f"corpus {name} {t}")
    programs = 0
    for _, seed, p in generated((NOMINAL,)):
        programs += 1
        for t in transformable(p):
            checked += 1
            if not check_xfun_involution(p, t).ok:
                failures.append(f"seed {seed} {t}")
    ok = not failures and programs >= POPULATION
    record(4, ok, f"xfun twice is the identity ({checked} program/type pairs, {programs} generated)")


# -- 5 ----------------------------------------------------------------------


@pytest.mark.slow
def test_typeability_preservation():
    checked, failures = 0, []
    for mode, seed, p in generated(TRANSFORM_MODES):
        for t in transformable(p):
            checked += 1
            v = check_typeability(p, t, (mode,))
            if not v.ok:
                failures.append(f"seed {seed} {t}: {v.detail}")
    for name in corpus.names():
        p = corpus.load(name)
        for t in transformable(p):
            checked += 1
            if not check_typeability(p, t).ok:
                failures.append(f"corpus {name} {t}")
    record(5, not failures, f"well-formedness kept by xfun ({checked} checks, {len(failures)} failures)")


# -- 6 ----------------------------------------------------------------------


@pytest.mark.slow
def test_semantic_preservation():
    checked, failures = 0, []
    for mode, seed, p in generated(TRANSFORM_MODES):
        for t in transformable(p):
            checked += 1
            v = check_semantic_preservation(p, t, mode, FUEL)
            if not v.ok:
                failures.append(f"seed {seed} {t}: {v.detail}")
    for name in corpus.names():
        p = corpus.load(name)
        for t in transformable(p):
            for mode in TRANSFORM_MODES:
                if check_program(p, mode):
                    continue
                checked += 1
                v = check_semantic_preservation(p, t, mode, FUEL)
                if not v.ok:
                    failures.append(f"corpus {name} {t}: {v.detail}")
    record(6, not failures, f"traces identical step for step ({checked} checks, {len(failures)} failures)")


# -- 7 ----------------------------------------------------------------------

# c1 is an eta-expanded form of c1' (one side of the law), same program throughout.
CODATA_EXPANDED = ("match Fun { Ap(x, k) => mu(y: con Fun) => U >> loop >> Ap(x, k) }"
                   " >> mu(f: prd Fun) => Done")
CODATA_CONTRACTED = "mu(y: con Fun) => U >> loop >> mu(f: prd Fun) => Done"
DATA_EXPANDED = ("mu(k: con Nat) => U >> loop >> match Nat { Zero => Zero >> mu(z: prd Nat) => Done;"
                 " Suc(x) => Suc(x) >> mu(z: prd Nat) => Done }")
DATA_CONTRACTED = "mu(k: con Nat) => U >> loop >> mu(z: prd Nat) => Done"


def _outcome(program, mode, text, fuel=FUEL):
    return trace(program, mode, parse_command(text, program), fuel).outcome.kind


def test_eta_and_polarity_table():
    w = corpus.load("eta_witness")
    codata = {m: (_outcome(w, m, CODATA_EXPANDED), _outcome(w, m, CODATA_CONTRACTED)) for m in StrategyMode}
    data = {m: (_outcome(w, m, DATA_EXPANDED), _outcome(w, m, DATA_CONTRACTED)) for m in StrategyMode}
    # (a) each law breaks under the global order that disagrees with the polar one
    a = codata[CBV][0] != codata[CBV][1] and data[CBN][0] != data[CBN][1]
    # (b) the same program and its xfun disagree under polar
    pred_data = corpus.load("pred_data")
    flipped = xfun(pred_data, "Nat")[0]
    before = trace(pred_data, POLAR, pred_data.main, FUEL).outcome.kind
    after = trace(flipped, POLAR, flipped.main, FUEL).outcome.kind
    b = before != after
    # (c) under polar, every expanded/contracted pair agrees and simulates
    pairs = [(CODATA_EXPANDED, CODATA_CONTRACTED), (DATA_EXPANDED, DATA_CONTRACTED)]
    agree = codata[POLAR][0] == codata[POLAR][1] and data[POLAR][0] == data[POLAR][1]
    simulate = all(
        check_eta_simulation(w, parse_command(y, w), parse_command(x, w), FUEL).status != FAIL
        for x, y in pairs
    )
    c = agree and simulate
    detail = (f"(a) cbv codata {codata[CBV]}, cbn data {data[CBN]}; "
              f"(b) polar xfun {before} -> {after}; (c) polar agree={agree} simulate={simulate}")
    record(7, a and b and c, detail)


# -- 8 ----------------------------------------------------------------------


@pytest.mark.slow
def test_eta_lemma_and_simulation():
    rng = random.Random(0)
    sources = [corpus.load(n) for n in corpus.names()]
    sources = [p for p in sources if not check_program(p, POLAR)]
    sources += [p for _, _, p in generated((POLAR,))]
    lemma = {"pass": 0, "fail": 0}
    sim = {"pass": 0, "fail": 0, INCONCLUSIVE: 0}
    for p in sources:
        if p.main == Done():
            continue
        for c1p, pairs in eta_pairs(p, p.main, rng):
            for e, e2 in pairs:
                for v in (check_subst_eta_lemma(p, e, e2), check_subst_eta_lemma(p, e2, e)):
                    lemma["pass" if v.ok else "fail"] += 1
            v = check_eta_simulation(p, p.main, c1p, FUEL)
            sim[v.status] += 1
    total = sum(sim.values())
    rate = sim[INCONCLUSIVE] / total if total else 1.0
    ok = lemma["fail"] == 0 and sim["fail"] == 0 and total > 0 and rate < MAX_INCONCLUSIVE_RATE
    record(8, ok, f"lemma {lemma}, simulation {sim}, inconclusive rate {rate:.2%}")


# -- 9 ----------------------------------------------------------------------


@pytest.mark.slow
def test_overall_inverse():
    checked, failures, programs = 0, [], 0
    for name in corpus.names():
        p = corpus.load(name)
        for t in transformable(p):
            checked += 1
            if not roundtrip(p, t)[1].identical:
                failures.append(f"corpus {name} {t}")
    for _, seed, p in generated((NOMINAL,), ROUNDTRIP_POPULATION):
        programs += 1
        for t in transformable(p):
            checked += 1
            if not roundtrip(p, t)[1].identical:
                failures.append(f"seed {seed} {t}")
    ok = not failures and programs >= ROUNDTRIP_POPULATION
    record(9, ok, f"round trip restores the program ({checked} checks, {programs} generated)")


# -- 10 ---------------------------------------------------------------------


def test_shift_unwrap():
    checked, failures = 0, []
    for name in corpus.names():
        for shifted in shifted_variants(corpus.load(name)):
            v = check_shift_unwrap(shifted)
            checked += int(v.detail.split()[0]) if v.ok else 0
            if not v.ok:
                failures.append(f"{name}: {v.detail}")
    ok = not failures and checked > 0
    record(10, ok, f"every shift wrapper unwraps in one step ({checked} wrappers)")


# -- 11 ---------------------------------------------------------------------


def test_machine_determinism():
    fixture = corpus.load("stream")
    ok_fixture = len(fixture.types) == 2
    v = check_determinism(fixture, tuple(StrategyMode), DETERMINISM_DEPTH)
    record(11, ok_fixture and v.ok, f"at most one rule per closed cut, all modes ({v.detail})")
