from dataclasses import replace

from symcalc import corpus
from symcalc.core import Orientation, Strategy, free_vars
from symcalc.evalorder import evaltrans
from symcalc.machine import run
from symcalc.modes import StrategyMode
from symcalc.parser import parse_command
from symcalc.polarity import xfun
from symcalc.properties import (
    FAIL,
    PASS,
    HarnessReport,
    Verdict,
    check_determinism,
    check_preservation_progress,
    check_roundtrip,
    check_semantic_preservation,
    check_shift_unwrap,
    check_typeability,
    check_xfun_involution,
    closed_expressions,
    run_harness,
    shifted_variants,
)


def test_preservation_progress_on_corpus():
    for name in corpus.names():
        p = corpus.load(name)
        assert check_preservation_progress(p, StrategyMode.NOMINAL).ok, name


def test_preservation_reports_stuck():
    p = corpus.load("nat_data")
    bad = replace(p, main=parse_command("Zero >> k", p, ("k",)))
    v = check_preservation_progress(bad, StrategyMode.NOMINAL)
    assert v.status == FAIL


def test_xfun_checks_on_nat():
    p = corpus.load("nat_data")
    assert check_xfun_involution(p, "Nat").ok
    assert check_typeability(p, "Nat").ok
    v = check_semantic_preservation(p, "Nat", StrategyMode.NOMINAL)
    assert v.ok and v.detail == "3 identical step(s)"


def test_semantic_preservation_fails_under_polar():
    # flipping polarity flips the polar strategy, so behaviour changes
    p = corpus.load("pred_data")
    assert check_semantic_preservation(p, "Nat", StrategyMode.POLAR, 200).status == FAIL


def test_roundtrip_check():
    assert check_roundtrip(corpus.load("nat_data"), "Nat").ok


def test_shift_unwrap_on_pred_cbn():
    v = check_shift_unwrap(corpus.load("pred_cbn"))
    assert v.ok and v.detail == "1 shift type(s)"
    assert check_shift_unwrap(corpus.load("nat_data")).detail == "0 shift type(s)"


def test_shift_unwrap_on_both_wrappers():
    p = evaltrans(corpus.load("nat_codata"), "Nat", Strategy.CBN)
    assert "Down_Nat" in p.types
    q = evaltrans(p, "Nat", Strategy.CBV)
    assert "Up_Nat" in q.types
    assert check_shift_unwrap(q).detail == "2 shift type(s)"


def test_shifted_variants_cover_round_trip():
    variants = list(shifted_variants(corpus.load("pred_data")))
    assert variants and all(check_shift_unwrap(v).ok for v in variants)


def test_closed_expressions_are_variable_free():
    p = corpus.load("stream")
    for e in closed_expressions(p, StrategyMode.NOMINAL, Orientation.PRD, "Nat", 2):
        assert free_vars(e) == frozenset()
    assert len(closed_expressions(p, StrategyMode.NOMINAL, Orientation.CON, "Stream", 1)) >= 3


def test_determinism_on_small_programs():
    for name in ("nat_data", "pred_cbn", "stream"):
        assert check_determinism(corpus.load(name)).ok


def test_harness_report_table():
    r = HarnessReport()
    r.add("x", Verdict(PASS))
    r.add("x", Verdict(FAIL, "boom"), "here")
    assert not r.ok and r.failures == ["x [here]: boom"]
    assert r.table().splitlines()[1].split() == ["x", "1", "1", "0"]


def test_small_harness_run():
    report = run_harness(seeds=3)
    assert report.ok, report.failures
    assert {"preservation+progress", "xfun involution", "overall inverse", "shift unwrap"} <= set(report.rows)


def test_polar_xfun_changes_outcome():
    p = corpus.load("pred_data")
    flipped = xfun(p, "Nat")[0]
    assert run(p, StrategyMode.POLAR, p.main, 200).kind == "completed"
    assert run(flipped, StrategyMode.POLAR, flipped.main, 200).kind == "fuel-exhausted"
