from dataclasses import replace

import pytest

from symcalc import corpus
from symcalc.core import Binding, Call, Done, Mu, Orientation, Strategy, Var
from symcalc.modes import StrategyMode, effective_strategy, is_substitutable
from symcalc.parser import parse_command, parse_program
from symcalc.typecheck import (
    TypeCheckError,
    TypeJudgement,
    check_command,
    check_context,
    check_program,
    check_substitution,
    infer_expression,
)

PRD, CON = Orientation.PRD, Orientation.CON
NOMINAL = StrategyMode.NOMINAL


@pytest.fixture
def nat():
    return corpus.load("nat_data")


def test_check_context(nat):
    check_context(nat, ())
    with pytest.raises(TypeCheckError, match="duplicate"):
        check_context(nat, (Binding("x", PRD, "Nat"), Binding("x", CON, "Nat")))
    with pytest.raises(TypeCheckError, match="unknown type"):
        check_context(nat, (Binding("x", PRD, "Bogus"),))


def test_check_substitution(nat):
    check_substitution(nat, NOMINAL, (), (), ())
    check_substitution(nat, NOMINAL, (), (Call("Zero"),), (Binding("x", PRD, "Nat"),))
    mu = Mu("k", CON, "Nat", Done())
    with pytest.raises(TypeCheckError, match="substitutable"):
        check_substitution(nat, NOMINAL, (), (mu,), (Binding("x", PRD, "Nat"),))


def test_check_substitution_arity(nat):
    with pytest.raises(TypeCheckError):
        check_substitution(nat, NOMINAL, (), (), (Binding("x", PRD, "Nat"),))


def test_infer_expression(nat):
    assert infer_expression(nat, NOMINAL, (), Call("Suc", (Call("Zero"),))) == TypeJudgement(PRD, "Nat")
    m = parse_command("Zero >> match Nat { Zero => Done; Suc(x) => Done }", nat).consumer
    assert infer_expression(nat, NOMINAL, (), m) == TypeJudgement(CON, "Nat")
    assert infer_expression(nat, NOMINAL, (), Mu("k", CON, "Nat", Done())) == TypeJudgement(PRD, "Nat")
    assert infer_expression(nat, NOMINAL, (Binding("k", CON, "Nat"),), Var("k")) == TypeJudgement(CON, "Nat")


def test_unbound_variable(nat):
    with pytest.raises(TypeCheckError, match="unbound"):
        infer_expression(nat, NOMINAL, (), Var("k"))


def test_check_command(nat):
    check_command(nat, NOMINAL, (Binding("z", PRD, "Nat"),), Done())
    check_command(nat, NOMINAL, (), parse_command("Suc(Zero) >> match Nat { Zero => Done; Suc(x) => Done }", nat))
    with pytest.raises(TypeCheckError):
        check_command(nat, NOMINAL, (), parse_command("Zero >> Zero", nat))


def test_corpus_well_formed_under_nominal():
    for name in corpus.names():
        assert check_program(corpus.load(name), NOMINAL) == [], name


def test_missing_case_is_reported():
    text = corpus.source("nat_data").replace("    Suc(x) => x >> k\n", "").replace("Zero >> k;", "Zero >> k")
    diags = check_program(parse_program(text))
    assert any("non-exhaustive" in d.message and "Suc" in d.message for d in diags)


def test_duplicate_cases():
    base = "cbv data type B { T; F }\nmain := T >> match B { %s }"
    dup = check_program(parse_program(base % "T => Done; T => Done; F => Done"))
    assert any("duplicate" in d.message for d in dup)


def test_case_binders_must_match_signature(nat):
    cmd = "Zero >> match Nat { Zero => Done; Suc(n) => Done }"
    diags = check_program(replace(nat, main=parse_command(cmd, nat)))
    assert any("must bind exactly (x)" in d.message for d in diags)


def test_function_params_disjoint_from_case_binders():
    text = """cbv data type Nat {
  Zero;
  Suc(x: prd Nat)
} with
  f(x: con Nat) := match Nat {
    Zero => Zero >> x;
    Suc(x) => Done
  }
"""
    assert check_program(parse_program(text))


def test_nested_binders_may_shadow(nat):
    cmd = parse_command("mu(x: con Nat) => mu(x: con Nat) => Done >> x >> mu(r: prd Nat) => Done", nat)
    check_command(nat, NOMINAL, (), cmd)


def test_diagnostics_carry_spans():
    text = "cbv data type Nat { Zero }\nmain := Zero >> Zero"
    (d,) = check_program(parse_program(text, filename="bad.sym"))
    assert d.span.file == "bad.sym" and d.span.start_line == 2


def test_mode_changes_well_formedness():
    # nat_data passes a consumer abstraction to add, which global cbn rejects
    p = corpus.load("nat_data")
    assert check_program(p, StrategyMode.GLOBAL_CBV) == []
    assert check_program(p, StrategyMode.GLOBAL_CBN) != []


# -- substitutability and effective strategy --------------------------------


def test_values_are_substitutable_in_every_mode(nat):
    for mode in StrategyMode:
        assert is_substitutable(nat, mode, Call("Zero"))
        assert is_substitutable(nat, mode, Var("x"))


def test_mu_substitutability(nat):
    assert not is_substitutable(nat, NOMINAL, Mu("k", CON, "Nat", Done()))
    assert is_substitutable(nat, NOMINAL, Mu("n", PRD, "Nat", Done()))
    assert is_substitutable(nat, StrategyMode.GLOBAL_CBV, Mu("n", PRD, "Nat", Done()))
    assert is_substitutable(nat, StrategyMode.GLOBAL_CBN, Mu("k", CON, "Nat", Done()))


def test_effective_strategy():
    p = corpus.load("stream")
    assert effective_strategy(p, NOMINAL, "Stream") is Strategy.CBN
    assert effective_strategy(p, StrategyMode.POLAR, "Stream") is Strategy.CBN
    assert effective_strategy(p, StrategyMode.POLAR, "Nat") is Strategy.CBV
    assert effective_strategy(p, StrategyMode.GLOBAL_CBV, "Stream") is Strategy.CBV


def test_mode_parse_aliases():
    assert StrategyMode.parse("cbv") is StrategyMode.GLOBAL_CBV
    assert StrategyMode.parse("nominal") is NOMINAL
    with pytest.raises(ValueError):
        StrategyMode.parse("lazy")
