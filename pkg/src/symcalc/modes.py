"""Evaluation orders and the substitutability predicate they induce."""
from __future__ import annotations

import enum

from .core import Call, Match, Mu, Orientation, Polarity, Program, Strategy, Var, lookup_type


class StrategyMode(enum.Enum):
    GLOBAL_CBV = "global-cbv"
    GLOBAL_CBN = "global-cbn"
    POLAR = "polar"
    NOMINAL = "nominal"

    @classmethod
    def parse(cls, text: str) -> StrategyMode:
        key = text.strip().lower().replace("_", "-")
        aliases = {"cbv": cls.GLOBAL_CBV, "cbn": cls.GLOBAL_CBN}
        if key in aliases:
            return aliases[key]
        return cls(key)


def effective_strategy(program: Program, mode: StrategyMode, type_name: str) -> Strategy:
    if mode is StrategyMode.GLOBAL_CBV:
        return Strategy.CBV
    if mode is StrategyMode.GLOBAL_CBN:
        return Strategy.CBN
    decl = lookup_type(program, type_name)
    if mode is StrategyMode.POLAR:
        return Strategy.CBV if decl.polarity is Polarity.DATA else Strategy.CBN
    return decl.strategy


def is_substitutable(program: Program, mode: StrategyMode, e) -> bool:
    """The Subst predicate.

    Variables, calls and matches always qualify.  A mu-abstraction qualifies
    when it is the one the strategy of its type evaluates *second*: under cbv
    the consumer abstraction (binding a producer), under cbn the producer
    abstraction (binding a consumer).
    """
    match e:
        case Var() | Call() | Match():
            return True
        case Mu(_, orientation, type_name, _):
            if effective_strategy(program, mode, type_name) is Strategy.CBV:
                return orientation is Orientation.PRD
            return orientation is Orientation.CON
    raise TypeError(f"not an expression: {e!r}")
