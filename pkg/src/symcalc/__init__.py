"""A symmetric data/codata calculus: parser, typechecker, abstract machine and
the polarity and evaluation-order transformations between its four corners."""
from .core import (
    Binding,
    Call,
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
    alpha_equal,
    apply_substitution,
    free_vars,
    identity_substitution,
    lookup_fun,
    lookup_type,
    lookup_xtor,
)
from .diagnostics import Diagnostic, ParseError, SourceSpan
from .modes import StrategyMode, is_substitutable
from .parser import parse_command, parse_program
from .printer import pretty_print, print_command, print_expression

