"""De- and refunctionalization of one type by transposing its xtor/function matrix.

Terms are never touched: a call resolves to an xtor or a function by lookup,
so moving a name from one side of the matrix to the other is enough.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Command,
    FunctionDeclaration,
    Match,
    MatchCase,
    Polarity,
    Program,
    Strategy,
    TypeDeclaration,
    XtorSig,
    program_commands,
    subterms,
)


class TransformError(Exception):
    """A transformation's precondition does not hold."""


@dataclass(frozen=True)
class XtorMatrix:
    """rows: the xtors; columns: the functions; cells[i][j]: body of function j at xtor i."""

    rows: tuple[XtorSig, ...]
    columns: tuple[XtorSig, ...]
    cells: tuple[tuple[Command, ...], ...]

    def __post_init__(self):
        if len(self.cells) != len(self.rows) or any(len(r) != len(self.columns) for r in self.cells):
            raise ValueError("matrix cells do not match its labels")

    def cell(self, row: str, column: str) -> Command:
        i = next(i for i, r in enumerate(self.rows) if r.name == row)
        j = next(j for j, c in enumerate(self.columns) if c.name == column)
        return self.cells[i][j]


@dataclass(frozen=True)
class TransformReport:
    type_name: str
    old_polarity: Polarity
    new_polarity: Polarity
    strategy: Strategy
    warnings: tuple[str, ...] = ()

    @property
    def direction(self) -> str:
        return "refunctionalize" if self.old_polarity is Polarity.DATA else "defunctionalize"

    def __str__(self):
        return (
            f"{self.direction} {self.type_name}: {self.strategy.value} {self.old_polarity.value}"
            f" -> {self.strategy.value} {self.new_polarity.value}"
        )


def to_matrix(decl: TypeDeclaration) -> XtorMatrix:
    columns = tuple(XtorSig(f.name, f.params) for f in decl.functions)
    cells = []
    for x in decl.xtors:
        row = []
        for f in decl.functions:
            case = f.case_for(x.name)
            if case is None:
                raise TransformError(f"function {f.name} has no case for {x.name}")
            row.append(case.body)
        cells.append(tuple(row))
    return XtorMatrix(decl.xtors, columns, tuple(cells))


def transpose(m: XtorMatrix) -> XtorMatrix:
    cells = tuple(tuple(m.cells[i][j] for i in range(len(m.rows))) for j in range(len(m.columns)))
    return XtorMatrix(m.columns, m.rows, cells)


def from_matrix(m: XtorMatrix, strategy: Strategy, polarity: Polarity, name: str) -> TypeDeclaration:
    functions = tuple(
        FunctionDeclaration(
            col.name,
            col.params,
            polarity,
            name,
            tuple(MatchCase(row.name, row.params, m.cells[i][j]) for i, row in enumerate(m.rows)),
        )
        for j, col in enumerate(m.columns)
    )
    xtors = tuple(XtorSig(r.name, r.params) for r in m.rows)
    return TypeDeclaration(strategy, polarity, name, xtors, functions)


def has_local_match_on(program: Program, type_name: str) -> bool:
    """True iff some match on the type occurs other than as a function body."""
    return any(
        isinstance(t, Match) and t.type_name == type_name
        for cmd in program_commands(program)
        for t in subterms(cmd)
    )


def xfun(program: Program, type_name: str) -> tuple[Program, TransformReport]:
    decl = program.types.get(type_name)
    if decl is None:
        raise TransformError(f"unknown type {type_name!r}")
    if has_local_match_on(program, type_name):
        raise TransformError(
            f"program contains local matches on {type_name}; lift them into functions of "
            f"{type_name} first (lifting is not performed automatically)"
        )
    new_polarity = decl.polarity.flip()
    new_decl = from_matrix(transpose(to_matrix(decl)), decl.strategy, new_polarity, type_name)
    report = TransformReport(type_name, decl.polarity, new_polarity, decl.strategy)
    return program.replace_declaration(new_decl), report
