"""Lexer and recursive-descent parser for `.sym` programs.

Grammar::

    program   = { decl } , [ "main" ":=" command ] ;
    decl      = ("cbv"|"cbn") ("data"|"codata") "type" IDENT
                "{" [ xtorsig { ";" xtorsig } ] "}" [ "with" { fundecl } ] ;
    xtorsig   = IDENT [ "(" [ param { "," param } ] ")" ] ;
    param     = IDENT ":" ("prd"|"con") IDENT ;
    fundecl   = IDENT [ "(" [ param { "," param } ] ")" ] ":=" matchexp ;
    matchexp  = "match" [ "data" | "codata" ] IDENT "{" [ case { ";" case } ] "}" ;
    case      = IDENT [ "(" [ IDENT { "," IDENT } ] ")" ] "=>" command ;
    command   = "Done" | expr ">>" expr ;
    expr      = "mu" "(" IDENT ":" ("prd"|"con") IDENT ")" "=>" command
              | matchexp
              | IDENT [ "(" [ expr { "," expr } ] ")" ] ;

An identifier bound by an enclosing binder is a variable; any other bare
identifier is a nullary call.  Match cases only spell out binder names; their
orientations and types are filled in from the xtor signatures once the whole
file has been read, since declarations may refer to each other in any order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .core import (
    Binding,
    Call,
    Command,
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
from .diagnostics import UNKNOWN_SPAN, Diagnostic, ParseError, SourceSpan

KEYWORDS = frozenset(
    "cbv cbn data codata type with match mu main Done prd con".split()
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<ident>[^\W\d_][\w']*)
  | (?P<sym>:=|=>|>>|[{}();,:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "kw" | "sym" | "eof"
    text: str
    span: SourceSpan

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


def tokenize(text: str, filename: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    tokens, errors = [], []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            span = SourceSpan(filename, line, col, line, col + 1)
            errors.append(Diagnostic("error", f"unexpected character {text[pos]!r}", span))
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ident", "sym"):
            word = m.group()
            span = SourceSpan(filename, line, col, line, col + len(word))
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, span))
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("eof", "", SourceSpan(filename, line, col, line, col)))
    return tokens, errors


class _Failure(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.file, a.start_line, a.start_col, b.end_line, b.end_col)


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    @property
    def prev(self) -> Token:
        return self.tokens[self.pos - 1]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "sym") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, expected: str):
        tok = self.tok
        if tok.kind == "eof":
            msg = f"unexpected end of input, expected {expected}"
        else:
            msg = f"unexpected token {tok.describe()}, expected {expected}"
        raise _Failure(Diagnostic("error", msg, tok.span))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail("an identifier")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    # -- grammar ------------------------------------------------------------

    def program(self, errors: list[Diagnostic]) -> Program:
        decls, main = [], None
        while self.tok.kind != "eof":
            try:
                if self.at("cbv") or self.at("cbn"):
                    decls.append(self.declaration())
                elif self.at("main"):
                    start = self.advance()
                    if main is not None:
                        errors.append(Diagnostic("error", "duplicate main command", start.span))
                    self.expect(":=")
                    main = self.command(frozenset())
                else:
                    self.fail("a type declaration or 'main'")
            except _Failure as exc:
                errors.append(exc.diagnostic)
                self.synchronize()
        first = self.tokens[0].span
        return Program(tuple(decls), main or Done(), span=_join(first, self.tok.span))

    def synchronize(self):
        self.advance()
        while self.tok.kind != "eof" and not (self.at("cbv") or self.at("cbn") or self.at("main")):
            self.advance()

    def declaration(self) -> TypeDeclaration:
        start = self.advance()
        strategy = Strategy(start.text)
        if not (self.at("data") or self.at("codata")):
            self.fail("'data' or 'codata'")
        polarity = Polarity(self.advance().text)
        self.expect("type")
        name = self.ident().text
        self.expect("{")
        xtors = []
        if not self.at("}"):
            xtors.append(self.xtor_sig())
            while self.accept(";"):
                if self.at("}"):
                    break
                xtors.append(self.xtor_sig())
        self.expect("}")
        functions = []
        if self.accept("with"):
            while self.tok.kind == "ident":
                functions.append(self.function())
        return TypeDeclaration(
            strategy, polarity, name, tuple(xtors), tuple(functions),
            span=_join(start.span, self.prev.span),
        )

    def params(self) -> tuple[Binding, ...]:
        out = []
        if self.accept("("):
            if not self.at(")"):
                out.append(self.param())
                while self.accept(","):
                    out.append(self.param())
            self.expect(")")
        return tuple(out)

    def param(self) -> Binding:
        name = self.ident().text
        self.expect(":")
        orientation = self.orientation()
        return Binding(name, orientation, self.ident().text)

    def orientation(self) -> Orientation:
        if not (self.at("prd") or self.at("con")):
            self.fail("'prd' or 'con'")
        return Orientation(self.advance().text)

    def xtor_sig(self) -> XtorSig:
        tok = self.ident()
        params = self.params()
        return XtorSig(tok.text, params, span=_join(tok.span, self.prev.span))

    def function(self) -> FunctionDeclaration:
        tok = self.ident()
        params = self.params()
        self.expect(":=")
        m = self.match(frozenset(b.name for b in params))
        return FunctionDeclaration(
            tok.text, params, m.polarity, m.type_name, m.cases,
            span=_join(tok.span, self.prev.span),
        )

    def match(self, scope: frozenset[str]) -> Match:
        start = self.expect("match")
        polarity = None
        if self.at("data") or self.at("codata"):
            polarity = Polarity(self.advance().text)
        type_name = self.ident().text
        self.expect("{")
        cases = []
        if not self.at("}"):
            cases.append(self.case(scope))
            while self.accept(";"):
                if self.at("}"):
                    break
                cases.append(self.case(scope))
        self.expect("}")
        return Match(polarity, type_name, tuple(cases), span=_join(start.span, self.prev.span))

    def case(self, scope: frozenset[str]) -> MatchCase:
        tok = self.ident()
        names = []
        if self.accept("("):
            if not self.at(")"):
                names.append(self.ident().text)
                while self.accept(","):
                    names.append(self.ident().text)
            self.expect(")")
        self.expect("=>")
        body = self.command(scope | set(names))
        binders = tuple(Binding(n, None, None) for n in names)
        return MatchCase(tok.text, binders, body, span=_join(tok.span, self.prev.span))

    def command(self, scope: frozenset[str]) -> Command:
        if self.at("Done"):
            return Done(span=self.advance().span)
        left = self.expression(scope)
        self.expect(">>")
        right = self.expression(scope)
        return Cut(left, right, span=_join(left.span, right.span))

    def expression(self, scope: frozenset[str]):
        if self.at("mu"):
            start = self.advance()
            self.expect("(")
            var = self.ident().text
            self.expect(":")
            orientation = self.orientation()
            type_name = self.ident().text
            self.expect(")")
            self.expect("=>")
            body = self.command(scope | {var})
            return Mu(var, orientation, type_name, body, span=_join(start.span, self.prev.span))
        if self.at("match"):
            return self.match(scope)
        if self.tok.kind != "ident":
            self.fail("an expression")
        tok = self.advance()
        if self.accept("("):
            args = []
            if not self.at(")"):
                args.append(self.expression(scope))
                while self.accept(","):
                    args.append(self.expression(scope))
            self.expect(")")
            return Call(tok.text, tuple(args), span=_join(tok.span, self.prev.span))
        if tok.text in scope:
            return Var(tok.text, span=tok.span)
        return Call(tok.text, (), span=tok.span)


# ---------------------------------------------------------------------------
# resolution of match polarities and case binder contexts


def _duplicate_names(program: Program) -> list[Diagnostic]:
    errors, types, terms = [], {}, {}
    for decl in program.declarations:
        if decl.name in types:
            errors.append(Diagnostic("error", f"duplicate type name {decl.name!r}", decl.span))
        types[decl.name] = decl
        for item in (*decl.xtors, *decl.functions):
            if item.name in terms:
                errors.append(
                    Diagnostic("error", f"duplicate xtor/function name {item.name!r}", item.span)
                )
            terms[item.name] = item
    return errors


class _Resolver:
    def __init__(self, program: Program, errors: list[Diagnostic]):
        self.types = {d.name: d for d in program.declarations}
        self.errors = errors

    def error(self, msg: str, span):
        self.errors.append(Diagnostic("error", msg, span or UNKNOWN_SPAN))

    def match(self, m: Match, fallback_span) -> Match:
        decl = self.types.get(m.type_name)
        span = m.span or fallback_span
        if decl is None:
            self.error(f"match on unknown type {m.type_name!r}", span)
            return replace(m, polarity=m.polarity or Polarity.DATA, cases=tuple(
                replace(c, body=self.command(c.body)) for c in m.cases))
        sigs = {x.name: x for x in decl.xtors}
        cases = []
        for c in m.cases:
            sig = sigs.get(c.xtor)
            if sig is None:
                self.error(f"{c.xtor!r} is not an xtor of type {decl.name!r}", c.span or span)
                binders = tuple(Binding(b.name, Orientation.PRD, decl.name) for b in c.binders)
            elif len(sig.params) != len(c.binders):
                self.error(
                    f"case {c.xtor!r} binds {len(c.binders)} variables, "
                    f"signature declares {len(sig.params)}",
                    c.span or span,
                )
                binders = tuple(Binding(b.name, Orientation.PRD, decl.name) for b in c.binders)
            else:
                binders = tuple(
                    Binding(b.name, p.orientation, p.type_name) for b, p in zip(c.binders, sig.params)
                )
            cases.append(replace(c, binders=binders, body=self.command(c.body)))
        return replace(m, polarity=m.polarity or decl.polarity, cases=tuple(cases))

    def command(self, c):
        match c:
            case Cut(p, k):
                return replace(c, producer=self.expr(p, c.span), consumer=self.expr(k, c.span))
        return c

    def expr(self, e, span):
        match e:
            case Call(_, args):
                return replace(e, args=tuple(self.expr(a, e.span) for a in args))
            case Match():
                return self.match(e, span)
            case Mu(body=body):
                return replace(e, body=self.command(body))
        return e

    def program(self, program: Program) -> Program:
        decls = []
        for d in program.declarations:
            funcs = []
            for f in d.functions:
                m = self.match(f.body, f.span)
                funcs.append(replace(f, polarity=m.polarity, cases=m.cases))
            decls.append(replace(d, functions=tuple(funcs)))
        return replace(program, declarations=tuple(decls), main=self.command(program.main))


def parse_program(text: str, filename: str = "<input>") -> Program:
    """Parse a whole program; raises ParseError listing every diagnostic."""
    tokens, errors = tokenize(text, filename)
    program = Parser(tokens).program(errors)
    if errors:
        raise ParseError(errors)
    errors.extend(_duplicate_names(program))
    program = _Resolver(program, errors).program(program)
    if errors:
        raise ParseError(errors)
    return program


def parse_command(text: str, program: Program, scope=(), filename: str = "<command>") -> Command:
    """Parse a single command against the declarations of `program`.

    `scope` lists variable names to treat as bound (for open commands).
    """
    tokens, errors = tokenize(text, filename)
    parser = Parser(tokens)
    try:
        cmd = parser.command(frozenset(scope))
        if parser.tok.kind != "eof":
            parser.fail("end of input")
    except _Failure as exc:
        errors.append(exc.diagnostic)
    if errors:
        raise ParseError(errors)
    cmd = _Resolver(program, errors).command(cmd)
    if errors:
        raise ParseError(errors)
    return cmd
