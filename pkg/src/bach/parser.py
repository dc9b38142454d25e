"""Surface syntax for Bach models (``.bach`` files).

::

    program := { decl }
    decl    := "proc" NAME [ "(" UIDENT {"," UIDENT} ")" ] "=" agent "."
             | "form" NAME "=" formula "."
             | "run" NAME [ "with" NAME ] "."
    agent   := par {"+" par}
    par     := seq {"||" seq}
    seq     := atom {";" atom}
    atom    := ("tell"|"ask"|"get"|"nask") "(" term ")"
             | NAME [ "(" term {"," term} ")" ]
             | "sum" UIDENT "in" "[" term {"," term} "]" "{" agent "}"
             | "(" agent ")"
    formula := fseq {"+" fseq}
    fseq    := bor {";" bor}
    bor     := band {"|" band}        operands must be basic formulae
    band    := bnot {"&" bnot}
    bnot    := "!" bnot | fatom
    fatom   := "bf" "(" term ")" | NAME | "(" formula ")"
    term    := LIDENT [ "(" term {"," term} ")" ] | NUMERAL | UIDENT

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .agent import PRIMITIVES, Agent, Call, Choice, GSum, Par, ProcEnv, Seq, _check_body, format_agent
from .errors import DuplicateDefinition, EmptyDomain, ModelError, ParseError, UnknownProcedure
from .logic import (
    And,
    Basic,
    Bf,
    BslFormula,
    FChoice,
    FormulaEnv,
    FSeq,
    FVar,
    Not,
    Or,
    format_formula,
)
from .term import Compound, SiTerm, Token, Var, is_var_name

KEYWORDS = {"proc", "form", "run", "with", "sum", "in", "bf", *PRIMITIVES}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
  | (?P<op>\|\||[()\[\]{},+;.=!&|])
""", re.VERBOSE)


@dataclass(frozen=True)
class Lexeme:
    kind: str  # "name", "num", "op", "eof"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Lexeme]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Lexeme(kind, m.group(), line, pos - line_start + 1))
        else:
            nl = m.group().count("\n")
            if nl:
                line += nl
                line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    out.append(Lexeme("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class Model:
    """A parsed program: procedures, formulae and the optional run directive."""

    procs: ProcEnv = field(default_factory=ProcEnv)
    formulae: FormulaEnv = field(default_factory=FormulaEnv)
    entry: Optional[str] = None
    goal: Optional[str] = None

    def entry_agent(self, name: Optional[str] = None) -> Agent:
        name = name or self.entry or ("Protocol" if "Protocol" in self.procs else None)
        if name is None:
            raise ModelError("model has no entry point (add a 'run' directive or a 'Protocol' procedure)")
        if name not in self.procs:
            raise UnknownProcedure(name)
        return Call(name, ())

    def goal_formula(self, name: Optional[str] = None) -> Optional[BslFormula]:
        name = name or self.goal
        if name is None:
            return None
        if name not in self.formulae:
            raise ModelError(f"unknown formula {name!r}")
        return FVar(name)

    def validate(self) -> None:
        self.procs.validate()
        self.formulae.validate()
        if self.entry is not None:
            if self.entry not in self.procs:
                raise UnknownProcedure(self.entry)
            if self.procs[self.entry].params:
                raise ModelError(f"entry procedure {self.entry!r} must take no parameters")
        if self.goal is not None and self.goal not in self.formulae:
            raise ModelError(f"unknown formula {self.goal!r}")


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers ------------------------------------------------------

    @property
    def cur(self) -> Lexeme:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Lexeme:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Optional[Lexeme] = None):
        tok = tok or self.cur
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{msg}, found {found}", tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.cur.kind in ("op", "name") and self.cur.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Lexeme:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        tok = self.cur
        self.i += 1
        return tok

    def name(self, what: str = "a name") -> Lexeme:
        tok = self.cur
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise self.error(f"expected {what}")
        self.i += 1
        return tok

    # -- program ------------------------------------------------------------

    def program(self) -> Model:
        m = Model()
        positions = {}
        run_seen = None
        while self.cur.kind != "eof":
            start = self.cur
            if self.accept("proc"):
                name = self.name("a procedure name")
                params = []
                if self.accept("("):
                    params.append(self._uident("a parameter"))
                    while self.accept(","):
                        params.append(self._uident("a parameter"))
                    self.expect(")")
                self.expect("=")
                body = self.agent()
                self.expect(".")
                if name.text in m.procs:
                    raise _at(DuplicateDefinition("procedure", name.text), name)
                try:
                    m.procs.define(name.text, params, body)
                except ModelError as e:
                    raise _at(e, name)
                positions[("proc", name.text)] = name
            elif self.accept("form"):
                name = self.name("a formula name")
                self.expect("=")
                f = self.formula()
                self.expect(".")
                if name.text in m.formulae:
                    raise _at(DuplicateDefinition("formula", name.text), name)
                m.formulae.define(name.text, f)
                positions[("form", name.text)] = name
            elif self.accept("run"):
                if run_seen is not None:
                    raise _at(DuplicateDefinition("run", "run"), start)
                run_seen = start
                m.entry = self.name("a procedure name").text
                if self.accept("with"):
                    m.goal = self.name("a formula name").text
                self.expect(".")
            else:
                raise self.error("expected 'proc', 'form' or 'run'")
        _validate(m, positions, run_seen)
        return m

    def _uident(self, what: str) -> str:
        tok = self.name(what)
        if not is_var_name(tok.text):
            raise self.error(f"expected {what} (uppercase-initial)", tok)
        return tok.text

    # -- terms --------------------------------------------------------------

    def term(self) -> SiTerm:
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            return Token(tok.text)
        if tok.kind != "name":
            raise self.error("expected a term")
        self.i += 1
        if is_var_name(tok.text):
            return Var(tok.text)
        if self.accept("("):
            args = self.term_list(")")
            return Compound(tok.text, tuple(args))
        return Token(tok.text)

    def term_list(self, close: str) -> list[SiTerm]:
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(close)
        return args

    # -- agents -------------------------------------------------------------

    def agent(self) -> Agent:
        a = self.par()
        while self.accept("+"):
            a = Choice(a, self.par())
        return a

    def par(self) -> Agent:
        a = self.seq()
        while self.accept("||"):
            a = Par(a, self.seq())
        return a

    def seq(self) -> Agent:
        a = self.atom()
        while self.accept(";"):
            a = Seq(a, self.atom())
        return a

    def atom(self) -> Agent:
        tok = self.cur
        if self.accept("("):
            a = self.agent()
            self.expect(")")
            return a
        if tok.kind != "name":
            raise self.error("expected an agent")
        if tok.text in PRIMITIVES:
            self.i += 1
            self.expect("(")
            t = self.term()
            self.expect(")")
            return PRIMITIVES[tok.text](t)
        if tok.text == "sum":
            self.i += 1
            binder = self._uident("a binder variable")
            self.expect("in")
            self.expect("[")
            if self.at("]"):
                raise _at(EmptyDomain(binder), self.cur)
            domain = self.term_list("]")
            self.expect("{")
            body = self.agent()
            self.expect("}")
            return GSum(binder, tuple(domain), body)
        name = self.name("an agent")
        args = self.term_list(")") if self.accept("(") else []
        return Call(name.text, tuple(args))

    # -- formulae -----------------------------------------------------------

    def formula(self) -> BslFormula:
        f = self.fseq()
        while self.accept("+"):
            f = FChoice(f, self.fseq())
        return f

    def fseq(self) -> BslFormula:
        f = self.bor()
        while self.accept(";"):
            f = FSeq(f, self.bor())
        return f

    def _basic_operand(self, f: BslFormula, op: Lexeme):
        if not isinstance(f, Basic):
            raise ParseError(f"{op.text!r} combines basic formulae only", op.line, op.column)
        return f.basic

    def bor(self) -> BslFormula:
        f = self.band()
        while self.at("|"):
            op = self.cur
            self.i += 1
            rhs = self.band()
            f = Basic(Or(self._basic_operand(f, op), self._basic_operand(rhs, op)))
        return f

    def band(self) -> BslFormula:
        f = self.bnot()
        while self.at("&"):
            op = self.cur
            self.i += 1
            rhs = self.bnot()
            f = Basic(And(self._basic_operand(f, op), self._basic_operand(rhs, op)))
        return f

    def bnot(self) -> BslFormula:
        if self.at("!"):
            op = self.cur
            self.i += 1
            return Basic(Not(self._basic_operand(self.bnot(), op)))
        return self.fatom()

    def fatom(self) -> BslFormula:
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.at("bf"):
            self.i += 1
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Basic(Bf(t))
        return FVar(self.name("a formula").text)


def _at(e: Exception, tok: Lexeme) -> Exception:
    e.line, e.column = tok.line, tok.column
    if e.args:
        e.args = (f"{tok.line}:{tok.column}: {e.args[0]}",) + e.args[1:]
    return e


def _validate(m: Model, positions: dict, run_tok: Optional[Lexeme]) -> None:
    for name, d in m.procs.definitions.items():
        try:
            _check_body(m.procs, name, d.body, set(d.params))
        except ModelError as e:
            raise _at(e, positions[("proc", name)])
    for kind, env in (("proc", m.procs), ("form", m.formulae)):
        try:
            env.validate()
        except ModelError as e:
            who = getattr(e, "name", None)
            tok = positions.get((kind, who))
            raise _at(e, tok) if tok else e
    try:
        m.validate()
    except ModelError as e:
        raise _at(e, run_tok) if run_tok else e


def parse_program(text: str) -> Model:
    return _Parser(text).program()


def load(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def parse_agent(text: str) -> Agent:
    p = _Parser(text)
    a = p.agent()
    if p.cur.kind != "eof":
        raise p.error("unexpected input after agent")
    return a


def parse_formula(text: str) -> BslFormula:
    p = _Parser(text)
    f = p.formula()
    if p.cur.kind != "eof":
        raise p.error("unexpected input after formula")
    return f


def parse_term(text: str) -> SiTerm:
    p = _Parser(text)
    t = p.term()
    if p.cur.kind != "eof":
        raise p.error("unexpected input after term")
    return t


def pretty(m: Model) -> str:
    """Canonical program text; ``parse_program(pretty(m)) == m``."""
    chunks = []
    for name, d in m.procs.definitions.items():
        head = f"proc {name}({','.join(d.params)})" if d.params else f"proc {name}"
        chunks.append(f"{head} =\n  {format_agent(d.body, multiline=True, indent=2)} .")
    for name, f in m.formulae.items():
        chunks.append(f"form {name} = {format_formula(f)} .")
    if m.entry is not None:
        chunks.append(f"run {m.entry} with {m.goal} ." if m.goal else f"run {m.entry} .")
    return "\n\n".join(chunks) + "\n"
