"""Store predicates and the bsL constraint calculus.

Basic formulae are propositional combinations of ``bf(t)`` ("t is on the
store") evaluated on a single store.  bsL formulae chain basic formulae
with ``;`` and ``+`` and may recurse through named variables; each
constrained step discharges one leading basic formula on the store it
produces, leaving a residual.  The residual ``EPSILON`` means the whole
formula has been met.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .errors import DuplicateDefinition, UnguardedFormula, UnknownFormulaVariable
from .store import Store
from .term import SiTerm, coerce, render


class BasicFormula:
    __slots__ = ()

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Bf(BasicFormula):
    term: SiTerm


@dataclass(frozen=True)
class Not(BasicFormula):
    operand: BasicFormula


@dataclass(frozen=True)
class And(BasicFormula):
    left: BasicFormula
    right: BasicFormula


@dataclass(frozen=True)
class Or(BasicFormula):
    left: BasicFormula
    right: BasicFormula


class BslFormula:
    __slots__ = ()

    def __mul__(self, other):
        return FSeq(self, as_formula(other))

    def __rmul__(self, other):
        return FSeq(as_formula(other), self)

    def __add__(self, other):
        return FChoice(self, as_formula(other))

    def __radd__(self, other):
        return FChoice(as_formula(other), self)

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class Basic(BslFormula):
    basic: BasicFormula


@dataclass(frozen=True)
class FVar(BslFormula):
    name: str


@dataclass(frozen=True)
class FChoice(BslFormula):
    left: BslFormula
    right: BslFormula


@dataclass(frozen=True)
class FSeq(BslFormula):
    left: BslFormula
    right: BslFormula


class _Epsilon(BslFormula):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EPSILON"

    def __reduce__(self):
        return (_Epsilon, ())


EPSILON = _Epsilon()


# -- builders -----------------------------------------------------------------


def bf(t) -> Bf:
    return Bf(coerce(t))


def not_(b: BasicFormula) -> Not:
    return Not(b)


def and_(a: BasicFormula, b: BasicFormula) -> And:
    return And(a, b)


def or_(a: BasicFormula, b: BasicFormula) -> Or:
    return Or(a, b)


def as_formula(x: Union[BslFormula, BasicFormula, str]) -> BslFormula:
    if isinstance(x, BslFormula):
        return x
    if isinstance(x, BasicFormula):
        return Basic(x)
    if isinstance(x, str):
        return FVar(x)
    raise TypeError(f"cannot use {x!r} as a bsL formula")


def fseq(*fs) -> BslFormula:
    out = as_formula(fs[0])
    for f in fs[1:]:
        out = FSeq(out, as_formula(f))
    return out


def fchoice(*fs) -> BslFormula:
    out = as_formula(fs[0])
    for f in fs[1:]:
        out = FChoice(out, as_formula(f))
    return out


# -- semantics ----------------------------------------------------------------


def sat_basic(s: Store, b: BasicFormula) -> bool:
    if isinstance(b, Bf):
        return s.count(b.term) >= 1
    if isinstance(b, Not):
        return not sat_basic(s, b.operand)
    if isinstance(b, And):
        return sat_basic(s, b.left) and sat_basic(s, b.right)
    if isinstance(b, Or):
        return sat_basic(s, b.left) or sat_basic(s, b.right)
    raise TypeError(f"not a basic formula: {b!r}")


def _seq_residual(f3: BslFormula, rest: BslFormula) -> BslFormula:
    return rest if f3 is EPSILON else FSeq(f3, rest)


def derive(s: Store, f: BslFormula, env: Mapping[str, BslFormula]) -> list[BslFormula]:
    """All residuals ``f'`` with ``s |- f -> f'``.

    Returned as a duplicate-free list in left-to-right rule order so that
    callers iterating over it behave deterministically.
    """
    if f is EPSILON:
        raise ValueError("the satisfied formula has nothing left to derive")
    out: list[BslFormula] = []
    _derive(s, f, env, out)
    return list(dict.fromkeys(out))


def _derive(s, f, env, out) -> None:
    if isinstance(f, Basic):
        if sat_basic(s, f.basic):
            out.append(EPSILON)
    elif isinstance(f, FVar):
        try:
            body = env[f.name]
        except KeyError:
            raise UnknownFormulaVariable(f.name) from None
        _derive(s, body, env, out)
    elif isinstance(f, FChoice):
        _derive(s, f.left, env, out)
        _derive(s, f.right, env, out)
    elif isinstance(f, FSeq):
        firsts: list[BslFormula] = []
        _derive(s, f.left, env, firsts)
        out.extend(_seq_residual(f3, f.right) for f3 in firsts)
    else:
        raise TypeError(f"not a bsL formula: {f!r}")


def is_satisfied(f: Optional[BslFormula]) -> bool:
    return f is EPSILON


# -- environments -------------------------------------------------------------


def formula_variables(f: BslFormula) -> set[str]:
    if isinstance(f, FVar):
        return {f.name}
    if isinstance(f, (FChoice, FSeq)):
        return formula_variables(f.left) | formula_variables(f.right)
    return set()


def _unguarded_vars(f: BslFormula) -> set[str]:
    if isinstance(f, FVar):
        return {f.name}
    if isinstance(f, FSeq):
        return _unguarded_vars(f.left)
    if isinstance(f, FChoice):
        return _unguarded_vars(f.left) | _unguarded_vars(f.right)
    return set()


class FormulaEnv(dict):
    """Named bsL formulae (``P = f``)."""

    def define(self, name: str, f) -> "FormulaEnv":
        if name in self:
            raise DuplicateDefinition("formula", name)
        self[name] = as_formula(f)
        return self

    def check_resolved(self) -> None:
        for name, f in self.items():
            for v in sorted(formula_variables(f)):
                if v not in self:
                    raise UnknownFormulaVariable(v)

    def check_guarded(self) -> None:
        edges = {n: _unguarded_vars(f) for n, f in self.items()}
        for name in self:
            seen: set[str] = set()
            stack = list(edges[name])
            while stack:
                n = stack.pop()
                if n == name:
                    raise UnguardedFormula(name)
                if n in seen or n not in edges:
                    continue
                seen.add(n)
                stack.extend(edges[n])

    def validate(self) -> None:
        self.check_resolved()
        self.check_guarded()


def define_formula(env: Mapping[str, BslFormula], name: str, f) -> FormulaEnv:
    """Return a copy of *env* extended with ``name = f``, checked."""
    out = FormulaEnv(env)
    out.define(name, f)
    out.validate()
    return out


# -- pretty printing ----------------------------------------------------------

_PREC = {FChoice: 1, FSeq: 2, Or: 3, And: 4, Not: 5}
_OPS = {FChoice: "+", FSeq: ";", Or: "|", And: "&"}


def _prec(f) -> int:
    if isinstance(f, Basic):
        return _prec(f.basic)
    return _PREC.get(type(f), 6)


def format_formula(f) -> str:
    """Surface syntax: '|' and '&' bind tighter than ';', which binds tighter than '+'."""
    if isinstance(f, Basic):
        return format_formula(f.basic)
    if isinstance(f, Bf):
        return f"bf({render(f.term)})"
    if isinstance(f, Not):
        inner = format_formula(f.operand)
        return f"!({inner})" if _prec(f.operand) < 5 else f"!{inner}"
    if type(f) in _OPS:
        p = _PREC[type(f)]
        left, right = format_formula(f.left), format_formula(f.right)
        if _prec(f.left) < p:
            left = f"({left})"
        if _prec(f.right) <= p:
            right = f"({right})"
        return f"{left} {_OPS[type(f)]} {right}"
    if isinstance(f, FVar):
        return f.name
    if f is EPSILON:
        return "ε"
    raise TypeError(f"not a formula: {f!r}")
