"""Structured pieces of information (si-terms).

A term is a token (arity-0 name), a compound ``f(a1,...,an)`` with n >= 1,
or a binder variable.  Variables only occur in templates: procedure bodies
and generalized-sum bodies.  Everything that reaches the store is ground.

Naming follows the surface syntax: tokens and functors start with a
lowercase letter (or are numerals, so ``f(1,2)`` works), variables start
with an uppercase letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import TermError

LOWER_IDENT = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
UPPER_IDENT = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
NUMERAL = re.compile(r"[0-9]+\Z")


def is_token_name(name: str) -> bool:
    return bool(LOWER_IDENT.match(name) or NUMERAL.match(name))


def is_var_name(name: str) -> bool:
    return bool(UPPER_IDENT.match(name))


@dataclass(frozen=True)
class Token:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not is_token_name(self.name):
            raise TermError(f"invalid token name {self.name!r}")

    @property
    def ground(self) -> bool:
        return True

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple
    ground: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.functor, str) or not LOWER_IDENT.match(self.functor):
            raise TermError(f"invalid functor name {self.functor!r}")
        args = tuple(self.args)
        if not args:
            raise TermError(f"compound {self.functor!r} needs at least one argument; use a token")
        for a in args:
            if not isinstance(a, (Token, Compound, Var)):
                raise TermError(f"argument {a!r} of {self.functor!r} is not a term")
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "ground", all(a.ground for a in args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not is_var_name(self.name):
            raise TermError(f"invalid variable name {self.name!r}")

    @property
    def ground(self) -> bool:
        return False

    def __str__(self):
        return self.name


SiTerm = Union[Token, Compound, Var]


def make_token(name: str) -> Token:
    return Token(name)


def make_compound(functor: str, args) -> Compound:
    return Compound(functor, tuple(args))


def make_var(name: str) -> Var:
    return Var(name)


def render(t: SiTerm) -> str:
    """Canonical text: bare names, ``f(a,b)`` for compounds, no whitespace."""
    if isinstance(t, Compound):
        return f"{t.functor}({','.join(render(a) for a in t.args)})"
    return t.name


def substitute(t: SiTerm, var: str, value: SiTerm) -> SiTerm:
    return substitute_many(t, {var: value})


def substitute_many(t: SiTerm, mapping: Mapping[str, SiTerm]) -> SiTerm:
    """Replace every ``Var`` whose name is in *mapping*, simultaneously."""
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Compound):
        if t.ground:
            return t
        return Compound(t.functor, tuple(substitute_many(a, mapping) for a in t.args))
    return t


def variables(t: SiTerm) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Compound) and not t.ground:
        out: set[str] = set()
        for a in t.args:
            out |= variables(a)
        return out
    return set()


def coerce(t) -> SiTerm:
    """Accept a term or a bare string (token or variable name)."""
    if isinstance(t, (Token, Compound, Var)):
        return t
    if isinstance(t, int) and t >= 0:
        return Token(str(t))
    if isinstance(t, str):
        return Var(t) if is_var_name(t) else Token(t)
    raise TermError(f"cannot build a term from {t!r}")


class _Functor:
    """``f = functor("f"); f(a, b)`` builds compounds tersely."""

    def __init__(self, name: str):
        if not LOWER_IDENT.match(name):
            raise TermError(f"invalid functor name {name!r}")
        self.name = name

    def __call__(self, *args) -> Compound:
        return Compound(self.name, tuple(coerce(a) for a in args))

    def __repr__(self):
        return f"functor({self.name!r})"


def functor(name: str) -> _Functor:
    return _Functor(name)
