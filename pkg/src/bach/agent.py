"""Bach agents: AST, builder helpers, procedure environments.

Agents are immutable trees.  Besides the functional builders (``seq``,
``par``, ``choice``, ``gsum``) agents support ``*`` (sequence), ``+``
(choice) and ``|`` (parallel).  Python gives these operators the same
relative precedence as the Scala embedding does, which is NOT the surface
syntax's: ``a * b + c | d`` is ``((a ; b) + c) || d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import (
    ArityError,
    BinderError,
    DuplicateDefinition,
    EmptyDomain,
    UnguardedRecursion,
    UnknownProcedure,
)
from .term import SiTerm, coerce, is_var_name, render, substitute_many, variables


class Agent:
    """Common base of every agent node."""

    __slots__ = ()

    def __mul__(self, other):
        return Seq(self, other)

    def __add__(self, other):
        return Choice(self, other)

    def __or__(self, other):
        return Par(self, other)

    def __str__(self):
        return format_agent(self)


class _EmptyAgent(Agent):
    """The terminated agent E."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "E"

    def __reduce__(self):
        return (_EmptyAgent, ())


E = _EmptyAgent()
Empty = E


@dataclass(frozen=True)
class Primitive(Agent):
    term: SiTerm
    kind = ""


@dataclass(frozen=True)
class Tell(Primitive):
    kind = "tell"


@dataclass(frozen=True)
class Ask(Primitive):
    kind = "ask"


@dataclass(frozen=True)
class Get(Primitive):
    kind = "get"


@dataclass(frozen=True)
class Nask(Primitive):
    kind = "nask"


PRIMITIVES = {cls.kind: cls for cls in (Tell, Ask, Get, Nask)}


@dataclass(frozen=True)
class Seq(Agent):
    left: Agent
    right: Agent


@dataclass(frozen=True)
class Par(Agent):
    left: Agent
    right: Agent


@dataclass(frozen=True)
class Choice(Agent):
    left: Agent
    right: Agent


@dataclass(frozen=True)
class GSum(Agent):
    """Choice indexed by ``binder`` ranging over ``domain``."""

    binder: str
    domain: tuple
    body: Agent

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))


@dataclass(frozen=True)
class Call(Agent):
    name: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


# -- builders -----------------------------------------------------------------


def tell(t) -> Tell:
    return Tell(coerce(t))


def ask(t) -> Ask:
    return Ask(coerce(t))


def get(t) -> Get:
    return Get(coerce(t))


def nask(t) -> Nask:
    return Nask(coerce(t))


def _fold(cls, agents):
    if not agents:
        raise ValueError(f"{cls.__name__} needs at least one agent")
    out = agents[0]
    for a in agents[1:]:
        out = cls(out, a)
    return out


def seq(*agents: Agent) -> Agent:
    """Left-nested sequential composition, as the parser builds it."""
    return _fold(Seq, agents)


def par(*agents: Agent) -> Agent:
    return _fold(Par, agents)


def choice(*agents: Agent) -> Agent:
    return _fold(Choice, agents)


def gsum(binder: str, domain: Iterable, body: Agent) -> GSum:
    if not is_var_name(binder):
        raise BinderError(f"binder {binder!r} must start with an uppercase letter")
    dom = tuple(coerce(d) for d in domain)
    if not dom:
        raise EmptyDomain(binder)
    return GSum(binder, dom, body)


def call(name: str, *args) -> Call:
    return Call(name, tuple(coerce(a) for a in args))


def cases(domain: Iterable, make: Callable[[SiTerm], Agent]) -> Agent:
    """Enumerate a sum whose body needs host-side computation per element.

    ``make`` runs once per element and the alternatives are joined with
    ``+`` (left-nested, matching ``a + b + c`` in the surface syntax).
    """
    return choice(*(make(coerce(d)) for d in domain))


# -- structural operations ----------------------------------------------------


def expand_gsum(g: GSum) -> Agent:
    """Right-nested choice of the body instantiated on each domain element."""
    if not g.domain:
        raise EmptyDomain(g.binder)
    alts = [substitute_agent(g.body, {g.binder: d}) for d in g.domain]
    out = alts[-1]
    for a in reversed(alts[:-1]):
        out = Choice(a, out)
    return out


def substitute_agent(a: Agent, mapping: Mapping[str, SiTerm]) -> Agent:
    if not mapping:
        return a
    if isinstance(a, Primitive):
        if a.term.ground:
            return a
        return type(a)(substitute_many(a.term, mapping))
    if isinstance(a, (Seq, Par, Choice)):
        return type(a)(substitute_agent(a.left, mapping), substitute_agent(a.right, mapping))
    if isinstance(a, GSum):
        inner = mapping
        if a.binder in mapping:
            inner = {k: v for k, v in mapping.items() if k != a.binder}
        return GSum(a.binder, tuple(substitute_many(d, mapping) for d in a.domain),
                    substitute_agent(a.body, inner))
    if isinstance(a, Call):
        return Call(a.name, tuple(substitute_many(t, mapping) for t in a.args))
    return a


def normalize(a: Agent) -> Agent:
    """Rewrite ``E ; A``, ``E || A`` and ``A || E`` to ``A``, bottom-up.

    ``A ; E`` also becomes ``A`` so that no ``E`` is left below a binary node.
    """
    if isinstance(a, Seq):
        left, right = normalize(a.left), normalize(a.right)
        if left is E:
            return right
        return left if right is E else Seq(left, right)
    if isinstance(a, Par):
        left, right = normalize(a.left), normalize(a.right)
        if left is E:
            return right
        if right is E:
            return left
        return Par(left, right)
    if isinstance(a, Choice):
        return Choice(normalize(a.left), normalize(a.right))
    if isinstance(a, GSum):
        return GSum(a.binder, a.domain, normalize(a.body))
    return a


def mk_seq(left: Agent, right: Agent) -> Agent:
    """Seq node after one step of its left component (E absorbed)."""
    return right if left is E else Seq(left, right)


def mk_par(left: Agent, right: Agent) -> Agent:
    if left is E:
        return right
    if right is E:
        return left
    return Par(left, right)


def choice_spine(a: Agent) -> list[Agent]:
    """Leaves of the top-level run of Choice nodes."""
    if isinstance(a, Choice):
        return choice_spine(a.left) + choice_spine(a.right)
    return [a]


def is_ground_agent(a: Agent) -> bool:
    return not free_variables(a)


def free_variables(a: Agent) -> set[str]:
    if isinstance(a, Primitive):
        return variables(a.term)
    if isinstance(a, (Seq, Par, Choice)):
        return free_variables(a.left) | free_variables(a.right)
    if isinstance(a, GSum):
        out = free_variables(a.body) - {a.binder}
        for d in a.domain:
            out |= variables(d)
        return out
    if isinstance(a, Call):
        out: set[str] = set()
        for t in a.args:
            out |= variables(t)
        return out
    return set()


def calls_in(a: Agent) -> list[Call]:
    if isinstance(a, Call):
        return [a]
    if isinstance(a, (Seq, Par, Choice)):
        return calls_in(a.left) + calls_in(a.right)
    if isinstance(a, GSum):
        return calls_in(a.body)
    return []


def unguarded_calls(a: Agent) -> list[str]:
    """Names called in positions reachable before any primitive executes."""
    if isinstance(a, Call):
        return [a.name]
    if isinstance(a, Seq):
        return unguarded_calls(a.left)
    if isinstance(a, (Par, Choice)):
        return unguarded_calls(a.left) + unguarded_calls(a.right)
    if isinstance(a, GSum):
        return unguarded_calls(a.body)
    return []


# -- pretty printing ----------------------------------------------------------

_PREC = {Choice: 1, Par: 2, Seq: 3}
_OPS = {Choice: "+", Par: "||", Seq: ";"}


def _prec(a: Agent) -> int:
    return _PREC.get(type(a), 4)


def format_agent(a: Agent, multiline: bool = False, indent: int = 0) -> str:
    """Surface syntax with minimal parentheses (';' > '||' > '+', left-assoc).

    With ``multiline`` set, ``sum`` bodies go on their own lines, indented
    two spaces deeper than the enclosing line.
    """
    if isinstance(a, Primitive):
        return f"{a.kind}({render(a.term)})"
    if isinstance(a, (Seq, Par, Choice)):
        p = _PREC[type(a)]
        left = format_agent(a.left, multiline, indent)
        right = format_agent(a.right, multiline, indent)
        if _prec(a.left) < p:
            left = f"({left})"
        if _prec(a.right) <= p:
            right = f"({right})"
        return f"{left} {_OPS[type(a)]} {right}"
    if isinstance(a, GSum):
        head = f"sum {a.binder} in [{','.join(render(d) for d in a.domain)}]"
        if multiline:
            pad = " " * (indent + 2)
            body = format_agent(a.body, True, indent + 2)
            return f"{head} {{\n{pad}{body}\n{' ' * indent}}}"
        return f"{head} {{ {format_agent(a.body)} }}"
    if isinstance(a, Call):
        if a.args:
            return f"{a.name}({','.join(render(t) for t in a.args)})"
        return a.name
    if a is E:
        return "E"
    raise TypeError(f"not an agent: {a!r}")


# -- procedures ---------------------------------------------------------------


@dataclass(frozen=True)
class ProcDef:
    params: tuple
    body: Agent


class ProcEnv:
    """Procedure definitions; built once, then only read."""

    def __init__(self, definitions: Optional[Mapping[str, ProcDef]] = None):
        self.definitions: dict[str, ProcDef] = {}
        self._resolved: dict[Call, Agent] = {}
        for name, d in (definitions or {}).items():
            self.define(name, d.params, d.body)

    def define(self, name: str, params: Sequence[str], body: Agent) -> "ProcEnv":
        if name in self.definitions:
            raise DuplicateDefinition("procedure", name)
        params = tuple(params)
        for p in params:
            if not is_var_name(p):
                raise BinderError(f"parameter {p!r} of {name!r} must start with an uppercase letter")
        if len(set(params)) != len(params):
            raise BinderError(f"repeated parameter in {name!r}")
        self.definitions[name] = ProcDef(params, body)
        self._resolved.clear()
        return self

    def __contains__(self, name):
        return name in self.definitions

    def __getitem__(self, name) -> ProcDef:
        return self.definitions[name]

    def __iter__(self):
        return iter(self.definitions)

    def __len__(self):
        return len(self.definitions)

    def __eq__(self, other):
        if not isinstance(other, ProcEnv):
            return NotImplemented
        return self.definitions == other.definitions

    def __repr__(self):
        return f"ProcEnv({list(self.definitions)})"

    def resolve_call(self, c: Call) -> Agent:
        """Body of ``c.name`` with formals replaced by the actual arguments."""
        cached = self._resolved.get(c)
        if cached is not None:
            return cached
        d = self.definitions.get(c.name)
        if d is None:
            raise UnknownProcedure(c.name)
        if len(d.params) != len(c.args):
            raise ArityError(c.name, len(d.params), len(c.args))
        body = substitute_agent(d.body, dict(zip(d.params, c.args)))
        self._resolved[c] = body
        return body

    def check_guarded(self) -> None:
        """Raise UnguardedRecursion unless every call cycle crosses a primitive."""
        edges = {n: set(unguarded_calls(d.body)) & self.definitions.keys()
                 for n, d in self.definitions.items()}
        for name in self.definitions:
            if _on_cycle(name, edges):
                raise UnguardedRecursion(name)

    def validate(self) -> None:
        """Resolution, arity, binder discipline, then guardedness."""
        for name, d in self.definitions.items():
            _check_body(self, name, d.body, set(d.params))
        self.check_guarded()


def _on_cycle(start: str, edges: Mapping[str, set]) -> bool:
    seen = set()
    stack = list(edges.get(start, ()))
    while stack:
        n = stack.pop()
        if n == start:
            return True
        if n in seen:
            continue
        seen.add(n)
        stack.extend(edges.get(n, ()))
    return False


def _check_terms(owner: str, terms, bound: set) -> None:
    for t in terms:
        free = variables(t) - bound
        if free:
            raise BinderError(f"unbound variable(s) {sorted(free)} in {owner!r}: {render(t)}")


def _check_body(env: ProcEnv, owner: str, a: Agent, bound: set) -> None:
    if isinstance(a, Primitive):
        _check_terms(owner, [a.term], bound)
    elif isinstance(a, (Seq, Par, Choice)):
        _check_body(env, owner, a.left, bound)
        _check_body(env, owner, a.right, bound)
    elif isinstance(a, GSum):
        if not a.domain:
            raise EmptyDomain(a.binder)
        _check_terms(owner, a.domain, bound)
        if a.binder in bound:
            raise BinderError(f"binder {a.binder!r} shadows an enclosing binder in {owner!r}")
        _check_body(env, owner, a.body, bound | {a.binder})
    elif isinstance(a, Call):
        d = env.definitions.get(a.name)
        if d is None:
            raise UnknownProcedure(a.name)
        if len(d.params) != len(a.args):
            raise ArityError(a.name, len(d.params), len(a.args))
        _check_terms(owner, a.args, bound)
    elif a is E:
        pass
    else:
        raise TypeError(f"not an agent: {a!r}")


def check_agent(env: ProcEnv, a: Agent, owner: str = "<agent>") -> None:
    """Validate a free-standing agent (e.g. an entry point) against *env*."""
    _check_body(env, owner, a, set())


def resolve_call(env: ProcEnv, c: Call) -> Agent:
    return env.resolve_call(c)


def check_guarded(env: ProcEnv) -> None:
    env.check_guarded()


__all__ = [
    "Agent", "E", "Empty", "Primitive", "Tell", "Ask", "Get", "Nask", "Seq", "Par",
    "Choice", "GSum", "Call", "ProcDef", "ProcEnv", "PRIMITIVES",
    "tell", "ask", "get", "nask", "seq", "par", "choice", "gsum", "call", "cases",
    "expand_gsum", "substitute_agent", "normalize", "format_agent", "resolve_call",
    "check_guarded", "check_agent", "choice_spine", "free_variables",
]
