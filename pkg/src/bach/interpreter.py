"""Small-step execution of Bach agents, optionally constrained by bsL formulae.

``agent_transitions`` enumerates every one-step successor in a fixed
left-to-right order; the explorer builds on it.  ``run_one`` is the
randomized single stepper: at every parallel or choice node it flips a
coin to decide which side to try first and falls back to the other side
when that fails.  ``execute`` drives constrained runs by sampling one
successor of ``constrained_step`` per step.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .agent import (
    E,
    Agent,
    Ask,
    Call,
    Choice,
    Get,
    GSum,
    Nask,
    Par,
    Primitive,
    ProcEnv,
    Seq,
    Tell,
    expand_gsum,
    format_agent,
    mk_par,
    mk_seq,
    normalize,
)
from .logic import BslFormula, derive, format_formula, is_satisfied
from .store import Store
from .term import SiTerm, render

Rng = Union[random.Random, int, None]


@dataclass(frozen=True)
class StepLabel:
    kind: str
    term: SiTerm

    def __str__(self):
        return f"{self.kind}({render(self.term)})"


@dataclass(frozen=True)
class Configuration:
    """Agent, store and residual formula, plus the labels of the steps so far.

    ``formula`` is ``None`` for unconstrained runs.
    """

    agent: Agent
    store: Store = field(default_factory=Store)
    formula: Optional[BslFormula] = None
    trace: tuple = ()

    def key(self):
        """Identity of the state, ignoring how it was reached."""
        return (self.agent, self.store, self.formula)

    def describe(self) -> str:
        f = "-" if self.formula is None else format_formula(self.formula)
        return f"<{format_agent(self.agent)}, {f} | {self.store!r}>"


class Status(str, enum.Enum):
    FORMULA_SATISFIED = "FormulaSatisfied"
    AGENT_TERMINATED = "AgentTerminated"
    STUCK = "Stuck"
    STEP_LIMIT = "StepLimit"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RunOutcome:
    status: Status
    final: Configuration
    path: tuple = ()  # configuration after each step

    @property
    def trace(self) -> tuple:
        return self.final.trace


Transition = tuple  # (StepLabel, Agent, Store)


def make_rng(rng: Rng) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(0 if rng is None else rng)


def _primitive_step(a: Primitive, s: Store) -> Optional[Store]:
    if isinstance(a, Tell):
        return s.tell(a.term)
    if isinstance(a, Ask):
        return s if s.ask(a.term) else None
    if isinstance(a, Get):
        return s.get(a.term)
    if isinstance(a, Nask):
        return s if s.nask(a.term) else None
    raise TypeError(f"unknown primitive {a!r}")


def agent_transitions(a: Agent, s: Store, env: ProcEnv) -> list[Transition]:
    """Every ``(label, A', s')`` with ``<a | s> -> <A' | s'>``, left to right."""
    if isinstance(a, Primitive):
        s2 = _primitive_step(a, s)
        return [] if s2 is None else [(StepLabel(a.kind, a.term), E, s2)]
    if isinstance(a, Seq):
        return [(lab, mk_seq(a2, a.right), s2)
                for lab, a2, s2 in agent_transitions(a.left, s, env)]
    if isinstance(a, Par):
        out = [(lab, mk_par(a2, a.right), s2)
               for lab, a2, s2 in agent_transitions(a.left, s, env)]
        out += [(lab, mk_par(a.left, a2), s2)
                for lab, a2, s2 in agent_transitions(a.right, s, env)]
        return out
    if isinstance(a, Choice):
        return agent_transitions(a.left, s, env) + agent_transitions(a.right, s, env)
    if isinstance(a, GSum):
        return agent_transitions(expand_gsum(a), s, env)
    if isinstance(a, Call):
        return agent_transitions(env.resolve_call(a), s, env)
    if a is E:
        return []
    raise TypeError(f"not an agent: {a!r}")


def _attempt(a: Agent, s: Store, env: ProcEnv, rng: random.Random) -> Optional[Transition]:
    if isinstance(a, Primitive):
        s2 = _primitive_step(a, s)
        return None if s2 is None else (StepLabel(a.kind, a.term), E, s2)
    if isinstance(a, Seq):
        r = _attempt(a.left, s, env, rng)
        if r is None:
            return None
        lab, a2, s2 = r
        return lab, mk_seq(a2, a.right), s2
    if isinstance(a, (Par, Choice)):
        right_first = rng.getrandbits(1)
        sides = (a.right, a.left) if right_first else (a.left, a.right)
        for side in sides:
            r = _attempt(side, s, env, rng)
            if r is None:
                continue
            lab, a2, s2 = r
            if isinstance(a, Choice):
                return r
            if side is a.left:
                return lab, mk_par(a2, a.right), s2
            return lab, mk_par(a.left, a2), s2
        return None
    if isinstance(a, GSum):
        return _attempt(expand_gsum(a), s, env, rng)
    if isinstance(a, Call):
        return _attempt(env.resolve_call(a), s, env, rng)
    if a is E:
        return None
    raise TypeError(f"not an agent: {a!r}")


def run_one(c: Configuration, env: ProcEnv, rng: Rng = None) -> tuple[bool, Configuration]:
    """One unconstrained randomized step; ``(False, c)`` when nothing can move."""
    rng = make_rng(rng)
    r = _attempt(c.agent, c.store, env, rng)
    if r is None:
        return False, c
    lab, a2, s2 = r
    return True, Configuration(a2, s2, c.formula, c.trace + (lab,))


def constrained_step(c: Configuration, env: ProcEnv,
                     fenv: Mapping[str, BslFormula]) -> list[Configuration]:
    """Successors allowed by the formula, judged on the store each step produces."""
    if c.formula is None or is_satisfied(c.formula):
        raise ValueError("constrained_step needs an unsatisfied formula")
    out = []
    for lab, a2, s2 in agent_transitions(c.agent, c.store, env):
        trace = c.trace + (lab,)
        for f2 in derive(s2, c.formula, fenv):
            out.append(Configuration(a2, s2, f2, trace))
    return out


def initial_configuration(a: Agent, f: Optional[BslFormula] = None,
                          store: Optional[Store] = None) -> Configuration:
    return Configuration(normalize(a), store if store is not None else Store(), f, ())


def execute(a: Agent, f: Optional[BslFormula], env: ProcEnv,
            fenv: Optional[Mapping[str, BslFormula]] = None, rng: Rng = None,
            max_steps: int = 10_000, store: Optional[Store] = None) -> RunOutcome:
    """Run until the formula is met, the agent ends, it blocks, or the budget runs out.

    A run never backtracks: when the sampled path dead-ends the outcome is
    ``Stuck`` even if another path would have met the formula.  With
    ``f=None`` the run is unconstrained and steps with ``run_one``.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    rng = make_rng(rng)
    fenv = fenv or {}
    c = initial_configuration(a, f, store)
    path = []

    def outcome(status):
        return RunOutcome(status, c, tuple(path))

    for _ in range(max_steps):
        if f is not None and is_satisfied(c.formula):
            return outcome(Status.FORMULA_SATISFIED)
        if c.agent is E:
            return outcome(Status.AGENT_TERMINATED)
        if f is None:
            stepped, c = run_one(c, env, rng)
            if not stepped:
                return outcome(Status.STUCK)
        else:
            succ = constrained_step(c, env, fenv)
            if not succ:
                return outcome(Status.STUCK)
            c = succ[rng.randrange(len(succ))]
        path.append(c)
    if f is not None and is_satisfied(c.formula):
        return outcome(Status.FORMULA_SATISFIED)
    if c.agent is E:
        return outcome(Status.AGENT_TERMINATED)
    return outcome(Status.STEP_LIMIT)
