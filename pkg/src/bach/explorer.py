"""Exhaustive bounded search over constrained executions.

The random runner commits to each step it takes, so it can dead-end
although a successful path exists.  ``search`` backtracks instead: a
depth-first walk over ``constrained_step`` successors, in their list
order, that returns the first configuration whose residual formula is
satisfied.  Results are deterministic for a given model.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .agent import E, Agent, ProcEnv
from .interpreter import (
    Configuration,
    agent_transitions,
    constrained_step,
    initial_configuration,
)
from .logic import BslFormula, format_formula, is_satisfied
from .store import Store
from .term import render


class SearchStatus(str, enum.Enum):
    WITNESS = "Witness"
    EXHAUSTED = "Exhausted"
    DEPTH_LIMIT = "DepthLimit"

    def __str__(self):
        return self.value


@dataclass
class SearchStats:
    explored: int = 0
    max_depth: int = 0


@dataclass(frozen=True)
class Witness:
    trace: tuple
    final: Configuration
    path: tuple = ()  # configuration after each step


@dataclass
class SearchResult:
    status: SearchStatus
    witness: Optional[Witness] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.WITNESS


def search(a: Agent, f: BslFormula, env: ProcEnv, fenv: Mapping[str, BslFormula],
           max_depth: int = 64, all: bool = False, store: Optional[Store] = None,
           on_visit: Optional[Callable[[Configuration, int], None]] = None):
    """Depth-first search for a configuration with satisfied formula.

    ``max_depth`` bounds the number of constrained steps.  In the default
    mode the first witness in DFS order is returned, and states are
    memoized with the smallest depth they were reached at (a state seen
    again at the same or greater depth cannot do better).  With ``all``
    every witness path up to ``max_depth`` is returned, in DFS order, as a
    list of results; no memoization is done since distinct paths to a
    state are distinct witnesses.  ``on_visit(config, depth)`` is called
    for every configuration popped from the stack.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    stats = SearchStats()
    visited: dict = {}
    witnesses: list[SearchResult] = []
    cut = False
    stack = [(initial_configuration(a, f, store), 0, None)]
    while stack:
        node = stack.pop()
        c, depth, _ = node
        if not all:
            key = c.key()
            best = visited.get(key)
            if best is not None and best <= depth:
                continue
            visited[key] = depth
        stats.explored += 1
        stats.max_depth = max(stats.max_depth, depth)
        if on_visit is not None:
            on_visit(c, depth)
        if is_satisfied(c.formula):
            w = SearchResult(SearchStatus.WITNESS, Witness(c.trace, c, _path(node)), stats)
            if not all:
                return w
            witnesses.append(w)
            continue
        succ = constrained_step(c, env, fenv)
        if not succ:
            continue
        if depth >= max_depth:
            cut = True
            continue
        stack.extend((s, depth + 1, node) for s in reversed(succ))
    status = SearchStatus.DEPTH_LIMIT if cut else SearchStatus.EXHAUSTED
    if all:
        return witnesses or [SearchResult(status, None, stats)]
    return SearchResult(status, None, stats)


def _path(node) -> tuple:
    out = []
    while node is not None and node[2] is not None:
        out.append(node[0])
        node = node[2]
    return tuple(reversed(out))


def replay(a: Agent, f: BslFormula, env: ProcEnv, fenv: Mapping[str, BslFormula],
           trace, store: Optional[Store] = None) -> Optional[Configuration]:
    """Follow *trace* label by label through ``constrained_step``.

    Returns a reachable final configuration whose formula is satisfied if
    one exists along the labels, else the first one found, or ``None``
    when some label cannot be matched.  Branching over equal labels is
    explored exhaustively.
    """
    frontier = [initial_configuration(a, f, store)]
    for lab in trace:
        nxt = []
        for c in frontier:
            if is_satisfied(c.formula):
                continue
            nxt.extend(s for s in constrained_step(c, env, fenv) if s.trace[-1] == lab)
        if not nxt:
            return None
        frontier = list(dict.fromkeys(nxt))
    for c in frontier:
        if is_satisfied(c.formula):
            return c
    return frontier[0]


def reachable_stores(a: Agent, s0: Optional[Store], env: ProcEnv,
                     max_depth: int = 64) -> set[Store]:
    """Stores of maximal configurations reachable in at most ``max_depth`` steps.

    A configuration is maximal when its agent has terminated or no
    transition is enabled.
    """
    level = {(initial_configuration(a, None, s0).agent, s0 if s0 is not None else Store())}
    seen = set(level)
    out: set[Store] = set()
    for _ in range(max_depth + 1):
        nxt = set()
        for agent, store in level:
            succ = [] if agent is E else agent_transitions(agent, store, env)
            if not succ:
                out.add(store)
                continue
            for _, a2, s2 in succ:
                if (a2, s2) not in seen:
                    seen.add((a2, s2))
                    nxt.add((a2, s2))
        if not nxt:
            break
        level = nxt
    return out


def step_records(path) -> list[dict]:
    """One structured record per step for a sequence of configurations.

    ``path[i]`` is the configuration reached by step ``i + 1``.
    """
    records = []
    for i, c in enumerate(path, start=1):
        lab = c.trace[-1]
        records.append({
            "index": i,
            "kind": lab.kind,
            "term": render(lab.term),
            "store": [f"{r} : {n}" for r, n in c.store.sorted_entries()],
            "formula": "-" if c.formula is None else format_formula(c.formula),
        })
    return records
