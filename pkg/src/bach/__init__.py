"""Bach: a Linda dialect over a shared multiset store, with bsL-constrained
execution and bounded search.

Typical use::

    from bach import build_ns_model, search
    m = build_ns_model()
    result = search(m.entry_agent(), m.goal_formula(), m.procs, m.formulae, max_depth=20)
"""

from .agent import (
    E,
    Agent,
    Call,
    Choice,
    GSum,
    Par,
    ProcEnv,
    Seq,
    ask,
    call,
    cases,
    choice,
    expand_gsum,
    get,
    gsum,
    nask,
    normalize,
    par,
    seq,
    tell,
)
from .errors import BachError, ModelError, ParseError
from .explorer import SearchResult, SearchStatus, reachable_stores, search
from .interpreter import (
    Configuration,
    RunOutcome,
    Status,
    StepLabel,
    agent_transitions,
    constrained_step,
    execute,
    run_one,
)
from .logic import EPSILON, FormulaEnv, FVar, bf, define_formula, derive, sat_basic
from .ns_model import build_honest_model, build_ns_model, expected_attack_summary
from .parser import Model, load, parse_agent, parse_formula, parse_program, parse_term, pretty
from .store import Store
from .term import Compound, Token, Var, make_compound, make_token, render, substitute

__version__ = "0.1.0"
