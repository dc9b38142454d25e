import pytest

from bach.agent import choice_spine, expand_gsum, format_agent
from bach.explorer import replay, search
from bach.interpreter import StepLabel, constrained_step, initial_configuration
from bach.logic import FVar, derive, is_satisfied
from bach.ns_model import (
    UnknownPrincipal,
    a_commit,
    a_running,
    alice,
    alice_agent,
    attack_final_store_terms,
    b_commit,
    b_running,
    bob,
    build_honest_model,
    build_ns_model,
    encrypt_i,
    encrypt_ii,
    encrypt_iii,
    exchange_projection,
    expected_attack_summary,
    load_ns_file,
    mallory,
    message,
    na,
    nb,
    ns_formulae,
    pka,
    pkb,
    pkm,
    public_key,
)
from bach.parser import parse_term
from bach.store import Store
from bach.term import Token


@pytest.fixture(scope="module")
def ns():
    return build_ns_model()


@pytest.fixture(scope="module")
def witness(ns):
    r = search(ns.entry_agent(), ns.goal_formula(), ns.procs, ns.formulae, max_depth=20)
    assert r.found
    return r.witness


def test_public_key():
    assert public_key(alice) == pka
    assert public_key(bob) == pkb
    assert public_key(mallory) == pkm
    with pytest.raises(UnknownPrincipal):
        public_key(Token("eve"))


def test_vocabulary_is_distinct():
    toks = [na, nb, Token("nm"), pka, pkb, pkm, alice, bob, mallory]
    assert len(set(toks)) == 9
    assert (encrypt_i(na, alice, pkb).arity, encrypt_ii(na, nb, pka).arity, encrypt_iii(nb, pkb).arity) == (3, 3, 2)
    assert message(alice, bob, na).arity == 3


def test_alice_alternatives():
    outer = choice_spine(alice_agent())
    assert len(outer) == 2
    for branch in outer:
        # tell ; tell ; sum WNonce in [na,nb,nm] { ... }
        inner = branch.right
        assert len(choice_spine(expand_gsum(inner))) == 3


def test_f_rejects_session_start_with_bob():
    env = ns_formulae()
    assert derive(Store([a_running(bob)]), FVar("F"), env) == []
    assert derive(Store([a_running(bob), b_commit(alice)]), FVar("F"), env) != []


def test_first_step_never_opens_honest_session(ns):
    c = initial_configuration(ns.entry_agent(), ns.goal_formula())
    labels = {str(s.trace[-1]) for s in constrained_step(c, ns.procs, ns.formulae)}
    assert "tell(a_running(bob))" not in labels
    assert "tell(b_running(alice))" not in labels
    assert labels == {"tell(a_running(mallory))", "tell(b_running(mallory))"}


def test_expected_summary_rows():
    rows = expected_attack_summary()
    assert len(rows) == 6
    assert rows[0].content == encrypt_i(na, alice, pkm)
    assert rows[2].content == encrypt_ii(na, nb, pka)
    assert rows[5].content == encrypt_iii(nb, pkb)
    assert str(rows[0]) == "Alice -> Mallory : encrypt_i(na,alice,pkm)"


def test_witness_has_attack_shape(witness):
    assert len(witness.trace) == 16
    assert exchange_projection(witness.trace) == expected_attack_summary()
    assert witness.final.store == Store(attack_final_store_terms())
    assert all(witness.final.store.count(t) == 1 for t in attack_final_store_terms())


def test_listing_is_a_constrained_trace(ns):
    listing = """
        tell(a_running(mallory))
        tell(b_running(mallory))
        tell(message(alice,mallory,encrypt_i(na,alice,pkm)))
        get(message(alice,mallory,encrypt_i(na,alice,pkm)))
        tell(message(mallory,bob,encrypt_i(na,alice,pkb)))
        get(message(mallory,bob,encrypt_i(na,alice,pkb)))
        tell(message(bob,mallory,encrypt_ii(na,nb,pka)))
        get(message(bob,mallory,encrypt_ii(na,nb,pka)))
        tell(message(mallory,alice,encrypt_ii(na,nb,pka)))
        get(message(mallory,alice,encrypt_ii(na,nb,pka)))
        tell(message(alice,mallory,encrypt_iii(nb,pkm)))
        get(message(alice,mallory,encrypt_iii(nb,pkm)))
        tell(a_commit(mallory))
        tell(message(mallory,bob,encrypt_iii(nb,pkb)))
        get(message(mallory,bob,encrypt_iii(nb,pkb)))
        tell(b_commit(alice))
    """
    trace = []
    for line in listing.split():
        kind, rest = line.split("(", 1)
        trace.append(StepLabel(kind, parse_term(rest[:-1])))
    c = replay(ns.entry_agent(), ns.goal_formula(), ns.procs, ns.formulae, trace)
    assert c is not None and c.formula is not None
    assert is_satisfied(c.formula)
    assert c.store == Store(attack_final_store_terms())


def test_file_matches_builder(ns):
    assert load_ns_file() == ns


def test_honest_run():
    m = build_honest_model()
    r = search(m.entry_agent(), m.goal_formula(), m.procs, m.formulae, max_depth=20)
    assert r.found and len(r.witness.trace) == 10
    s = r.witness.final.store
    assert s.ask(a_commit(bob)) and s.ask(b_commit(alice))


def test_formula_excludes_honest_session_markers(ns):
    bad = (a_running(bob), b_running(alice))
    seen = []

    def visit(c, depth):
        seen.append(c)
        assert not any(c.store.ask(t) for t in bad)

    search(ns.entry_agent(), ns.goal_formula(), ns.procs, ns.formulae, max_depth=20, on_visit=visit)
    assert len(seen) > 10


def test_mallory_swaps_only_his_key(ns):
    text = format_agent(ns.procs["Mallory"].body)
    assert "get(message(alice,mallory,encrypt_i(VNonce,VAg,pkm))) ; tell(message(mallory,bob,encrypt_i(VNonce,VAg,pkb)))" in text
    assert "get(message(bob,mallory,encrypt_ii(VN1,VN2,pkm))) ; tell(message(mallory,alice,encrypt_ii(VN1,VN2,pka)))" in text
    assert "get(message(alice,mallory,encrypt_iii(VN,pka))) ; tell(message(mallory,bob,encrypt_iii(VN,pka)))" in text
