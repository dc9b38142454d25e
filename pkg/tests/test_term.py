import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bach.errors import TermError
from bach.parser import parse_term
from bach.term import (
    Compound,
    Token,
    Var,
    coerce,
    functor,
    make_compound,
    make_token,
    make_var,
    render,
    substitute,
    variables,
)
from gen import ground_term_st


def naive_substitute(t, var, value):
    if isinstance(t, Var):
        return value if t.name == var else t
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(naive_substitute(a, var, value) for a in t.args))
    return t


def random_forest_term(rng, depth, with_vars=False):
    if depth == 0 or rng.random() < 0.3:
        if with_vars and rng.random() < 0.2:
            return Var(rng.choice(["X", "Y", "VPK"]))
        return Token(rng.choice(["a", "b", "na", "pkm", "x1", "7", "f"]))
    arity = rng.randint(1, 3)
    return Compound(rng.choice(["f", "g", "encrypt_i", "message"]),
                    tuple(random_forest_term(rng, depth - 1, with_vars) for _ in range(arity)))


class TestConstruction:
    def test_token_identity(self):
        assert make_token("na") == Token("na")
        assert make_token("a") == make_token("a")

    @pytest.mark.parametrize("bad", ["", "Alice", "1a", "a-b", "a b"])
    def test_bad_token_names(self, bad):
        with pytest.raises(TermError):
            make_token(bad)

    def test_numeral_tokens(self):
        assert render(make_token("12")) == "12"
        assert coerce(3) == Token("3")

    def test_compound(self):
        t = make_compound("encrypt_i", [Token("na"), Token("alice"), Token("pkb")])
        assert render(t) == "encrypt_i(na,alice,pkb)"
        assert t.ground and t.arity == 3

    def test_non_ground_compound(self):
        t = make_compound("f", [make_compound("g", [make_var("X")])])
        assert not t.ground
        assert variables(t) == {"X"}

    def test_zero_arity_rejected(self):
        with pytest.raises(TermError):
            make_compound("f", [])

    def test_bad_var_name(self):
        with pytest.raises(TermError):
            make_var("x")

    def test_functor_builder(self):
        message = functor("message")
        assert message("alice", "Y", 1) == Compound("message", (Token("alice"), Var("Y"), Token("1")))
        with pytest.raises(TermError):
            functor("Bad")


class TestRender:
    def test_examples(self):
        enc = functor("encrypt_ii")
        assert render(enc("na", "nb", "pka")) == "encrypt_ii(na,nb,pka)"
        assert render(Token("a")) == "a"
        t = functor("message")("alice", "mallory", functor("encrypt_iii")("nb", "pkm"))
        assert render(t) == "message(alice,mallory,encrypt_iii(nb,pkm))"

    def test_injective_on_random_forest(self):
        rng = random.Random(20261016)
        seen = {}
        for _ in range(1000):
            t = random_forest_term(rng, 5)
            r = render(t)
            if r in seen:
                assert seen[r] == t
            seen[r] = t
        # distinct structures among the sample must give distinct strings
        assert len(set(seen.values())) == len(seen)

    @given(ground_term_st, ground_term_st)
    def test_injective_property(self, t1, t2):
        assert (render(t1) == render(t2)) == (t1 == t2)

    @given(ground_term_st)
    def test_parse_inverts_render(self, t):
        assert parse_term(render(t)) == t


class TestSubstitute:
    def test_examples(self):
        msg = functor("message")
        assert substitute(msg("Y", "bob", "na"), "Y", Token("mallory")) == msg("mallory", "bob", "na")
        assert substitute(Token("na"), "Y", Token("bob")) == Token("na")
        enc = functor("encrypt_i")
        assert substitute(enc("na", "VAg", "VPK"), "VPK", Token("pkm")) == enc("na", "VAg", "pkm")

    def test_matches_naive_rewrite(self):
        rng = random.Random(5)
        for _ in range(1000):
            t = random_forest_term(rng, 4, with_vars=True)
            var = rng.choice(["X", "Y", "VPK"])
            value = random_forest_term(rng, 2)
            assert substitute(t, var, value) == naive_substitute(t, var, value)

    def test_absent_variable_is_identity(self):
        rng = random.Random(6)
        for _ in range(300):
            t = random_forest_term(rng, 4, with_vars=True)
            if "Z" not in variables(t):
                assert substitute(t, "Z", Token("a")) == t

    @given(st.integers(0, 2**32 - 1))
    def test_idempotent(self, seed):
        rng = random.Random(seed)
        t = random_forest_term(rng, 4, with_vars=True)
        value = random_forest_term(rng, 2)
        once = substitute(t, "X", value)
        assert substitute(once, "X", value) == once
