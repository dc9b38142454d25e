import random

import pytest

from bach.agent import Choice, GSum, Par, ProcEnv, Seq, ask, call, format_agent, gsum, nask, seq, tell
from bach.errors import (
    BachError,
    ArityError,
    BinderError,
    DuplicateDefinition,
    EmptyDomain,
    ParseError,
    UnguardedFormula,
    UnguardedRecursion,
    UnknownProcedure,
)
from bach.logic import Basic, FChoice, FSeq, FVar, bf
from bach.parser import Model, parse_agent, parse_formula, parse_program, parse_term, pretty, tokenize
from bach.term import Compound, Token, Var, functor
from gen import rand_agent, rand_model

f = functor("f")


class TestPrograms:
    def test_single_guarded_procedure(self):
        m = parse_program("proc P = tell(a) ; P .")
        assert list(m.procs) == ["P"]
        assert m.procs["P"].body == Seq(tell("a"), call("P"))

    def test_precedence_keeps_parentheses(self):
        m = parse_program("proc A = tell(f(na)) + (ask(b) || nask(c)) .")
        assert m.procs["A"].body == Choice(tell(f("na")), Par(ask("b"), nask("c")))

    def test_precedence_without_parentheses(self):
        a = parse_agent("tell(a) ; tell(b) || tell(c) + tell(d) ; tell(e)")
        assert a == Choice(Par(Seq(tell("a"), tell("b")), tell("c")), Seq(tell("d"), tell("e")))

    def test_left_associative(self):
        assert parse_agent("tell(a) ; tell(b) ; tell(c)") == Seq(Seq(tell("a"), tell("b")), tell("c"))
        assert parse_agent("tell(a) + tell(b) + tell(c)") == Choice(Choice(tell("a"), tell("b")), tell("c"))

    def test_parameters_and_sum(self):
        m = parse_program("""
            proc Q(X) = sum Y in [a, b] { tell(f(X, Y)) } .
            proc Main = Q(na) ; Q(nb) .
            run Main .
        """)
        assert m.procs["Q"].params == ("X",)
        assert m.procs["Q"].body == GSum("Y", (Token("a"), Token("b")), tell(Compound("f", (Var("X"), Var("Y")))))
        assert m.entry == "Main" and m.goal is None

    def test_formulae_and_run(self):
        m = parse_program("""
            proc P = tell(a) .
            form inproper = !(bf(x) | bf(y)) .
            form F = (inproper ; F) + bf(a) .
            run P with F .
        """)
        assert m.formulae["F"] == FChoice(FSeq(FVar("inproper"), FVar("F")), Basic(bf("a")))
        assert m.goal_formula() == FVar("F")
        assert m.entry_agent() == call("P")

    def test_protocol_is_default_entry(self):
        m = parse_program("proc Protocol = tell(a) .")
        assert m.entry_agent() == call("Protocol")
        assert m.goal_formula() is None

    def test_comments(self):
        m = parse_program("# header\nproc P = tell(a) # trailing\n  ; tell(b) .\n")
        assert m.procs["P"].body == Seq(tell("a"), tell("b"))


class TestErrors:
    def test_unguarded(self):
        with pytest.raises(UnguardedRecursion) as ei:
            parse_program("proc P = P + tell(a) .")
        assert ei.value.name == "P"

    def test_unguarded_formula(self):
        with pytest.raises(UnguardedFormula):
            parse_program("form G = G + bf(a) .")

    def test_unknown_procedure(self):
        with pytest.raises(UnknownProcedure):
            parse_program("proc P = tell(a) ; Q .")

    def test_arity(self):
        with pytest.raises(ArityError):
            parse_program("proc P(X) = tell(f(X)) .\nproc M = tell(a) ; P .")

    def test_duplicate(self):
        with pytest.raises(DuplicateDefinition):
            parse_program("proc P = tell(a) .\nproc P = tell(b) .")

    def test_empty_domain(self):
        with pytest.raises(EmptyDomain):
            parse_program("proc P = sum X in [] { tell(f(X)) } .")

    def test_unbound_variable(self):
        with pytest.raises(BinderError):
            parse_program("proc P = tell(f(X)) .")

    @pytest.mark.parametrize("text, line, col", [
        ("proc P = tell(a) ;; tell(b) .", 1, 19),
        ("proc P = tell(a)\n  + ask() .", 2, 9),
        ("proc P = tell(a) ; @ .", 1, 20),
        ("proc P = tell(a)", 1, 17),
        ("form F = bf(a) ; (F | bf(b)) .", 1, 21),
        ("proc Q = tell(a) .\nproc P = tell(A) .", 2, 6),
    ])
    def test_positions(self, text, line, col):
        with pytest.raises(Exception) as ei:
            parse_program(text)
        e = ei.value
        assert (e.line, e.column) == (line, col), str(e)

    def test_syntax_error_message_has_position(self):
        with pytest.raises(ParseError) as ei:
            parse_program("\n\nproc P = tell(a) . )")
        assert str(ei.value).startswith("3:20:")

    def test_positions_point_at_a_token(self):
        rng = random.Random(2)
        src = "proc P = tell(f(a,b)) ; ask(c) || nask(d) + get(e) .\nform F = bf(a) ; F + bf(b) .\n"
        failures = 0
        for _ in range(300):
            i = rng.randrange(len(src))
            broken = src[:i] + rng.choice([")", "(", ";", "$", ".", ",", "+"]) + src[i:]
            try:
                parse_program(broken)
            except ParseError as e:
                failures += 1
                try:
                    starts = {(t.line, t.column) for t in tokenize(broken)}
                except ParseError:
                    line = broken.count("\n", 0, i) + 1
                    starts = {(line, i - (broken.rfind("\n", 0, i) + 1) + 1)}
                assert (e.line, e.column) in starts, (broken, str(e))
            except BachError:
                pass
        assert failures > 100

    def test_basic_operators_need_basic_operands(self):
        with pytest.raises(ParseError):
            parse_formula("F & bf(a)")


class TestPretty:
    def test_seq_in_choice(self):
        assert format_agent(Choice(Seq(tell("a"), tell("b")), tell("c"))) == "tell(a) ; tell(b) + tell(c)"

    def test_gsum_layout(self):
        m = Model(ProcEnv().define("A", (), gsum("Y", ["bob", "mallory"], seq(tell(f("Y")), ask(f("Y"))))))
        text = pretty(m)
        assert text.startswith("proc A =\n  sum Y in [bob,mallory] {\n")
        assert parse_program(text) == m

    def test_terms(self):
        assert parse_term("message(alice,Y,encrypt_i(na,alice,pkb))") == Compound(
            "message", (Token("alice"), Var("Y"), Compound("encrypt_i", (Token("na"), Token("alice"), Token("pkb")))))

    def test_random_round_trip(self):
        rng = random.Random(99)
        for _ in range(200):
            m = rand_model(rng)
            assert parse_program(pretty(m)) == m

    def test_agent_round_trip(self):
        rng = random.Random(4)
        for _ in range(300):
            a = rand_agent(rng, 5, calls=False)
            assert parse_agent(format_agent(a)) == a


def test_tokenize_tracks_positions():
    toks = tokenize("proc P =\n  tell(a) .")
    assert [(t.text, t.line, t.column) for t in toks[:4]] == [("proc", 1, 1), ("P", 1, 6), ("=", 1, 8), ("tell", 2, 3)]
