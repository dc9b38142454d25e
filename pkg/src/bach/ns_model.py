"""Needham-Schroeder public-key protocol with an intruder.

Alice and Bob run one session each; Mallory sits on the network (the
store) and relays the three message kinds, re-encrypting whatever he can
decrypt.  Constraining runs by ``F`` (no session between Alice and Bob is
ever started, yet Bob ends up committing to Alice) yields Lowe's
man-in-the-middle attack.

The key lookup ``public_key`` and Mallory's "re-encrypt if it is my key"
test are host-side computations, so the sums whose bodies use them are
enumerated case by case with :func:`bach.agent.cases`.  The shipped
``needham_schroeder.bach`` spells out the same cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

from .agent import Agent, ProcEnv, call, cases, get, gsum, par, seq, tell
from .errors import BachError
from .logic import FormulaEnv, FVar, bf, fchoice, fseq
from .parser import Model, parse_program
from .term import SiTerm, Token, functor, render

na, nb, nm = Token("na"), Token("nb"), Token("nm")
pka, pkb, pkm = Token("pka"), Token("pkb"), Token("pkm")
alice, bob, mallory = Token("alice"), Token("bob"), Token("mallory")

encrypt_i = functor("encrypt_i")      # (nonce, agent, key)
encrypt_ii = functor("encrypt_ii")    # (nonce, nonce, key)
encrypt_iii = functor("encrypt_iii")  # (nonce, key)
message = functor("message")          # (sender, receiver, encrypted)
a_running = functor("a_running")
b_running = functor("b_running")
a_commit = functor("a_commit")
b_commit = functor("b_commit")

NONCES = (na, nb, nm)
KEYS = (pka, pkb, pkm)
PRINCIPALS = (alice, bob, mallory)

_KEY_OF = {alice: pka, bob: pkb, mallory: pkm}
_NAMES = {alice: "Alice", bob: "Bob", mallory: "Mallory"}


class UnknownPrincipal(BachError, KeyError):
    pass


def public_key(principal: SiTerm) -> Token:
    try:
        return _KEY_OF[principal]
    except KeyError:
        raise UnknownPrincipal(f"no public key for {render(principal)}") from None


def alice_agent(partners: Iterable[SiTerm] = (bob, mallory)) -> Agent:
    def session(y):
        return seq(
            tell(a_running(y)),
            tell(message(alice, y, encrypt_i(na, alice, public_key(y)))),
            gsum("WNonce", NONCES, seq(
                get(message(y, alice, encrypt_ii(na, "WNonce", pka))),
                tell(message(alice, y, encrypt_iii("WNonce", public_key(y)))),
                tell(a_commit(y)),
            )),
        )
    return cases(partners, session)


def bob_agent(partners: Iterable[SiTerm] = (alice, mallory)) -> Agent:
    partners = tuple(partners)

    def exchange(vag):
        return seq(
            get(message("Y", bob, encrypt_i(na, vag, pkb))),
            tell(message(bob, "Y", encrypt_ii(na, nb, public_key(vag)))),
            get(message("Y", bob, encrypt_iii(nb, pkb))),
            tell(b_commit(vag)),
        )
    return gsum("Y", partners, seq(tell(b_running("Y")), cases(partners, exchange)))


def _relay(got: SiTerm, sent: SiTerm) -> Agent:
    return seq(get(got), tell(sent), call("Mallory"))


def mallory_agent() -> Agent:
    def swap(vpk, own_key_target):
        return own_key_target if vpk == pkm else vpk

    first = gsum("VNonce", NONCES, gsum("VAg", (alice, bob), cases(KEYS, lambda vpk: _relay(
        message(alice, mallory, encrypt_i("VNonce", "VAg", vpk)),
        message(mallory, bob, encrypt_i("VNonce", "VAg", swap(vpk, pkb)))))))
    second = gsum("VN1", NONCES, gsum("VN2", NONCES, cases(KEYS, lambda vpk: _relay(
        message(bob, mallory, encrypt_ii("VN1", "VN2", vpk)),
        message(mallory, alice, encrypt_ii("VN1", "VN2", swap(vpk, pka)))))))
    third = gsum("VN", NONCES, cases(KEYS, lambda vpk: _relay(
        message(alice, mallory, encrypt_iii("VN", vpk)),
        message(mallory, bob, encrypt_iii("VN", swap(vpk, pkb))))))
    return first + second + third


def ns_formulae() -> FormulaEnv:
    env = FormulaEnv()
    env.define("inproper_init", ~(bf(a_running(bob)) | bf(b_running(alice))))
    env.define("end_session", bf(b_commit(alice)))
    env.define("F", fchoice(fseq("inproper_init", "F"), "end_session"))
    return env


def build_ns_model() -> Model:
    procs = ProcEnv()
    procs.define("Alice", (), alice_agent())
    procs.define("Bob", (), bob_agent())
    procs.define("Mallory", (), mallory_agent())
    procs.define("Protocol", (), par(call("Alice"), call("Bob"), call("Mallory")))
    m = Model(procs, ns_formulae(), entry="Protocol", goal="F")
    m.validate()
    return m


def build_honest_model() -> Model:
    """Alice talks to Bob only, Bob to Alice only, nobody in between."""
    procs = ProcEnv()
    procs.define("Alice", (), alice_agent((bob,)))
    procs.define("Bob", (), bob_agent((alice,)))
    procs.define("Protocol", (), par(call("Alice"), call("Bob")))
    formulae = FormulaEnv()
    formulae.define("done", bf(b_commit(alice)))
    formulae.define("G", fchoice(fseq(~bf(b_commit(alice)), "G"), "done"))
    m = Model(procs, formulae, entry="Protocol", goal="G")
    m.validate()
    return m


def ns_source() -> str:
    return resources.files("bach").joinpath("models/needham_schroeder.bach").read_text("utf-8")


def load_ns_file() -> Model:
    return parse_program(ns_source())


# -- attack summary -----------------------------------------------------------


@dataclass(frozen=True)
class Exchange:
    sender: SiTerm
    receiver: SiTerm
    content: SiTerm

    def __str__(self):
        return f"{_NAMES.get(self.sender, render(self.sender))} -> " \
               f"{_NAMES.get(self.receiver, render(self.receiver))} : {render(self.content)}"


def expected_attack_summary() -> list[Exchange]:
    return [
        Exchange(alice, mallory, encrypt_i(na, alice, pkm)),
        Exchange(mallory, bob, encrypt_i(na, alice, pkb)),
        Exchange(bob, mallory, encrypt_ii(na, nb, pka)),
        Exchange(mallory, alice, encrypt_ii(na, nb, pka)),
        Exchange(alice, mallory, encrypt_iii(nb, pkm)),
        Exchange(mallory, bob, encrypt_iii(nb, pkb)),
    ]


def exchange_projection(trace) -> list[Exchange]:
    """Pair each ``get`` of a message with the earliest unmatched ``tell`` of it.

    Exchanges come out in the order their messages were told; messages
    never taken off the store are left out.
    """
    pending: dict = {}
    matched = []
    for i, lab in enumerate(trace):
        t = lab.term
        if not (getattr(t, "functor", None) == "message" and t.arity == 3):
            continue
        if lab.kind == "tell":
            pending.setdefault(t, []).append(i)
        elif lab.kind == "get" and pending.get(t):
            matched.append((pending[t].pop(0), t))
    matched.sort(key=lambda p: p[0])
    return [Exchange(*t.args) for _, t in matched]


def attack_final_store_terms() -> list[SiTerm]:
    return [a_running(mallory), b_running(mallory), a_commit(mallory), b_commit(alice)]


def format_summary(exchanges: Optional[Iterable[Exchange]]) -> str:
    return "\n".join(str(x) for x in exchanges or ())
