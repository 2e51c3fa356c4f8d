"""Breadth-first model check of the bill lifecycle.

Every sequence of up to eight operations on one bill is explored (states
that look alike are merged).  Each operation either performs a transition
the model allows, with both invariances intact, or raises a domain error
and leaves the whole system exactly as it was.
"""

import copy
import functools
from fractions import Fraction

import pytest
from conftest import D0, FACE, day, fund, make_system, trade_claim

from moma import boe, chart
from moma.boe import BillState as S
from moma.errors import MomaError

MATURITY = day(60)
BEFORE = day(30)
NEGOTIABLE = {S.ACCEPTED, S.DISCOUNTED, S.TRANSFERRED}

OPS = {
    "accept": (lambda s: boe.accept(s, "B1", BEFORE), {S.DRAWN: {S.ACCEPTED}}),
    "discount": (lambda s: boe.discount(s, "B1", "BankA", Fraction(5, 100), BEFORE),
                 {S.ACCEPTED: {S.DISCOUNTED}, S.TRANSFERRED: {S.DISCOUNTED}}),
    "transfer_ab": (lambda s: boe.transfer_interbank(s, "B1", "BankA", "BankB", BEFORE),
                    {x: {S.TRANSFERRED} for x in NEGOTIABLE}),
    "transfer_ba": (lambda s: boe.transfer_interbank(s, "B1", "BankB", "BankA", BEFORE),
                    {x: {S.TRANSFERRED} for x in NEGOTIABLE}),
    "endorse_home": (lambda s: boe.endorse(s, "B1", "Home", BEFORE), {x: {S.TRANSFERRED} for x in NEGOTIABLE}),
    "endorse_seller": (lambda s: boe.endorse(s, "B1", "Seller", BEFORE), {x: {S.TRANSFERRED} for x in NEGOTIABLE}),
    "present": (lambda s: boe.present(s, "B1", MATURITY), {x: {S.PRESENTED} for x in NEGOTIABLE}),
    "settle": (lambda s: boe.settle(s, "B1", MATURITY), {S.PRESENTED: {S.SETTLED}}),
    "protest": (lambda s: boe.protest(s, "B1", MATURITY), {S.PRESENTED: {S.PROTESTED}}),
    "recourse": (lambda s: boe.resolve_recourse(s, "B1", None, MATURITY),
                 {S.PROTESTED: {S.PROTESTED, S.SETTLED}}),
    "archive": (lambda s: boe.archive(s, "B1", MATURITY), {S.SETTLED: {S.SETTLED}}),
}


def world(acceptor_funded: bool):
    s = make_system(("CB", "CentralBank"), ("BankA", "Bank"), ("BankB", "Bank"),
                    ("Seller", "Company"), ("Buyer", "Company"), ("Home", "Household"))
    trade_claim(s)
    fund(s, "Home", FACE)
    if acceptor_funded:
        fund(s, "Buyer", FACE, bank="BankB")
    boe.draw(s, "Seller", "Buyer", "Seller", FACE, MATURITY, D0, underlying="T1", bid="B1")
    return s


def bill_view(s):
    b = boe.bill(s, "B1")
    return (b.state, b.holder, b.archived, len(b.endorsements), tuple(b.history))


def abstract(s):
    b = boe.bill(s, "B1")
    money = tuple(sorted((a, chart.cash_balance(s, a)) for a in s.agents))
    deposits = tuple(sorted((a, n, bal) for a, lg in s.ledgers.items() for n, bal in lg.balances.items()
                            if lg.accounts[n].is_medium))
    return (b.state, b.holder, b.archived, len(b.endorsements), money, deposits)


def bill_claims(s):
    return sum(bal for lg in s.ledgers.values() for n, bal in lg.balances.items()
               if lg.accounts[n].instrument == "B1" and bal > 0)


@functools.lru_cache(maxsize=None)
def explore(acceptor_funded: bool, depth: int = 8):
    frontier = [world(acceptor_funded)]
    seen = {abstract(frontier[0])}
    transitions = set()
    for _ in range(depth):
        nxt = []
        for s in frontier:
            for name, (op, allowed) in OPS.items():
                trial = copy.deepcopy(s)
                before_state = boe.bill(trial, "B1").state
                before_fp, before_bill = trial.fingerprint(), bill_view(trial)
                try:
                    op(trial)
                except MomaError:
                    assert trial.fingerprint() == before_fp, name
                    assert bill_view(trial) == before_bill, name
                    continue
                after = boe.bill(trial, "B1")
                assert after.state in allowed.get(before_state, set()), (name, before_state, after.state)
                assert trial.debt_invariance().holds and trial.payment_invariance().holds, name
                assert boe.verify_chain(after)
                if after.state is S.SETTLED:
                    assert bill_claims(trial) == 0
                elif after.state is not S.DRAWN:
                    assert bill_claims(trial) == FACE
                transitions.add((before_state, name, after.state))
                key = abstract(trial)
                if key not in seen:
                    seen.add(key)
                    nxt.append(trial)
        frontier = nxt
    return frozenset(transitions)


@pytest.mark.parametrize("acceptor_funded", [True, False])
def test_every_reachable_transition_is_defined(acceptor_funded):
    transitions = explore(acceptor_funded)
    reached = {t for _, _, t in transitions}
    if acceptor_funded:
        assert S.SETTLED in reached and ("Presented", "settle", S.SETTLED) in {
            (f.value, n, t) for f, n, t in transitions}
    else:
        assert S.PROTESTED in reached
        # an unfunded acceptor leaves the bill protested after each recourse step
        assert (S.PROTESTED, "recourse", S.PROTESTED) in transitions


def test_model_covers_every_operation():
    used = {n for f in (True, False) for _, n, _ in explore(f)}
    assert used == set(OPS)
