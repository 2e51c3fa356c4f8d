import datetime as dt
from fractions import Fraction

import pytest
from conftest import D0, FACE, assert_invariances, day, fund, trade_claim

from moma import boe, chart, contracts
from moma.boe import BillState
from moma.contracts import Status
from moma.errors import (
    InsufficientFunds,
    NonPositiveFace,
    NotEndorsable,
    NotHolder,
    NotRecourseDebtor,
    PastMaturity,
    RateOutOfRange,
    SelfTransfer,
    TooEarly,
    WrongState,
)

MATURITY = day(90)


@pytest.fixture
def drawn(fiat):
    trade_claim(fiat)
    b = boe.draw(fiat, "Seller", "Buyer", "Seller", FACE, MATURITY, D0, underlying="T1", bid="B1")
    return fiat, b


def claims_on(system, bid):
    """Sum of every balance attributable to one bill, all agents."""
    return sum(abs(lg.balances[n]) for lg in system.ledgers.values() for n, acc in lg.accounts.items()
               if acc.instrument == bid)


def test_draw_creates_a_drawn_bill_without_bookings(drawn):
    s, b = drawn
    assert b.state is BillState.DRAWN and b.holder == "Seller" and b.acceptor is None
    assert not any(bk.boe_ref == "B1" for bk in s.bookings)


@pytest.mark.parametrize("face, maturity, err", [(FACE, D0, PastMaturity), (0, MATURITY, NonPositiveFace)])
def test_draw_guards(fiat, face, maturity, err):
    with pytest.raises(err):
        boe.draw(fiat, "Seller", "Buyer", "Seller", face, maturity, D0)


def test_accept_turns_the_trade_claim_into_the_bill(drawn):
    s, b = drawn
    boe.accept(s, "B1", D0)
    assert b.state is BillState.ACCEPTED and b.acceptor == "Buyer"
    assert s.balance("Seller", "BoE:B1") == s.balance("Buyer", "BoEPayable:B1") == FACE
    assert contracts.position(s, "Seller", "T1") == 0
    assert_invariances(s)
    with pytest.raises(WrongState):
        boe.accept(s, "B1", D0)


def test_sola_starts_accepted(fiat):
    trade_claim(fiat)
    b, _ = boe.create_sola(fiat, "Buyer", "Seller", FACE, MATURITY, D0, underlying="T1")
    assert b.state is BillState.ACCEPTED and b.sola and b.acceptor == "Buyer" == b.drawer


def test_discount_price_formula():
    assert boe.discount_price(FACE, Fraction(5, 100), 90) == 98_750_00
    assert boe.discount_price(FACE, 0, 90) == FACE


def test_discount_books_price_and_revenue(drawn):
    s, b = drawn
    boe.accept(s, "B1", D0)
    price, _ = boe.discount(s, "B1", "BankA", Fraction(5, 100), D0)
    assert price == 98_750_00
    assert chart.deposit_balance(s, "Seller", "BankA") == price
    assert s.balance("BankA", "DiscountIncome") == FACE - price
    assert b.holder == "BankA" and b.state is BillState.DISCOUNTED
    assert_invariances(s)


def test_absurd_discount_rate_rejected(drawn):
    s, _ = drawn
    boe.accept(s, "B1", D0)
    with pytest.raises(RateOutOfRange):
        boe.discount(s, "B1", "BankA", Fraction(4), D0)


def test_interbank_transfer_creates_interbank_claim(drawn):
    s, b = drawn
    boe.accept(s, "B1", D0)
    with pytest.raises(NotHolder):
        boe.transfer_interbank(s, "B1", "BankA", "BankB", D0)
    boe.discount(s, "B1", "BankA", Fraction(5, 100), D0)
    with pytest.raises(SelfTransfer):
        boe.transfer_interbank(s, "B1", "BankA", "BankA", D0)
    boe.transfer_interbank(s, "B1", "BankA", "BankB", D0)
    assert s.balance("BankA", "ReceivableFrom:BankB") == s.balance("BankB", "PayableTo:BankA") == FACE
    assert b.holder == "BankB"
    assert_invariances(s)


def test_full_purchase_with_bill_settles_everything(drawn):
    s, b = drawn
    fund(s, "Buyer", FACE, D0, bank="BankB")
    boe.accept(s, "B1", D0)
    boe.discount(s, "B1", "BankA", Fraction(5, 100), D0)
    boe.transfer_interbank(s, "B1", "BankA", "BankB", D0)
    with pytest.raises(TooEarly):
        boe.present(s, "B1", MATURITY - dt.timedelta(days=1))
    boe.present(s, "B1", MATURITY)
    assert b.state is BillState.PRESENTED
    before = {a: chart.cash_balance(s, a) + sum(s.balance(a, n) for n in s.ledger(a).accounts
                                                if n.startswith("DepositAt:")) for a in s.agents}
    boe.settle(s, "B1", MATURITY)
    assert b.state is BillState.SETTLED
    assert claims_on(s, "B1") == 0
    assert contracts.contract(s, "T1").status is Status.FULFILLED
    moved = before["Buyer"] - (chart.cash_balance(s, "Buyer") + s.balance("Buyer", "DepositAt:BankB"))
    assert moved == FACE
    assert_invariances(s)
    with pytest.raises(WrongState):
        boe.settle(s, "B1", MATURITY)
    with pytest.raises(WrongState):
        boe.present(s, "B1", MATURITY)
    with pytest.raises(WrongState):
        boe.protest(s, "B1", MATURITY)


def test_settle_needs_drawee_funds_then_protest(drawn):
    s, b = drawn
    boe.accept(s, "B1", D0)
    with pytest.raises(WrongState):
        boe.protest(s, "B1", MATURITY)
    boe.present(s, "B1", MATURITY)
    with pytest.raises(InsufficientFunds):
        boe.settle(s, "B1", MATURITY)
    assert b.state is BillState.PRESENTED
    boe.protest(s, "B1", MATURITY)
    assert b.state is BillState.PROTESTED


def test_endorsement_to_a_supplier(fiat):
    trade_claim(fiat)
    b, _ = boe.create_sola(fiat, "Buyer", "Seller", FACE, MATURITY, D0, underlying="T1")
    fund(fiat, "Home", FACE)
    e = boe.endorse(fiat, b.id, "Home", day(1))
    assert len(b.endorsements) == 1 and b.holder == "Home"
    assert e.giver == "Seller" and e.price_paid == FACE
    assert boe.verify_chain(b)
    with pytest.raises(NotHolder):
        boe.endorse(fiat, b.id, "Seller", day(1), signer="Seller")


def test_non_endorsable_sola(fiat):
    trade_claim(fiat)
    b, _ = boe.create_sola(fiat, "Buyer", "Seller", FACE, MATURITY, D0, underlying="T1", endorsable=False)
    with pytest.raises(NotEndorsable):
        boe.endorse(fiat, b.id, "Home", day(1), price=0)


def three_endorsements(fiat):
    """Seller -> E1 -> E2 -> E3, acceptor Buyer without funds."""
    for a in ("E1", "E2", "E3"):
        fiat.add_agent(a, "Company")
        fund(fiat, a, FACE)
    trade_claim(fiat)
    b, _ = boe.create_sola(fiat, "Buyer", "Seller", FACE, MATURITY, D0, underlying="T1")
    for a in ("E1", "E2", "E3"):
        boe.endorse(fiat, b.id, a, day(1))
    boe.present(fiat, b.id, MATURITY)
    boe.protest(fiat, b.id, MATURITY)
    return b


def test_recourse_to_the_second_of_three_endorsers(fiat):
    b = three_endorsements(fiat)
    # endorsers in signing order: Seller, E1, E2 (E2 signed to the holder E3)
    assert b.recourse_debtors == ["E2", "E1", "Seller", "Buyer"]
    with pytest.raises(NotRecourseDebtor):
        boe.resolve_recourse(fiat, b.id, "Home", MATURITY)
    boe.resolve_recourse(fiat, b.id, "E1", MATURITY)
    assert b.holder == "E1"
    assert chart.deposit_balance(fiat, "E3", "BankA") == FACE  # paid FACE to endorse, got FACE back
    claim = [r for r in fiat.restitutions.values() if r.basis == b.id][-1]
    assert (claim.creditor, claim.debtor, claim.value) == ("E1", "Seller", FACE)
    assert_invariances(fiat)


def test_acceptor_paying_ends_the_chain(fiat):
    b = three_endorsements(fiat)
    fund(fiat, "Buyer", FACE, MATURITY)
    boe.resolve_recourse(fiat, b.id, "Buyer", MATURITY)
    assert b.state is BillState.SETTLED
    assert not [r for r in fiat.restitutions.values() if r.basis == b.id and r.status == "Open"]


def test_archive_only_after_settlement(drawn):
    s, b = drawn
    with pytest.raises(WrongState):
        boe.archive(s, "B1", D0)


def test_chain_detects_reordering_and_header_edits(fiat):
    b = three_endorsements(fiat)
    assert boe.verify_chain(b)
    b.endorsements[0], b.endorsements[1] = b.endorsements[1], b.endorsements[0]
    assert not boe.verify_chain(b)
    b.endorsements[0], b.endorsements[1] = b.endorsements[1], b.endorsements[0]
    b.face += 1
    assert not boe.verify_chain(b)


def test_depository_export_has_lowercase_hex_digests(fiat):
    b = three_endorsements(fiat)
    out = boe.export_bill(b)
    assert len(out["endorsements"]) == 3
    for e in out["endorsements"]:
        assert len(e["digest"]) == 64 and e["digest"] == e["digest"].lower()
        int(e["digest"], 16)
