"""Bills of exchange and solas.

A bill turns an open trade claim into a negotiable instrument.  The holder's
``BoE:<id>`` asset and the acceptor's ``BoEPayable:<id>`` liability are
matched per instrument, so the bill can change hands without touching the
acceptor's books.

Lifecycle::

    Drawn -> Accepted -> {Discounted, Transferred}* -> Presented -> Settled
                                                               \\-> Protested

Every change of holder on an endorsable bill is signed on a hash-linked
endorsement list.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from . import chart
from .contracts import BoERef, DispositionContract, RestitutionClaim, Status, _refresh_status, contract, position
from .errors import (
    InsufficientFunds,
    MomaError,
    NonPositiveFace,
    NoOpenClaim,
    NotABank,
    NotEndorsable,
    NotHolder,
    NotRecourseDebtor,
    PastMaturity,
    RateOutOfRange,
    SelfTransfer,
    TooEarly,
    UnknownBill,
    WrongState,
)
from .macro import BookingKind, Leg, Line, MacroBooking, Role, transactional
from .money import round_half_away
from .payments import route


class BillState(str, Enum):
    DRAWN = "Drawn"
    ACCEPTED = "Accepted"
    DISCOUNTED = "Discounted"
    TRANSFERRED = "Transferred"
    PRESENTED = "Presented"
    SETTLED = "Settled"
    PROTESTED = "Protested"


NEGOTIABLE = (BillState.ACCEPTED, BillState.DISCOUNTED, BillState.TRANSFERRED)


@dataclass
class Endorsement:
    seq: int
    giver: str
    taker: str
    date: dt.date
    price_paid: int | None
    prev_digest: str
    digest: str = ""

    def payload(self) -> dict:
        return {"seq": self.seq, "from": self.giver, "to": self.taker, "date": self.date.isoformat(),
                "price_paid": self.price_paid, "prev": self.prev_digest}


@dataclass
class BillOfExchange:
    id: str
    drawer: str
    drawee: str
    payee: str
    holder: str
    face: int
    issue_date: dt.date
    maturity: dt.date
    endorsable: bool = True
    sola: bool = False
    underlying: str | None = None
    acceptor: str | None = None
    state: BillState = BillState.DRAWN
    endorsements: list[Endorsement] = field(default_factory=list)
    archived: bool = False
    recourse_debtors: list[str] = field(default_factory=list)
    history: list[tuple[dt.date, str, str]] = field(default_factory=list)
    disposition: str | None = None
    currency: str = "EUR"

    def header(self) -> dict:
        return {"id": self.id, "drawer": self.drawer, "drawee": self.drawee, "payee": self.payee,
                "face": self.face, "currency": self.currency, "issue_date": self.issue_date.isoformat(),
                "maturity": self.maturity.isoformat(), "endorsable": self.endorsable, "sola": self.sola}


# digest chain


def canonical(obj: dict) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def digest(prev: str, payload: bytes) -> str:
    return hashlib.sha256(prev.encode() + payload).hexdigest()


def genesis(bill: BillOfExchange) -> str:
    return hashlib.sha256(canonical(bill.header())).hexdigest()


def chain_ok(header: bytes, records: list[bytes], digests: list[str]) -> bool:
    """Recompute the digest chain over raw record bytes and compare."""
    if len(records) != len(digests):
        return False
    prev = hashlib.sha256(header).hexdigest()
    for raw, stored in zip(records, digests):
        try:
            if json.loads(raw)["prev"] != prev:
                return False
        except (ValueError, KeyError, TypeError):
            return False
        prev = digest(prev, raw)
        if prev != stored:
            return False
    return True


def verify_chain(bill: BillOfExchange) -> bool:
    return chain_ok(canonical(bill.header()), [canonical(e.payload()) for e in bill.endorsements],
                    [e.digest for e in bill.endorsements])


def _sign(bill: BillOfExchange, giver: str, taker: str, date: dt.date, price: int | None) -> Endorsement:
    prev = bill.endorsements[-1].digest if bill.endorsements else genesis(bill)
    e = Endorsement(len(bill.endorsements) + 1, giver, taker, date, price, prev)
    e.digest = digest(prev, canonical(e.payload()))
    bill.endorsements.append(e)
    return e


def _hand_over(bill: BillOfExchange, taker: str, date: dt.date, price: int | None, event: str) -> None:
    if bill.endorsable:
        _sign(bill, bill.holder, taker, date, price)
    bill.history.append((date, event, taker))
    bill.holder = taker


# lifecycle


def bill(system, bid: str) -> BillOfExchange:
    try:
        return system.bills[bid]
    except KeyError:
        raise UnknownBill(f"unknown bill {bid!r}") from None


def _new(system, drawer, drawee, payee, face, maturity, date, endorsable, sola, underlying, bid) -> BillOfExchange:
    for a in (drawer, drawee, payee):
        system.agent(a)
    if face <= 0:
        raise NonPositiveFace(f"face value must be positive, got {face}")
    if maturity <= date:
        raise PastMaturity(f"maturity {maturity} is not after {date}")
    if drawee == payee:
        raise SelfTransfer("drawee and payee must differ")
    bid = system.reserve_id(bid) if bid else system.next_id("B")
    b = BillOfExchange(bid, drawer, drawee, payee, payee, face, date, maturity, endorsable, sola, underlying,
                       currency=system.currency)
    b.history.append((date, "draw", payee))
    system.bills[bid] = b
    return b


@transactional
def draw(system, drawer: str, drawee: str, payee: str, face: int, maturity: dt.date, date: dt.date, *,
         endorsable: bool = True, underlying: str | None = None, bid: str | None = None) -> BillOfExchange:
    """Issue an order to pay; no booking until the drawee accepts."""
    return _new(system, drawer, drawee, payee, face, maturity, date, endorsable, False, underlying, bid)


def _reclassify(system, b: BillOfExchange, date: dt.date, label: str) -> MacroBooking:
    """Swap the open trade claim for the bill (payee leg first)."""
    cid = b.underlying
    if cid is None or position(system, b.payee, cid) < b.face:
        raise NoOpenClaim(f"{b.payee} has no open claim of {b.face} on {b.drawee} to put into bill {b.id}")
    c = contract(system, cid)
    if b.drawee not in c.parties:
        raise NoOpenClaim(f"{b.drawee} is not a party to {cid}")
    memo = f"bill {b.id}"
    payee_lines = [Line(chart.boe_held(system, b.payee, b.id, b.drawee),
                        chart.contract_claim(system, b.payee, cid, b.drawee), b.face, memo)]
    drawee_lines = [Line(chart.contract_debt(system, b.drawee, cid, b.payee),
                         chart.boe_payable(system, b.drawee, b.id), b.face, memo)]
    booking = system.post_macro_booking(
        BookingKind.BOE_CREATION, date, [Leg(b.payee, payee_lines), Leg(b.drawee, drawee_lines)],
        label=label, contract_ref=cid, boe_ref=b.id, supersedes=[("trade", "boe")])
    did = system.next_id("D")
    system.dispositions[did] = DispositionContract(did, cid, BoERef(b.id), b.drawee, b.payee, b.face,
                                                   executed_value=b.face, bookings=[booking.id])
    c.dispositions.append(did)
    b.disposition = did
    _refresh_status(system, c)
    return booking


@transactional
def accept(system, bid: str, date: dt.date, label: str = "") -> MacroBooking:
    b = bill(system, bid)
    if b.state is not BillState.DRAWN:
        raise WrongState(f"bill {bid} is {b.state.value}, not Drawn")
    booking = _reclassify(system, b, date, label)
    b.acceptor = b.drawee
    b.state = BillState.ACCEPTED
    b.history.append((date, "accept", b.holder))
    return booking


@transactional
def create_sola(system, drawee: str, payee: str, face: int, maturity: dt.date, date: dt.date, *,
                endorsable: bool = True, underlying: str | None = None, bid: str | None = None,
                label: str = "") -> tuple[BillOfExchange, MacroBooking]:
    """A bill written and signed by the debtor itself: accepted from the start."""
    b = _new(system, drawee, drawee, payee, face, maturity, date, endorsable, True, underlying, bid)
    booking = _reclassify(system, b, date, label)
    b.acceptor = drawee
    b.state = BillState.ACCEPTED
    return b, booking


def discount_price(face: int, rate: Fraction, days: int) -> int:
    """Banker's discount on ACT/360."""
    return round_half_away(face * (1 - Fraction(rate) * days / 360))


@transactional
def discount(system, bid: str, bank: str, rate: Fraction, date: dt.date, label: str = "") -> tuple[int, MacroBooking]:
    """Sell the bill to a bank before maturity for a deposit credit."""
    b = bill(system, bid)
    if b.state not in (BillState.ACCEPTED, BillState.TRANSFERRED):
        raise WrongState(f"bill {bid} is {b.state.value}; only accepted bills are discounted")
    if system.agent(bank).role is not Role.BANK:
        raise NotABank(f"{bank} is not a commercial bank")
    if bank == b.holder:
        raise SelfTransfer(f"{bank} already holds bill {bid}")
    if date >= b.maturity:
        raise PastMaturity(f"bill {bid} matures {b.maturity}; present it instead")
    rate = Fraction(rate)
    price = discount_price(b.face, rate, (b.maturity - date).days)
    if rate < 0 or price <= 0:
        raise RateOutOfRange(f"rate {rate} gives price {price} for face {b.face}")
    seller = b.holder
    spread = b.face - price
    memo = f"discount {bid}"
    seller_lines = [Line(chart.deposit_at(system, seller, bank), f"BoE:{bid}", price, memo),
                    Line(chart.expense(system, seller, "DiscountExpense"), f"BoE:{bid}", spread, memo)]
    bank_lines = [Line(chart.boe_held(system, bank, bid, b.drawee), chart.deposit_of(system, bank, seller),
                       price, memo),
                  Line(f"BoE:{bid}", chart.revenue(system, bank, "DiscountIncome"), spread, memo)]
    booking = system.post_macro_booking(
        BookingKind.BOE_DISCOUNT, date, [Leg(seller, seller_lines), Leg(bank, bank_lines)],
        label=label, boe_ref=bid)
    _hand_over(b, bank, date, price, "discount")
    b.state = BillState.DISCOUNTED
    return price, booking


@transactional
def transfer_interbank(system, bid: str, from_bank: str, to_bank: str, date: dt.date,
                       label: str = "") -> MacroBooking:
    """Pass the bill to another bank at face against an interbank receivable."""
    b = bill(system, bid)
    if from_bank == to_bank:
        raise SelfTransfer(f"{from_bank} cannot transfer bill {bid} to itself")
    if b.holder != from_bank:
        raise NotHolder(f"{from_bank} does not hold bill {bid}")
    for bank in (from_bank, to_bank):
        if system.agent(bank).role is not Role.BANK:
            raise NotABank(f"{bank} is not a commercial bank")
    if b.state not in NEGOTIABLE:
        raise WrongState(f"bill {bid} is {b.state.value}")
    memo = f"transfer {bid}"
    booking = system.post_macro_booking(
        BookingKind.BOE_TRANSFER, date,
        [Leg(from_bank, [Line(chart.receivable_from(system, from_bank, to_bank), f"BoE:{bid}", b.face, memo)]),
         Leg(to_bank, [Line(chart.boe_held(system, to_bank, bid, b.drawee),
                            chart.payable_to(system, to_bank, from_bank), b.face, memo)])],
        label=label, boe_ref=bid)
    _hand_over(b, to_bank, date, b.face, "transfer")
    b.state = BillState.TRANSFERRED
    return booking


@transactional
def endorse(system, bid: str, to: str, date: dt.date, *, price: int | None = None, signer: str | None = None,
            label: str = "") -> Endorsement:
    """Sign the bill over to ``to``, who pays ``price`` (face by default).

    ``price=0`` hands the bill over without consideration, for example to
    discharge a debt recorded outside the books.
    """
    b = bill(system, bid)
    if not b.endorsable:
        raise NotEndorsable(f"bill {bid} is not endorsable")
    if signer is not None and signer != b.holder:
        raise NotHolder(f"{signer} does not hold bill {bid}")
    if b.state not in NEGOTIABLE:
        raise WrongState(f"bill {bid} is {b.state.value}")
    if to == b.holder:
        raise SelfTransfer(f"{to} already holds bill {bid}")
    system.agent(to)
    price = b.face if price is None else price
    if not 0 <= price <= b.face:
        raise RateOutOfRange(f"endorsement price {price} outside 0..{b.face}")
    giver = b.holder
    memo = f"endorse {bid}"
    held = chart.boe_held(system, to, bid, b.drawee) if to != b.drawee else None
    if held is None:
        raise SelfTransfer("endorsing a bill back to its acceptor extinguishes it; settle instead")
    giver_lines, taker_lines = [], []
    intermediary = None
    if price:
        r = route(system, to, giver, price)
        giver_lines.append(Line(r.payee_account, f"BoE:{bid}", price, memo))
        taker_lines.append(Line(held, r.payer_account, price, memo))
        intermediary = r.intermediary
    spread = b.face - price
    if spread:
        giver_lines.append(Line(chart.expense(system, giver, "BillLoss"), f"BoE:{bid}", spread, memo))
        taker_lines.append(Line(held, chart.revenue(system, to, "BillGain"), spread, memo))
    system.post_macro_booking(BookingKind.BOE_TRANSFER, date, [Leg(giver, giver_lines), Leg(to, taker_lines)],
                              label=label, intermediary=intermediary, boe_ref=bid)
    _hand_over(b, to, date, price, "endorse")
    b.state = BillState.TRANSFERRED
    return b.endorsements[-1]


@transactional
def present(system, bid: str, date: dt.date) -> BillOfExchange:
    """Demand payment at or after maturity.  Only the bill's state changes."""
    b = bill(system, bid)
    if b.state not in NEGOTIABLE:
        raise WrongState(f"bill {bid} is {b.state.value}; cannot present")
    if date < b.maturity:
        raise TooEarly(f"bill {bid} matures {b.maturity}")
    b.state = BillState.PRESENTED
    b.history.append((date, "present", b.holder))
    return b


def _honour(system, b: BillOfExchange, payer: str, date: dt.date, label: str) -> MacroBooking:
    """The acceptor pays the holder; the bill is extinguished."""
    r = route(system, payer, b.holder, b.face)
    memo = f"settle {b.id}"
    booking = system.post_macro_booking(
        BookingKind.BOE_SETTLEMENT, date,
        [Leg(payer, [Line(f"BoEPayable:{b.id}", r.payer_account, b.face, memo)]),
         Leg(b.holder, [Line(r.payee_account, f"BoE:{b.id}", b.face, memo)])],
        label=label, intermediary=r.intermediary, boe_ref=b.id, contract_ref=b.underlying)
    b.state = BillState.SETTLED
    b.history.append((date, "settle", b.holder))
    if b.underlying and b.disposition:
        # the bill was taken on account of payment; honouring it is the payment
        c = contract(system, b.underlying)
        system.dispositions[b.disposition].discharged = True
        for d in (system.dispositions[x] for x in c.dispositions):
            if d.giver == b.acceptor and not isinstance(d.thing, BoERef) and not d.executed and not d.cancelled:
                d.executed_value = min(d.value, d.executed_value + b.face)
                d.bookings.append(booking.id)
                break
        if c.status is not Status.INVALIDATED:
            _refresh_status(system, c)
    return booking


@transactional
def settle(system, bid: str, date: dt.date, label: str = "") -> MacroBooking:
    b = bill(system, bid)
    if b.state is not BillState.PRESENTED:
        raise WrongState(f"bill {bid} is {b.state.value}, not Presented")
    return _honour(system, b, b.acceptor, date, label)


def recourse_chain(b: BillOfExchange) -> list[str]:
    """Liable parties from the holder's immediate endorser up to the acceptor."""
    if not b.endorsable:
        return [b.acceptor]
    chain: list[str] = []
    for e in reversed(b.endorsements):
        if e.giver not in chain:
            chain.append(e.giver)
    for party in (b.drawer, b.acceptor):
        if party in chain:
            chain.remove(party)
        chain.append(party)
    return chain


@transactional
def protest(system, bid: str, date: dt.date) -> BillOfExchange:
    """Record non-payment; everyone on the chain becomes liable."""
    b = bill(system, bid)
    if b.state is not BillState.PRESENTED:
        raise WrongState(f"bill {bid} is {b.state.value}, not Presented")
    b.state = BillState.PROTESTED
    b.recourse_debtors = recourse_chain(b)
    b.history.append((date, "protest", b.holder))
    return b


def upstream(b: BillOfExchange, party: str) -> list[str]:
    """Recourse debtors a party may turn to (all of them for the original claimant)."""
    chain = b.recourse_debtors
    return chain[chain.index(party) + 1:] if party in chain else list(chain)


@transactional
def resolve_recourse(system, bid: str, payer: str | None, date: dt.date, label: str = "") -> list[MacroBooking]:
    """One step of recourse: ``payer`` honours the bill towards its holder.

    A non-acceptor payer takes the bill and, with it, a restitution claim on
    the next party upstream.  The acceptor's payment extinguishes the bill.
    """
    b = bill(system, bid)
    if b.state is not BillState.PROTESTED:
        raise WrongState(f"bill {bid} is {b.state.value}, not Protested")
    options = upstream(b, b.holder)
    if payer is None:
        payer = options[0]
    if payer not in options:
        raise NotRecourseDebtor(f"{payer} is not liable to {b.holder} on bill {bid}")
    holder = b.holder
    for r in system.restitutions.values():
        if r.basis == bid and r.creditor == holder and r.status == "Open":
            r.status = "Settled"
    if payer == b.acceptor:
        booking = _honour(system, b, payer, date, label)
        return [booking]
    r = route(system, payer, holder, b.face)
    memo = f"recourse {bid}"
    booking = system.post_macro_booking(
        BookingKind.BOE_TRANSFER, date,
        [Leg(payer, [Line(chart.boe_held(system, payer, bid, b.drawee), r.payer_account, b.face, memo)]),
         Leg(holder, [Line(r.payee_account, f"BoE:{bid}", b.face, memo)])],
        label=label, intermediary=r.intermediary, boe_ref=bid)
    b.holder = payer
    b.history.append((date, "recourse", payer))
    nxt = upstream(b, payer)[0]
    rid = system.next_id("R")
    # the value sits in the bill now held by the payer, so this claim is a legal record only
    system.restitutions[rid] = RestitutionClaim(rid, payer, nxt, bid, b.face, BoERef(bid), booked=False)
    return [booking]


@transactional
def archive(system, bid: str, date: dt.date) -> BillOfExchange:
    """Retire a settled bill from the active depository (the record stays)."""
    b = bill(system, bid)
    if b.state is not BillState.SETTLED:
        raise WrongState(f"bill {bid} is {b.state.value}; only settled bills are archived")
    if b.archived:
        raise WrongState(f"bill {bid} is already archived")
    b.archived = True
    b.history.append((date, "archive", b.holder))
    return b


def can_settle(system, bid: str) -> bool:
    b = bill(system, bid)
    try:
        with system.atomic():
            route(system, b.acceptor, b.holder, b.face)
            raise _Probe
    except _Probe:
        return True
    except InsufficientFunds:
        return False


class _Probe(MomaError):
    pass


def export_bill(b: BillOfExchange) -> dict:
    return {
        **b.header(),
        "acceptor": b.acceptor,
        "holder": b.holder,
        "state": b.state.value,
        "archived": b.archived,
        "underlying": b.underlying,
        "genesis": genesis(b),
        "endorsements": [{**e.payload(), "digest": e.digest} for e in b.endorsements],
        "recourse_debtors": list(b.recourse_debtors),
    }
