"""Obligations, dispositions and restitution.

An obligation contract only records promises; nothing changes hands when it
is created.  Ownership moves exclusively through disposition contracts, each
executed by exactly one macro booking.  Invalidating an obligation leaves
executed dispositions in force and instead opens restitution claims.

The net claim between the two parties of a purchase is carried on a pair of
``Claim:<id>`` / ``Debt:<id>`` accounts, so delivering before payment books a
receivable for the seller and paying in advance books one for the buyer.
Loans use ``LoanReceivable:<id>`` / ``LoanPayable:<id>`` at principal with
interest recognised when it is paid.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from . import chart
from .errors import (
    AlreadyExecuted,
    AlreadyInvalidated,
    AlreadySettled,
    ContractInvalidated,
    IllTypedPromises,
    MomaError,
    NonPositiveAmount,
    NotOwner,
    SelfContract,
    UnknownContract,
)
from .macro import BookingKind, Leg, Line, MacroBooking, transactional
from .money import round_half_away
from .payments import route

# things


@dataclass(frozen=True)
class Product:
    id: str
    description: str = ""
    account: str = "Products"


@dataclass(frozen=True)
class Cash:
    amount: int


@dataclass(frozen=True)
class Deposit:
    bank: str | None
    amount: int


@dataclass(frozen=True)
class Gold:
    grams: int


@dataclass(frozen=True)
class BoERef:
    bill_id: str


Thing = Product | Cash | Deposit | Gold | BoERef


def is_money(thing) -> bool:
    return isinstance(thing, (Cash, Deposit))


def describe(thing) -> dict:
    """JSON-ready description of a thing."""
    if isinstance(thing, Product):
        return {"type": "Product", "id": thing.id, "description": thing.description}
    if isinstance(thing, Cash):
        return {"type": "Cash", "amount": thing.amount}
    if isinstance(thing, Deposit):
        return {"type": "Deposit", "bank": thing.bank, "amount": thing.amount}
    if isinstance(thing, Gold):
        return {"type": "Gold", "grams": thing.grams}
    return {"type": "BoERef", "id": thing.bill_id}


@dataclass
class ProductRecord:
    thing: Product
    book_value: int


@transactional
def register_product(system, owner: str, product: Product, book_value: int) -> ProductRecord:
    """Put a product into the ownership registry (opening stock or production)."""
    system.agent(owner)
    if product.id in system.things:
        raise MomaError(f"thing {product.id!r} already exists")
    rec = ProductRecord(product, book_value)
    system.things[product.id] = rec
    system.owners[product.id] = owner
    return rec


def product_record(system, product_id: str) -> ProductRecord:
    try:
        return system.things[product_id]
    except KeyError:
        raise NotOwner(f"unknown product {product_id!r}") from None


# contracts


class ContractKind(str, Enum):
    PURCHASE = "Purchase"
    LOAN = "Loan"
    BANK_DEPOSIT = "BankDeposit"
    BOE_UNDERLYING = "BoEUnderlying"


class Status(str, Enum):
    AGREED = "Agreed"
    PARTIALLY_FULFILLED = "PartiallyFulfilled"
    FULFILLED = "Fulfilled"
    INVALIDATED = "Invalidated"


@dataclass(frozen=True)
class Promise:
    giver: str
    receiver: str
    thing: Thing
    due: dt.date | None = None


@dataclass
class DispositionContract:
    id: str
    obligation_ref: str | None
    thing: Thing
    giver: str
    receiver: str
    value: int
    executed_value: int = 0
    valid: bool = True
    cancelled: bool = False
    discharged: bool = False  # a bill accepted on account of payment, later honoured
    bookings: list[str] = field(default_factory=list)

    @property
    def executed(self) -> bool:
        return self.executed_value >= self.value


@dataclass
class RestitutionClaim:
    id: str
    creditor: str
    debtor: str
    basis: str
    value: int
    thing: Thing
    status: str = "Open"
    booked: bool = True


@dataclass
class ObligationContract:
    id: str
    kind: ContractKind
    parties: tuple[str, str]
    promises: tuple[Promise, ...]
    status: Status = Status.AGREED
    dispositions: list[str] = field(default_factory=list)
    restitutions: list[str] = field(default_factory=list)
    principal: int = 0
    repayment: int = 0
    interest_paid: int = 0
    principal_paid: int = 0
    rate: Fraction | None = None
    maturity: dt.date | None = None

    @property
    def interest(self) -> int:
        return self.repayment - self.principal


def contract(system, cid: str) -> ObligationContract:
    try:
        return system.contracts[cid]
    except KeyError:
        raise UnknownContract(f"unknown contract {cid!r}") from None


def _check_promises(kind: ContractKind, parties, promises) -> None:
    if len(promises) != 2:
        raise IllTypedPromises(f"{kind.value} contracts carry exactly two promises")
    a, b = promises
    if {a.giver, a.receiver} != set(parties) or (a.giver, a.receiver) != (b.receiver, b.giver):
        raise IllTypedPromises("the two promises must run in opposite directions between the parties")
    for p in promises:
        if isinstance(p.thing, (Cash, Deposit)) and p.thing.amount <= 0:
            raise IllTypedPromises("promised money must be positive")
    money = [is_money(p.thing) for p in promises]
    if kind in (ContractKind.PURCHASE, ContractKind.BOE_UNDERLYING):
        goods = [p for p in promises if not is_money(p.thing)]
        if sum(money) != 1 or not isinstance(goods[0].thing, Product):
            raise IllTypedPromises("a purchase exchanges one product against money")
    elif not all(money):
        raise IllTypedPromises(f"{kind.value} contracts exchange money against money")


def _promise_value(kind: ContractKind, promise: Promise, promises) -> int:
    if is_money(promise.thing):
        return promise.thing.amount
    # a product is valued at the agreed price
    return next(p.thing.amount for p in promises if is_money(p.thing))


@transactional
def create_obligation(system, kind: ContractKind | str, parties: tuple[str, str], promises,
                      cid: str | None = None) -> ObligationContract:
    """Agree on two promises; one disposition contract is prepared per promise."""
    kind = ContractKind(kind)
    parties = tuple(parties)
    if len(parties) != 2:
        raise IllTypedPromises("an obligation has exactly two parties")
    if parties[0] == parties[1]:
        raise SelfContract(f"{parties[0]} cannot contract with itself")
    for p in parties:
        system.agent(p)
    promises = tuple(promises)
    _check_promises(kind, parties, promises)
    cid = system.reserve_id(cid) if cid else system.next_id("C")
    c = ObligationContract(cid, kind, parties, promises)
    if kind is ContractKind.LOAN:
        c.principal = promises[0].thing.amount
        c.repayment = promises[1].thing.amount
        if c.repayment < c.principal:
            raise IllTypedPromises("loan repayment is below the payout")
    for p in promises:
        did = system.next_id("D")
        system.dispositions[did] = DispositionContract(
            did, cid, p.thing, p.giver, p.receiver, _promise_value(kind, p, promises))
        c.dispositions.append(did)
    system.contracts[cid] = c
    return c


@transactional
def purchase(system, seller: str, buyer: str, product_id: str, price: int, medium: str = "cash",
             cid: str | None = None, due: dt.date | None = None) -> ObligationContract:
    """Shorthand for a purchase obligation of one registered product."""
    product = product_record(system, product_id).thing
    money = Deposit(None, price) if medium == "deposit" else Cash(price)
    return create_obligation(system, ContractKind.PURCHASE, (seller, buyer),
                             [Promise(seller, buyer, product, due), Promise(buyer, seller, money, due)], cid)


def disposition(system, did: str) -> DispositionContract:
    try:
        return system.dispositions[did]
    except KeyError:
        raise UnknownContract(f"unknown disposition {did!r}") from None


def dispositions_of(system, cid: str) -> list[DispositionContract]:
    return [system.dispositions[d] for d in contract(system, cid).dispositions]


def _refresh_status(system, c: ObligationContract) -> None:
    if c.status is Status.INVALIDATED:
        return
    if all(d.executed for d in _promised(system, c)):
        c.status = Status.FULFILLED
    elif any(system.dispositions[d].executed_value for d in c.dispositions):
        c.status = Status.PARTIALLY_FULFILLED
    else:
        c.status = Status.AGREED


def _promised(system, c: ObligationContract) -> list[DispositionContract]:
    """Dispositions prepared from the contract's promises (excludes bills)."""
    return [system.dispositions[d] for d in c.dispositions
            if not isinstance(system.dispositions[d].thing, BoERef)]


# net claim accounts


def position(system, agent: str, cid: str) -> int:
    """Agent's net claim under a purchase-like contract (negative = owes)."""
    return system.balance(agent, f"Claim:{cid}") - system.balance(agent, f"Debt:{cid}")


def position_lines(system, agent: str, other: str, cid: str, delta: int, counter: str, memo: str = "") -> list[Line]:
    """Lines moving ``agent``'s net claim by ``delta`` against ``counter``.

    Positive ``delta`` first pays down a debt, then builds a claim; negative
    ``delta`` does the reverse.
    """
    old = position(system, agent, cid)
    lines = []
    if delta > 0:
        reduce = min(delta, max(-old, 0))
        if reduce:
            lines.append(Line(chart.contract_debt(system, agent, cid, other), counter, reduce, memo))
        if delta - reduce:
            lines.append(Line(chart.contract_claim(system, agent, cid, other), counter, delta - reduce, memo))
    elif delta < 0:
        d = -delta
        reduce = min(d, max(old, 0))
        if reduce:
            lines.append(Line(counter, chart.contract_claim(system, agent, cid, other), reduce, memo))
        if d - reduce:
            lines.append(Line(counter, chart.contract_debt(system, agent, cid, other), d - reduce, memo))
    return lines


def balanced_lines(items: list[tuple[str, int]], memo: str = "") -> list[Line]:
    """Pair signed (debit-positive) account movements summing to zero into lines."""
    if sum(a for _, a in items) != 0:
        raise MomaError("movements do not balance")
    debits = [[n, a] for n, a in items if a > 0]
    credits = [[n, -a] for n, a in items if a < 0]
    lines = []
    i = j = 0
    while i < len(debits) and j < len(credits):
        amt = min(debits[i][1], credits[j][1])
        if debits[i][0] != credits[j][0]:
            lines.append(Line(debits[i][0], credits[j][0], amt, memo))
        debits[i][1] -= amt
        credits[j][1] -= amt
        if debits[i][1] == 0:
            i += 1
        if credits[j][1] == 0:
            j += 1
    return lines


# execution


def _deliver_product(system, c, d: DispositionContract, date, label):
    rec = product_record(system, d.thing.id)
    if system.owners[d.thing.id] != d.giver:
        raise NotOwner(f"{d.giver} does not own {d.thing.id}")
    seller, buyer = d.giver, d.receiver
    memo = f"deliver {d.thing.id}"
    seller_lines = position_lines(system, seller, buyer, c.id, d.value, chart.revenue(system, seller, "Sales"), memo)
    if rec.book_value:
        seller_lines.append(Line(chart.expense(system, seller, "CostOfSales"),
                                 chart.goods(system, seller, d.thing.account), rec.book_value, memo))
    buyer_lines = position_lines(system, buyer, seller, c.id, -d.value,
                                 chart.goods(system, buyer, d.thing.account), memo)
    booking = system.post_macro_booking(
        BookingKind.DELIVERY, date, [Leg(seller, seller_lines), Leg(buyer, buyer_lines)],
        label=label, contract_ref=c.id)
    system.owners[d.thing.id] = buyer
    rec.book_value = d.value
    return booking


def _pay(system, c, d: DispositionContract, amount: int, date, label, medium=None):
    payer, payee = d.giver, d.receiver
    if medium is None:
        medium = "deposit" if isinstance(d.thing, Deposit) else "auto"
    r = route(system, payer, payee, amount, medium)
    memo = f"pay {c.id}"
    return system.post_macro_booking(
        r.kind, date,
        [Leg(payer, position_lines(system, payer, payee, c.id, amount, r.payer_account, memo)),
         Leg(payee, position_lines(system, payee, payer, c.id, -amount, r.payee_account, memo))],
        label=label, intermediary=r.intermediary, contract_ref=c.id)


@transactional
def execute_disposition(system, did: str, date: dt.date, label: str = "", medium: str | None = None) -> MacroBooking:
    """Transfer the promised thing; the contract's status is recomputed."""
    d = disposition(system, did)
    c = contract(system, d.obligation_ref)
    if d.cancelled or c.status is Status.INVALIDATED:
        raise ContractInvalidated(f"contract {c.id} is invalidated")
    if d.executed:
        raise AlreadyExecuted(f"disposition {did} already executed")
    if c.kind is ContractKind.LOAN:
        if d.giver == c.parties[0]:
            return grant_loan_disposition(system, c, date, label, medium)
        return repay_loan(system, c.id, c.repayment - c.interest_paid - c.principal_paid, date, label=label,
                          medium=medium)
    if isinstance(d.thing, Product):
        booking = _deliver_product(system, c, d, date, label)
    else:
        booking = _pay(system, c, d, d.value - d.executed_value, date, label, medium)
    d.executed_value = d.value
    d.bookings.append(booking.id)
    _refresh_status(system, c)
    return booking


def open_disposition(system, cid: str, giver: str) -> DispositionContract:
    """The first unexecuted promised disposition given by ``giver``."""
    for d in _promised(system, contract(system, cid)):
        if d.giver == giver and not d.executed and not d.cancelled:
            return d
    raise AlreadyExecuted(f"{giver} has nothing left to perform under {cid}")


@transactional
def deliver(system, cid: str, date: dt.date, label: str = "") -> MacroBooking:
    c = contract(system, cid)
    d = next((d for d in _promised(system, c) if isinstance(d.thing, Product)), None)
    if d is None:
        raise IllTypedPromises(f"{cid} promises no product")
    return execute_disposition(system, d.id, date, label)


@transactional
def pay(system, cid: str, date: dt.date, label: str = "", medium: str | None = None) -> MacroBooking:
    c = contract(system, cid)
    d = next((d for d in _promised(system, c) if is_money(d.thing) and d.giver == c.parties[1]), None)
    if d is None:
        raise IllTypedPromises(f"{cid} promises no payment")
    return execute_disposition(system, d.id, date, label, medium)


# loans


def simple_interest(principal: int, rate: Fraction, start: dt.date | None, maturity: dt.date | None) -> int:
    """Interest on ACT/360; without dates ``rate`` is the rate for the whole term."""
    rate = Fraction(rate)
    if start is None or maturity is None:
        return round_half_away(principal * rate)
    return round_half_away(principal * rate * (maturity - start).days / 360)


@transactional
def grant_loan(system, lender: str, borrower: str, principal: int, date: dt.date, *,
               rate: Fraction = Fraction(0), maturity: dt.date | None = None, repayment: int | None = None,
               label: str = "", medium: str | None = None, cid: str | None = None,
               kind: BookingKind = BookingKind.LOAN_GRANT,
               phase: str = "event") -> tuple[ObligationContract, MacroBooking]:
    """Create a loan obligation and pay out the principal in one step."""
    if principal <= 0:
        raise NonPositiveAmount(f"loan principal must be positive, got {principal}")
    if repayment is None:
        repayment = principal + simple_interest(principal, rate, date, maturity)
    c = create_obligation(system, ContractKind.LOAN, (lender, borrower),
                          [Promise(lender, borrower, Cash(principal), date),
                           Promise(borrower, lender, Cash(repayment), maturity)], cid)
    c.rate = Fraction(rate)
    c.maturity = maturity
    booking = grant_loan_disposition(system, c, date, label, medium, kind, phase)
    return c, booking


def grant_loan_disposition(system, c: ObligationContract, date, label="", medium=None,
                           kind=BookingKind.LOAN_GRANT, phase="event") -> MacroBooking:
    lender, borrower = c.parties
    d = system.dispositions[c.dispositions[0]]
    if d.executed:
        raise AlreadyExecuted(f"loan {c.id} already paid out")
    if medium is None:
        medium = "deposit" if system.agent(lender).takes_deposits else "auto"
    r = route(system, lender, borrower, c.principal, medium)
    memo = f"loan {c.id}"
    with system.atomic():
        booking = system.post_macro_booking(
            kind, date,
            [Leg(lender, [Line(chart.loan_receivable(system, lender, c.id, borrower), r.payer_account,
                               c.principal, memo)]),
             Leg(borrower, [Line(r.payee_account, chart.loan_payable(system, borrower, c.id, lender),
                                 c.principal, memo)])],
            label=label, intermediary=r.intermediary, contract_ref=c.id, phase=phase)
        d.executed_value = d.value
        d.bookings.append(booking.id)
        _refresh_status(system, c)
    return booking


def outstanding(c: ObligationContract) -> int:
    return c.repayment - c.interest_paid - c.principal_paid


@transactional
def repay_loan(system, cid: str, amount: int | None, date: dt.date, *, label: str = "",
               medium: str | None = None, phase: str = "event") -> MacroBooking:
    """Pay an installment; interest is settled before principal."""
    c = contract(system, cid)
    if c.kind is not ContractKind.LOAN:
        raise IllTypedPromises(f"{cid} is not a loan")
    if c.status is Status.INVALIDATED:
        raise ContractInvalidated(f"contract {cid} is invalidated")
    lender, borrower = c.parties
    if amount is None:
        amount = outstanding(c)
    if amount <= 0:
        raise NonPositiveAmount(f"repayment must be positive, got {amount}")
    if amount > outstanding(c):
        raise AlreadyExecuted(f"{cid} has only {outstanding(c)} outstanding")
    interest = min(amount, c.interest - c.interest_paid)
    principal = amount - interest
    r = route(system, borrower, lender, amount, medium or "auto")
    memo = f"repay {cid}"
    b_lines = [Line(chart.loan_payable(system, borrower, cid, lender), r.payer_account, principal, memo),
               Line(chart.expense(system, borrower, "InterestExpense"), r.payer_account, interest, memo)]
    l_lines = [Line(r.payee_account, chart.loan_receivable(system, lender, cid, borrower), principal, memo),
               Line(r.payee_account, chart.revenue(system, lender, "InterestIncome"), interest, memo)]
    d = system.dispositions[c.dispositions[1]]
    booking = system.post_macro_booking(
        BookingKind.LOAN_REPAY, date, [Leg(borrower, b_lines), Leg(lender, l_lines)],
        label=label, intermediary=r.intermediary, contract_ref=cid, phase=phase)
    c.interest_paid += interest
    c.principal_paid += principal
    d.executed_value += amount
    d.bookings.append(booking.id)
    _refresh_status(system, c)
    return booking


# invalidation and restitution


def _closing_items(system, agent: str, cid: str) -> list[tuple[str, int]]:
    """Signed movements that zero the agent's contract accounts."""
    lg = system.ledger(agent)
    items = []
    for name in (f"Claim:{cid}", f"Debt:{cid}", f"LoanReceivable:{cid}", f"LoanPayable:{cid}"):
        if name in lg.accounts and lg.balances[name]:
            items.append((name, -lg.balances[name]))
    return items


@transactional
def invalidate_obligation(system, cid: str, date: dt.date, label: str = "") -> list[RestitutionClaim]:
    """Declare the obligation void.

    Executed dispositions stay effective; each one becomes a restitution claim
    of its giver against its receiver at the transaction value.  Unexecuted
    dispositions are cancelled.
    """
    c = contract(system, cid)
    if c.status is Status.INVALIDATED:
        raise AlreadyInvalidated(f"contract {cid} is already invalidated")
    claims: list[RestitutionClaim] = []
    for d in (system.dispositions[x] for x in c.dispositions):
        if d.discharged:
            continue
        if d.executed_value == 0:
            d.cancelled = True
            continue
        if not d.executed:
            d.cancelled = True
        rid = system.next_id("R")
        claims.append(RestitutionClaim(rid, d.giver, d.receiver, cid, d.executed_value, d.thing))
    legs = []
    if claims:
        lender = c.parties[0] if c.kind is ContractKind.LOAN else None
        for agent in c.parties:
            other = c.parties[1] if agent == c.parties[0] else c.parties[0]
            items = _closing_items(system, agent, cid)
            for r in claims:
                if r.creditor == agent:
                    items.append((chart.restitution_claim(system, agent, r.id, other), r.value))
                elif r.debtor == agent:
                    items.append((chart.restitution_debt(system, agent, r.id, other), -r.value))
            residual = -sum(a for _, a in items)
            if residual:
                if lender is not None:
                    name = "InterestExpense" if agent != lender else "InterestIncome"
                    acc = (chart.expense if agent != lender else chart.revenue)(system, agent, name)
                elif residual > 0:
                    acc = chart.expense(system, agent, "RestitutionLoss")
                else:
                    acc = chart.revenue(system, agent, "RestitutionGain")
                items.append((acc, residual))
            legs.append(Leg(agent, balanced_lines(items, f"invalidate {cid}")))
        system.post_macro_booking(BookingKind.OTHER, date, legs, label=label or f"invalidate {cid}",
                                  contract_ref=cid)
    for r in claims:
        system.restitutions[r.id] = r
        c.restitutions.append(r.id)
    c.status = Status.INVALIDATED
    return claims


def restitution(system, rid: str) -> RestitutionClaim:
    try:
        return system.restitutions[rid]
    except KeyError:
        raise UnknownContract(f"unknown restitution claim {rid!r}") from None


@transactional
def settle_restitution(system, rid: str, mode: str, date: dt.date, label: str = "") -> MacroBooking:
    """Unwind one restitution claim by returning the thing or paying its value.

    ``mode`` is ``return`` or ``compensate``.  Money is always compensated.
    """
    r = restitution(system, rid)
    if r.status != "Open":
        raise AlreadySettled(f"restitution claim {rid} is already settled")
    if mode not in ("return", "compensate"):
        raise ValueError(f"unknown restitution mode {mode!r}")
    debtor, creditor = r.debtor, r.creditor
    memo = f"restitution {rid}"
    debt = chart.restitution_debt(system, debtor, rid, creditor)
    claim = chart.restitution_claim(system, creditor, rid, debtor)
    if mode == "return" and isinstance(r.thing, Product):
        rec = product_record(system, r.thing.id)
        if system.owners[r.thing.id] != debtor:
            raise NotOwner(f"{debtor} no longer owns {r.thing.id}")
        acc = r.thing.account
        d_items = [(debt, r.value), (chart.goods(system, debtor, acc), -rec.book_value)]
        if r.value != rec.book_value:
            gain = rec.book_value - r.value
            name = "RestitutionLoss" if gain > 0 else "RestitutionGain"
            d_items.append(((chart.expense if gain > 0 else chart.revenue)(system, debtor, name), gain))
        legs = [Leg(debtor, balanced_lines(d_items, memo)),
                Leg(creditor, [Line(chart.goods(system, creditor, acc), claim, r.value, memo)])]
        booking = system.post_macro_booking(BookingKind.RESTITUTION_SETTLEMENT, date, legs, label=label,
                                            contract_ref=r.basis)
        system.owners[r.thing.id] = creditor
        rec.book_value = r.value
    elif mode == "return" and isinstance(r.thing, BoERef):
        bill = system.bills[r.thing.bill_id]
        if bill.holder != debtor:
            raise NotOwner(f"{debtor} no longer holds bill {bill.id}")
        held = chart.boe_held(system, creditor, bill.id, bill.drawee)
        legs = [Leg(debtor, [Line(debt, f"BoE:{bill.id}", r.value, memo)]),
                Leg(creditor, [Line(held, claim, r.value, memo)])]
        booking = system.post_macro_booking(BookingKind.RESTITUTION_SETTLEMENT, date, legs, label=label,
                                            contract_ref=r.basis, boe_ref=bill.id)
        bill.holder = creditor
    else:
        p = route(system, debtor, creditor, r.value, "auto", check_funds=False)
        legs = [Leg(debtor, [Line(debt, p.payer_account, r.value, memo)]),
                Leg(creditor, [Line(p.payee_account, claim, r.value, memo)])]
        booking = system.post_macro_booking(BookingKind.RESTITUTION_SETTLEMENT, date, legs, label=label,
                                            intermediary=p.intermediary, contract_ref=r.basis)
    r.status = "Settled"
    return booking


def executed_value(system, cid: str) -> int:
    """Value of the dispositions still in force under a contract."""
    return sum(d.executed_value for d in dispositions_of(system, cid) if not d.discharged)


def export_contract(system, cid: str) -> dict:
    c = contract(system, cid)
    return {
        "id": c.id,
        "kind": c.kind.value,
        "parties": list(c.parties),
        "promises": [
            {"from": p.giver, "to": p.receiver, "thing": describe(p.thing),
             "due": p.due.isoformat() if p.due else None}
            for p in c.promises
        ],
        "status": c.status.value,
        "dispositions": [
            {"id": d.id, "thing": describe(d.thing), "from": d.giver, "to": d.receiver, "value": d.value,
             "executed_value": d.executed_value, "executed": d.executed, "valid": d.valid,
             "cancelled": d.cancelled, "discharged": d.discharged, "bookings": list(d.bookings)}
            for d in dispositions_of(system, cid)
        ],
        "restitutions": [
            {"id": r.id, "creditor": r.creditor, "debtor": r.debtor, "value": r.value,
             "thing": describe(r.thing), "status": r.status}
            for r in (system.restitutions[x] for x in c.restitutions)
        ],
    }
