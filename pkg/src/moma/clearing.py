"""Bilateral interbank clearing.

Mutual interbank claims are netted; what remains is paid by moving
central-bank deposits from the debtor bank to the creditor bank.
"""

from __future__ import annotations

import datetime as dt

from . import chart
from .errors import InsufficientCentralBankDeposit, NonPositiveAmount, NoOpenClaim, NotABank
from .macro import BookingKind, Leg, Line, MacroBooking, Role, transactional
from .payments import route


def owed(system, debtor: str, creditor: str) -> int:
    """Interbank payable of ``debtor`` towards ``creditor``."""
    return system.balance(debtor, f"PayableTo:{creditor}")


def _require_banks(system, *ids: str) -> None:
    for i in ids:
        if system.agent(i).role is not Role.BANK:
            raise NotABank(f"{i} is not a commercial bank")
    if len(set(ids)) != len(ids):
        raise NotABank("clearing needs two distinct banks")


@transactional
def clear(system, a: str, b: str, date: dt.date, *, settle: bool = True, label: str = "") -> list[MacroBooking]:
    """Net the mutual claims of two banks and settle the residual.

    Returns the bookings made; nothing to clear gives an empty list, so a
    second call right after the first is a no-op.
    """
    _require_banks(system, a, b)
    ab, ba = owed(system, a, b), owed(system, b, a)
    net = min(ab, ba)
    residual = abs(ab - ba)
    debtor, creditor = (a, b) if ab > ba else (b, a)
    cb = system.central_bank
    if settle and residual and chart.deposit_balance(system, debtor, cb) < residual:
        raise InsufficientCentralBankDeposit(
            f"{debtor} holds {chart.deposit_balance(system, debtor, cb)} at the central bank, owes {residual}")
    out = []
    if net:
        memo = f"netting {a}/{b}"
        out.append(system.post_macro_booking(
            BookingKind.OTHER, date,
            [Leg(a, [Line(chart.payable_to(system, a, b), chart.receivable_from(system, a, b), net, memo)]),
             Leg(b, [Line(chart.payable_to(system, b, a), chart.receivable_from(system, b, a), net, memo)])],
            label=label or "clear"))
    if settle and residual:
        memo = f"settlement {debtor}->{creditor}"
        leg = Leg(cb, [Line(chart.deposit_of(system, cb, debtor), chart.deposit_of(system, cb, creditor),
                            residual, memo)])
        out.append(system.post_macro_booking(
            BookingKind.DEPOSIT_TRANSFER, date,
            [Leg(debtor, [Line(chart.payable_to(system, debtor, creditor), chart.deposit_at(system, debtor, cb),
                               residual, memo)]),
             Leg(creditor, [Line(chart.deposit_at(system, creditor, cb),
                                 chart.receivable_from(system, creditor, debtor), residual, memo)])],
            label=label or "settle", intermediary=leg))
    return out


@transactional
def settle_in_cash(system, payer: str, payee: str, amount: int, date: dt.date, *, label: str = "") -> MacroBooking:
    """Extinguish (part of) an interbank payable with banknotes or cash."""
    if amount <= 0:
        raise NonPositiveAmount(f"settlement amount must be positive, got {amount}")
    if owed(system, payer, payee) < amount:
        raise NoOpenClaim(f"{payer} owes {payee} only {owed(system, payer, payee)}")
    r = route(system, payer, payee, amount, "cash", check_funds=False)
    memo = f"cash settlement {payer}->{payee}"
    return system.post_macro_booking(
        BookingKind.OTHER, date,
        [Leg(payer, [Line(chart.payable_to(system, payer, payee), r.payer_account, amount, memo)]),
         Leg(payee, [Line(r.payee_account, chart.receivable_from(system, payee, payer), amount, memo)])],
        label=label)
