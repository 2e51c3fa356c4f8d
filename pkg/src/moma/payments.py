"""Routing a money payment between two agents.

A payment either hands over cash (banknotes under a gold regime) or moves a
deposit.  A bank or central bank told to pay by deposit simply credits a
deposit on its own books.  Otherwise deposit routes, in order of preference:

1. the payee keeps the payer's deposit: the payee's liability shrinks;
2. the payer keeps the payee's deposit: the payer credits it;
3. both bank with a third institution: that institution relabels its
   liability from payer to payee (an intermediary leg).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import chart
from .errors import InsufficientFunds, NonPositiveAmount
from .macro import BookingKind, Leg, Line, MacroBooking, transactional


@dataclass(frozen=True)
class Route:
    payer_account: str
    payee_account: str
    medium: str
    intermediary: Leg | None = None

    @property
    def kind(self) -> BookingKind:
        return BookingKind.DEPOSIT_TRANSFER if self.medium == "deposit" else BookingKind.OTHER


def _deposit_route(system, payer: str, payee: str, amount: int, check_funds: bool) -> Route | None:
    pa, pe = system.agent(payer), system.agent(payee)
    if pe.takes_deposits and (
        chart.deposit_balance(system, payer, payee) >= amount
        or (not check_funds and f"DepositAt:{payee}" in system.ledger(payer).accounts)
    ):
        return Route(chart.deposit_at(system, payer, payee), chart.deposit_of(system, payee, payer), "deposit")
    if pa.takes_deposits and f"DepositAt:{payer}" in system.ledger(payee).accounts:
        return Route(chart.deposit_of(system, payer, payee), chart.deposit_at(system, payee, payer), "deposit")
    for bank in sorted(system.agents):
        if bank in (payer, payee) or not system.agents[bank].takes_deposits:
            continue
        if chart.deposit_balance(system, payer, bank) >= amount:
            leg = Leg(bank, [Line(chart.deposit_of(system, bank, payer), chart.deposit_of(system, bank, payee),
                                  amount, f"transfer {payer}->{payee}")])
            return Route(chart.deposit_at(system, payer, bank), chart.deposit_at(system, payee, bank), "deposit", leg)
    return None


def route(system, payer: str, payee: str, amount: int, medium: str = "auto", check_funds: bool = True) -> Route:
    """Pick how ``payer`` pays ``amount`` to ``payee``.

    ``medium`` is ``auto``, ``cash`` or ``deposit``.  With ``check_funds``
    off a short cash payment is left for the ledger to reject as an abnormal
    balance.
    """
    if medium not in ("auto", "cash", "deposit"):
        raise ValueError(f"unknown payment medium {medium!r}")
    if medium == "deposit" and system.agent(payer).takes_deposits:
        # a deposit-taker pays by crediting a deposit on its own books
        return Route(chart.deposit_of(system, payer, payee), chart.deposit_at(system, payee, payer), "deposit")
    if medium in ("auto", "deposit"):
        r = _deposit_route(system, payer, payee, amount, check_funds)
        if r is not None:
            return r
        if medium == "deposit":
            raise InsufficientFunds(f"{payer} has no deposit route to pay {amount} to {payee}")
    if check_funds and chart.cash_balance(system, payer) < amount:
        raise InsufficientFunds(f"{payer} cannot pay {amount} to {payee}")
    return Route(chart.cash(system, payer), chart.cash(system, payee), "cash")


def can_pay(system, payer: str, payee: str, amount: int) -> bool:
    try:
        with system.atomic():
            route(system, payer, payee, amount)
            raise _Probe
    except _Probe:
        return True
    except InsufficientFunds:
        return False


class _Probe(Exception):
    pass


@transactional
def distribute(system, payer: str, payee: str, amount: int, date, *, label: str = "",
               medium: str = "auto") -> MacroBooking:
    """Unrequited payment such as a profit distribution: expense for the payer, income for the payee."""
    if amount <= 0:
        raise NonPositiveAmount(f"distribution must be positive, got {amount}")
    r = route(system, payer, payee, amount, medium)
    memo = f"distribution {payer}->{payee}"
    return system.post_macro_booking(
        BookingKind.OTHER, date,
        [Leg(payer, [Line(chart.expense(system, payer, "Distributions"), r.payer_account, amount, memo)]),
         Leg(payee, [Line(r.payee_account, chart.revenue(system, payee, "TransferIncome"), amount, memo)])],
        label=label or memo, intermediary=r.intermediary)
