"""Money creation and destruction, and the loan/withdrawal chain that carries
central-bank money down to companies.

Fiat money is created by a one-legged booking in the central bank's ledger:
vault cash against the non-claim ``CirculatingM`` register.  Under a gold
regime banknotes are bearer claims on the central bank, handed out only
against gold.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from fractions import Fraction

from . import chart
from .contracts import grant_loan
from .errors import (
    BelowCredibilityRating,
    GoldRegime,
    InsufficientBankCash,
    InsufficientDeposit,
    InsufficientVaultCash,
    NonPositiveAmount,
    NotABank,
    NotCentralBank,
    NotGoldRegime,
    NotOwner,
)
from .macro import BookingKind, Leg, Line, MacroBooking, Role, transactional
from .money import DEFAULT_CURRENCY


@dataclass(frozen=True)
class RegisterEvent:
    date: dt.date
    event: str
    amount: int
    total_issued: int
    total_destroyed: int


@dataclass
class IssuedMoneyRegister:
    """Append-only record of every unit of physical money put into or taken out of existence."""

    currency: str = DEFAULT_CURRENCY
    total_issued: int = 0
    total_destroyed: int = 0
    events: list[RegisterEvent] = field(default_factory=list)

    @property
    def outstanding(self) -> int:
        return self.total_issued - self.total_destroyed

    def record(self, date: dt.date, event: str, amount: int) -> RegisterEvent:
        if event == "Issue":
            self.total_issued += amount
        elif event == "Destroy":
            self.total_destroyed += amount
        else:
            raise ValueError(f"unknown register event {event!r}")
        ev = RegisterEvent(date, event, amount, self.total_issued, self.total_destroyed)
        self.events.append(ev)
        return ev


def _require_cb(system, issuer: str | None) -> str:
    cb = system.central_bank
    if issuer is not None and issuer != cb:
        raise NotCentralBank(f"{issuer} is not the central bank")
    return cb


def _positive(amount: int) -> None:
    if amount <= 0:
        raise NonPositiveAmount(f"amount must be positive, got {amount}")


def _issue(system, amount: int, date: dt.date, label: str, phase: str) -> MacroBooking:
    cb = system.central_bank
    with system.atomic():
        booking = system.post_macro_booking(
            BookingKind.ISSUE, date,
            [Leg(cb, [Line(chart.cash(system, cb), chart.circulating_m(system), amount, "issue")])],
            label=label, phase=phase)
        system.register.record(date, "Issue", amount)
    return booking


def _destroy(system, amount: int, date: dt.date, label: str, phase: str) -> MacroBooking:
    cb = system.central_bank
    if chart.cash_balance(system, cb) < amount:
        raise InsufficientVaultCash(f"vault holds {chart.cash_balance(system, cb)}, cannot destroy {amount}")
    with system.atomic():
        booking = system.post_macro_booking(
            BookingKind.DESTROY, date,
            [Leg(cb, [Line(chart.circulating_m(system), chart.cash(system, cb), amount, "destroy")])],
            label=label, phase=phase)
        system.register.record(date, "Destroy", amount)
    return booking


@transactional
def issue_money(system, amount: int, date: dt.date, *, issuer: str | None = None, label: str = "",
                phase: str = "event") -> MacroBooking:
    """Print fiat money into the central bank's vault."""
    _require_cb(system, issuer)
    if system.regime.is_gold:
        raise GoldRegime("under a gold regime money is issued only against gold")
    _positive(amount)
    return _issue(system, amount, date, label, phase)


@transactional
def destroy_money(system, amount: int, date: dt.date, *, issuer: str | None = None, label: str = "",
                  phase: str = "event") -> MacroBooking:
    _require_cb(system, issuer)
    if system.regime.is_gold:
        raise GoldRegime("under a gold regime banknotes are redeemed, not destroyed")
    _positive(amount)
    return _destroy(system, amount, date, label, phase)


# gold regime


def gold_value(system, grams: int) -> int:
    return grams * system.regime.gold_price


@transactional
def add_gold(system, owner: str, grams: int, date: dt.date, phase: str = "opening") -> None:
    """Opening gold holdings, booked at the regime price against equity."""
    if not system.regime.is_gold:
        raise NotGoldRegime("gold holdings need a gold regime")
    _positive(grams)
    system.post_entry(owner, chart.gold(system, owner), chart.equity(system, owner), gold_value(system, grams),
                      date, memo="opening gold")
    system.gold[owner] += grams


@transactional
def issue_banknote_for_gold(system, miner: str, grams: int, date: dt.date, label: str = "") -> list[MacroBooking]:
    """Buy gold with a freshly prepared banknote.

    The note is first recorded in the vault, then exchanged for the gold;
    from that moment it is a bearer claim on the central bank.
    """
    if not system.regime.is_gold:
        raise NotGoldRegime("banknotes against gold need a gold regime")
    _positive(grams)
    if system.gold[miner] < grams:
        raise NotOwner(f"{miner} owns {system.gold[miner]} g of gold, not {grams} g")
    cb = system.central_bank
    value = gold_value(system, grams)
    first = _issue(system, value, date, f"{label}1" if label else "1", "event")
    cb_lines = [Line(chart.gold(system, cb), chart.cash(system, cb), value, "buy gold"),
                Line(chart.circulating_m(system), chart.banknotes_outstanding(system), value, "note leaves vault")]
    miner_lines = [Line(chart.cash(system, miner), chart.gold(system, miner), value, "sell gold")]
    second = system.post_macro_booking(
        BookingKind.GOLD_PURCHASE, date, [Leg(cb, cb_lines), Leg(miner, miner_lines)],
        label=f"{label}2" if label else "2")
    system.gold[miner] -= grams
    system.gold[cb] += grams
    return [first, second]


@transactional
def redeem_banknote(system, bearer: str, grams: int, date: dt.date, label: str = "") -> list[MacroBooking]:
    """Hand gold back against banknotes and retire the returned notes."""
    if not system.regime.is_gold:
        raise NotGoldRegime("banknotes are redeemable only under a gold regime")
    _positive(grams)
    cb = system.central_bank
    value = gold_value(system, grams)
    if chart.cash_balance(system, bearer) < value:
        raise NotOwner(f"{bearer} holds fewer banknotes than {value}")
    if system.gold[cb] < grams:
        raise InsufficientVaultCash(f"central bank holds only {system.gold[cb]} g of gold")
    cb_lines = [Line(chart.cash(system, cb), chart.gold(system, cb), value, "redeem note"),
                Line(chart.banknotes_outstanding(system), chart.circulating_m(system), value, "note returns")]
    bearer_lines = [Line(chart.gold(system, bearer), chart.cash(system, bearer), value, "redeem note")]
    back = system.post_macro_booking(
        BookingKind.OTHER, date, [Leg(cb, cb_lines), Leg(bearer, bearer_lines)],
        label=f"{label}r" if label else "redeem")
    system.gold[cb] -= grams
    system.gold[bearer] += grams
    gone = _destroy(system, value, date, f"{label}d" if label else "retire", "event")
    return [back, gone]


# loans and withdrawals


@transactional
def cb_loan(system, bank: str, amount: int, date: dt.date, *, rate: Fraction = Fraction(0),
            maturity: dt.date | None = None, label: str = "", phase: str = "event",
            cid: str | None = None):
    """Central-bank credit to a commercial bank, paid out as a central-bank deposit."""
    if system.agent(bank).role is not Role.BANK:
        raise NotABank(f"{bank} is not a commercial bank")
    rating = system.agent(bank).rating
    if rating < system.rating_threshold:
        raise BelowCredibilityRating(f"{bank} is rated {rating}, below {system.rating_threshold}")
    _positive(amount)
    return grant_loan(system, system.central_bank, bank, amount, date, rate=rate, maturity=maturity,
                      label=label, medium="deposit", phase=phase, cid=cid)


@transactional
def bank_loan(system, bank: str, borrower: str, amount: int, date: dt.date, *, rate: Fraction = Fraction(0),
              maturity: dt.date | None = None, label: str = "", phase: str = "event",
              cid: str | None = None):
    """Commercial-bank credit: a new deposit, no cash moves."""
    if system.agent(bank).role is not Role.BANK:
        raise NotABank(f"{bank} is not a commercial bank")
    if system.agent(borrower).takes_deposits:
        raise NotABank(f"{borrower} refinances at the central bank, not at {bank}")
    _positive(amount)
    return grant_loan(system, bank, borrower, amount, date, rate=rate, maturity=maturity,
                      label=label, medium="deposit", phase=phase, cid=cid)


@transactional
def withdraw(system, customer: str, bank: str, amount: int, date: dt.date, *, label: str = "",
             phase: str = "event") -> MacroBooking:
    """Turn part of a deposit into cash taken from the bank's vault."""
    _positive(amount)
    if not system.agent(bank).takes_deposits:
        raise NotABank(f"{bank} keeps no deposits")
    held = chart.deposit_balance(system, customer, bank)
    if held < amount:
        raise InsufficientDeposit(f"{customer} holds {held} at {bank}, cannot withdraw {amount}")
    vault = chart.cash_balance(system, bank)
    if vault < amount:
        err = InsufficientVaultCash if system.agent(bank).role is Role.CENTRAL_BANK else InsufficientBankCash
        raise err(f"{bank} holds {vault} in cash, cannot pay out {amount}")
    memo = "withdrawal"
    return system.post_macro_booking(
        BookingKind.WITHDRAWAL, date,
        [Leg(bank, [Line(chart.deposit_of(system, bank, customer), chart.cash(system, bank), amount, memo)]),
         Leg(customer, [Line(chart.cash(system, customer), chart.deposit_at(system, customer, bank), amount, memo)])],
        label=label, phase=phase)


def withdraw_from_cb(system, bank: str, amount: int, date: dt.date, **kw) -> MacroBooking:
    return withdraw(system, bank, system.central_bank, amount, date, **kw)


def withdraw_from_bank(system, customer: str, bank: str, amount: int, date: dt.date, **kw) -> MacroBooking:
    return withdraw(system, customer, bank, amount, date, **kw)


@transactional
def deposit_cash(system, customer: str, bank: str, amount: int, date: dt.date, *, label: str = "",
                 phase: str = "event") -> MacroBooking:
    """Pay cash into a deposit account (inverse of a withdrawal)."""
    _positive(amount)
    if not system.agent(bank).takes_deposits:
        raise NotABank(f"{bank} keeps no deposits")
    memo = "cash deposit"
    return system.post_macro_booking(
        BookingKind.OTHER, date,
        [Leg(customer, [Line(chart.deposit_at(system, customer, bank), chart.cash(system, customer), amount, memo)]),
         Leg(bank, [Line(chart.cash(system, bank), chart.deposit_of(system, bank, customer), amount, memo)])],
        label=label, phase=phase)
