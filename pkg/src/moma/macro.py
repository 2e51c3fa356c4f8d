"""Quadruple accounting: a network of per-agent ledgers joined by macro bookings.

A macro booking posts one micro leg in each of two ledgers (or a single leg in
the central bank's ledger for money issuance and destruction).  Deposit
transfers between two customers of the same institution additionally touch
the institution's ledger; that is carried as an ``intermediary`` leg and does
not count towards the booking's arity.

After every booking the touched claim pairs are re-checked incrementally and
the booking's money flows must balance.  Violations roll the booking back.
"""

from __future__ import annotations

import contextlib
import copy
import datetime as dt
import functools
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    ArityViolation,
    BackdatedBooking,
    CrossAgentEntry,
    InvarianceViolation,
    LegImbalance,
    MomaError,
    UnknownAgent,
)
from .ledger import Account, AccountKind, JournalEntry, Ledger
from .money import DEFAULT_CURRENCY, Money


class Role(str, Enum):
    CENTRAL_BANK = "CentralBank"
    BANK = "Bank"
    COMPANY = "Company"
    HOUSEHOLD = "Household"
    GOLD_MINER = "GoldMiner"


@dataclass
class Agent:
    id: str
    name: str
    role: Role
    rating: int = 100

    @property
    def takes_deposits(self) -> bool:
        return self.role in (Role.BANK, Role.CENTRAL_BANK)


class BookingKind(str, Enum):
    DELIVERY = "Delivery"
    BOE_CREATION = "BoECreation"
    BOE_DISCOUNT = "BoEDiscount"
    BOE_TRANSFER = "BoETransfer"
    BOE_SETTLEMENT = "BoESettlement"
    LOAN_GRANT = "LoanGrant"
    LOAN_REPAY = "LoanRepay"
    WITHDRAWAL = "Withdrawal"
    DEPOSIT_TRANSFER = "DepositTransfer"
    ISSUE = "Issue"
    DESTROY = "Destroy"
    GOLD_PURCHASE = "GoldPurchase"
    RESTITUTION_SETTLEMENT = "RestitutionSettlement"
    OTHER = "Other"


SINGLETON_KINDS = frozenset({BookingKind.ISSUE, BookingKind.DESTROY})


@dataclass(frozen=True)
class Regime:
    kind: str = "fiat"
    gold_price: int | None = None  # minor units per gram

    def __post_init__(self):
        if self.kind not in ("fiat", "gold"):
            raise ValueError(f"unknown regime {self.kind!r}")
        if self.kind == "gold" and (self.gold_price is None or self.gold_price <= 0):
            raise ValueError("a gold regime needs a positive gold price")

    @property
    def is_gold(self) -> bool:
        return self.kind == "gold"


@dataclass(frozen=True)
class Line:
    """One micro posting inside a leg, by account name."""

    debit: str
    credit: str
    amount: int
    memo: str = ""


@dataclass(frozen=True)
class Leg:
    agent: str
    lines: tuple[Line, ...]

    def __init__(self, agent: str, lines: Iterable[Line]):
        object.__setattr__(self, "agent", agent)
        object.__setattr__(self, "lines", tuple(line for line in lines if line.amount != 0))


@dataclass(frozen=True)
class PostedLeg:
    agent: str
    entries: tuple[JournalEntry, ...]


@dataclass(frozen=True)
class MacroBooking:
    id: str
    label: str
    date: dt.date
    kind: BookingKind
    legs: tuple[PostedLeg, ...]
    intermediary: PostedLeg | None = None
    phase: str = "event"
    contract_ref: str | None = None
    boe_ref: str | None = None
    supersedes: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.legs)

    def all_legs(self) -> tuple[PostedLeg, ...]:
        return self.legs + ((self.intermediary,) if self.intermediary else ())

    def leg_labels(self) -> list[str]:
        """``"3"`` -> ``["3a", "3b"]``; other labels are repeated per leg."""
        if self.label.isdigit():
            return [self.label + chr(ord("a") + i) for i in range(len(self.legs))]
        return [self.label] * len(self.legs)


@dataclass(frozen=True)
class Violation:
    pair: str
    lhs: int
    rhs: int


@dataclass
class DebtReport:
    total_receivables: int
    total_liabilities: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.total_receivables == self.total_liabilities and not self.violations


@dataclass
class PaymentReport:
    total_expenditures: int
    total_revenues: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.total_expenditures == self.total_revenues and not self.violations


def claim_key(acc: Account) -> tuple[str, str, str] | None:
    """Key under which an account's claim must be mirrored; None if no claim.

    Plain claims match per directed pair ``(creditor, debtor)``; bearer
    instruments match per ``(instrument, debtor)`` whoever holds them.
    """
    if not acc.claim_flag or acc.kind not in (AccountKind.ASSET, AccountKind.LIABILITY):
        return None
    is_asset = acc.kind is AccountKind.ASSET
    if acc.instrument is not None:
        debtor = acc.counterparty if is_asset else acc.owner
        return ("instrument", acc.instrument, debtor)
    if is_asset:
        return ("pair", acc.owner, acc.counterparty)
    return ("pair", acc.counterparty, acc.owner)


def format_key(key: tuple[str, str, str]) -> str:
    kind, a, b = key
    return f"{a}->{b}" if kind == "pair" else f"{a}@{b}"


def transactional(fn):
    """Run an operation on ``system`` (its first argument) all-or-nothing."""

    @functools.wraps(fn)
    def run(system, *args, **kwargs):
        with system.atomic():
            return fn(system, *args, **kwargs)

    return run


def leg_money_delta(ledger: Ledger, entries: Iterable[JournalEntry]) -> int:
    """Net change of an agent's means of payment over some entries.

    Debiting a cash/deposit account (asset up, or deposit liability down)
    improves the agent's money position; crediting one worsens it.
    """
    delta = 0
    for e in entries:
        if ledger.accounts[e.debit].is_medium:
            delta += e.amount.amount
        if ledger.accounts[e.credit].is_medium:
            delta -= e.amount.amount
    return delta


class System:
    """All agents, their ledgers, and the stores of the legal layer.

    Mutations are meant to be applied serially (single writer); use
    :meth:`snapshot` to hand a consistent read-only copy elsewhere.
    """

    def __init__(self, currency: str = DEFAULT_CURRENCY, regime: Regime | None = None,
                 rating_threshold: int = 50):
        from .issuance import IssuedMoneyRegister

        self.currency = currency
        self.regime = regime or Regime()
        self.rating_threshold = rating_threshold
        self.agents: dict[str, Agent] = {}
        self.ledgers: dict[str, Ledger] = {}
        self.bookings: list[MacroBooking] = []
        self.internal_entries: list[JournalEntry] = []
        self.contracts: dict = {}
        self.dispositions: dict = {}
        self.restitutions: dict = {}
        self.bills: dict = {}
        self.things: dict = {}
        self.owners: dict[str, str] = {}
        self.gold: dict[str, int] = defaultdict(int)
        self.register = IssuedMoneyRegister(currency=currency)
        self.clock: dt.date | None = None
        self.trail: list[dict] | None = None  # filled when full scans are requested
        self._claims: dict[tuple, list[int]] = defaultdict(lambda: [0, 0])
        self._entry_seq = 0
        self._booking_seq = 0
        self._ids: dict[str, int] = defaultdict(int)
        self._atomic_depth = 0

    # agents and accounts

    def add_agent(self, agent_id: str, role: Role | str, name: str | None = None, rating: int = 100) -> Agent:
        role = Role(role)
        if agent_id in self.agents:
            raise MomaError(f"agent {agent_id!r} already exists")
        if "/" in agent_id or ":" in agent_id or not agent_id:
            raise ValueError(f"bad agent id {agent_id!r}")
        if role is Role.CENTRAL_BANK and any(a.role is Role.CENTRAL_BANK for a in self.agents.values()):
            raise MomaError("a system has exactly one central bank")
        if not 0 <= rating <= 100:
            raise ValueError("rating must be within 0..100")
        agent = Agent(agent_id, name or agent_id, role, rating)
        self.agents[agent_id] = agent
        self.ledgers[agent_id] = Ledger(agent_id, self.currency)
        return agent

    def agent(self, agent_id: str) -> Agent:
        try:
            return self.agents[agent_id]
        except KeyError:
            raise UnknownAgent(f"unknown agent {agent_id!r}") from None

    def ledger(self, agent_id: str) -> Ledger:
        self.agent(agent_id)
        return self.ledgers[agent_id]

    @property
    def central_bank(self) -> str:
        for a in self.agents.values():
            if a.role is Role.CENTRAL_BANK:
                return a.id
        raise UnknownAgent("the system has no central bank")

    def open_account(self, owner: str, name: str, kind: AccountKind, counterparty: str | None = None,
                     claim_flag: bool | None = None, **kw) -> Account:
        if counterparty is not None:
            self.agent(counterparty)
        return self.ledger(owner).open_account(name, kind, counterparty, claim_flag, **kw)

    def ensure_account(self, owner: str, name: str, kind: AccountKind, counterparty: str | None = None,
                       **kw) -> Account:
        if counterparty is not None:
            self.agent(counterparty)
        return self.ledger(owner).ensure_account(name, kind, counterparty, **kw)

    def balance(self, agent_id: str, name: str) -> int:
        return self.ledger(agent_id).balance_or_zero(name)

    def next_id(self, prefix: str) -> str:
        self._ids[prefix] += 1
        return f"{prefix}{self._ids[prefix]}"

    def reserve_id(self, ident: str) -> str:
        """Claim a caller-chosen id; rejects reuse across all stores."""
        for store in (self.contracts, self.bills, self.dispositions, self.restitutions, self.things):
            if ident in store:
                raise MomaError(f"id {ident!r} already in use")
        return ident

    # atomicity

    # append-only lists of immutable records: a checkpoint only needs their length
    _APPEND_ONLY = ("bookings", "internal_entries", "trail")

    @contextlib.contextmanager
    def atomic(self) -> Iterator[None]:
        """All-or-nothing block: on any exception the whole state is restored.

        Objects held by callers (ledgers, contracts, bills) keep their
        identity; only their contents are rolled back.
        """
        if self._atomic_depth:
            self._atomic_depth += 1
            try:
                yield
            finally:
                self._atomic_depth -= 1
            return
        saved = self._checkpoint()
        self._atomic_depth = 1
        try:
            yield
        except BaseException:
            self._restore(saved)
            raise
        finally:
            self._atomic_depth = 0

    def _checkpoint(self) -> dict:
        rest = {k: v for k, v in self.__dict__.items()
                if k not in self._APPEND_ONLY and k not in ("ledgers", "_claims", "_atomic_depth")}
        return {
            "lengths": {k: None if getattr(self, k) is None else len(getattr(self, k)) for k in self._APPEND_ONLY},
            "ledgers": {aid: (lg, dict(lg.accounts), dict(lg.balances), len(lg.journal), lg._next_id)
                        for aid, lg in self.ledgers.items()},
            "claims": {k: list(v) for k, v in self._claims.items()},
            # one deepcopy call so that objects shared between registries stay shared
            "rest": copy.deepcopy(rest),
        }

    def _restore(self, saved: dict) -> None:
        for key, n in saved["lengths"].items():
            cur = getattr(self, key)
            if n is None or cur is None:
                setattr(self, key, None if n is None else cur[:n])
            else:
                del cur[n:]
        self.ledgers.clear()
        for aid, (lg, accounts, balances, n, next_id) in saved["ledgers"].items():
            lg.accounts.clear()
            lg.accounts.update(accounts)
            lg.balances.clear()
            lg.balances.update(balances)
            del lg.journal[n:]
            lg._next_id = next_id
            self.ledgers[aid] = lg
        self._claims.clear()
        self._claims.update(saved["claims"])
        rest = saved["rest"]
        for key in set(self.__dict__) - set(rest) - set(self._APPEND_ONLY) - {"ledgers", "_claims", "_atomic_depth"}:
            del self.__dict__[key]
        for key, old in rest.items():
            cur = self.__dict__.get(key)
            if isinstance(old, dict) and isinstance(cur, dict):
                # keep registry entries' identity so callers' handles stay valid
                keep = {}
                for k, v in old.items():
                    live = cur.get(k)
                    if live is not None and type(live) is type(v) and hasattr(v, "__dict__"):
                        live.__dict__.clear()
                        live.__dict__.update(v.__dict__)
                        v = live
                    keep[k] = v
                cur.clear()
                cur.update(keep)
            elif cur is not None and type(cur) is type(old) and hasattr(old, "__dict__"):
                cur.__dict__.clear()
                cur.__dict__.update(old.__dict__)
            else:
                self.__dict__[key] = old

    def snapshot(self) -> System:
        return copy.deepcopy(self)

    def fingerprint(self) -> tuple:
        """Hashable digest of every ledger, used for bit-identity comparisons."""
        return tuple(
            (aid, tuple(sorted(lg.balances.items())), tuple(lg.journal), tuple(sorted(lg.accounts)))
            for aid, lg in sorted(self.ledgers.items())
        )

    # postings

    def _advance_clock(self, date: dt.date) -> None:
        if self.clock is not None and date < self.clock:
            raise BackdatedBooking(f"booking dated {date} is before the clock {self.clock}")
        self.clock = date

    def _post_lines(self, agent: str, lines: Iterable[Line], date: dt.date, macro_ref: str | None,
                    contract_ref: str | None) -> tuple[JournalEntry, ...]:
        ledger = self.ledgers[agent]
        pending: dict[str, int] = {}
        for line in lines:
            ledger.check_entry(line.debit, line.credit, Money(line.amount, self.currency), pending,
                               check_sign=False)
        ledger.check_signs(pending)
        out = []
        for line in lines:
            self._entry_seq += 1
            entry = ledger.post_entry(
                line.debit, line.credit, Money(line.amount, self.currency), date,
                memo=line.memo, contract_ref=contract_ref, macro_ref=macro_ref, entry_id=self._entry_seq,
            )
            for name, sign in ((line.debit, 1), (line.credit, -1)):
                acc = ledger.accounts[name]
                key = claim_key(acc)
                if key is not None:
                    side = 0 if acc.kind is AccountKind.ASSET else 1
                    self._claims[key][side] += sign * line.amount * (1 if side == 0 else -1)
            out.append(entry)
        return tuple(out)

    def post_entry(self, owner: str, debit: str, credit: str, amount: int, date: dt.date,
                   memo: str = "", contract_ref: str | None = None) -> JournalEntry:
        """Post an internal (single-agent) entry, e.g. production or consumption.

        Claims and means of payment can only move through macro bookings.
        """
        ledger = self.ledger(owner)
        for name in (debit, credit):
            acc = ledger.account(name)
            if acc.claim_flag or acc.is_medium or acc.category == "register":
                raise InvarianceViolation(
                    f"internal entry on {owner}/{name} needs a counterparty booking")
        with self.atomic():
            self._advance_clock(date)
            (entry,) = self._post_lines(owner, [Line(debit, credit, amount, memo)], date, None, contract_ref)
            self.internal_entries.append(entry)
        return entry

    def post_macro_booking(
        self,
        kind: BookingKind,
        date: dt.date,
        legs: list[Leg],
        *,
        label: str = "",
        intermediary: Leg | None = None,
        phase: str = "event",
        contract_ref: str | None = None,
        boe_ref: str | None = None,
        supersedes: Iterable[tuple[str, str]] = (),
    ) -> MacroBooking:
        kind = BookingKind(kind)
        if kind in SINGLETON_KINDS:
            if len(legs) != 1:
                raise ArityViolation(f"{kind.value} bookings have exactly one leg")
            if legs[0].agent != self.central_bank:
                raise ArityViolation(f"only the central bank may post a singleton {kind.value} booking")
        else:
            if len(legs) != 2:
                raise ArityViolation(f"{kind.value} bookings need two legs, got {len(legs)}")
            if legs[0].agent == legs[1].agent:
                raise ArityViolation("the two legs of a macro booking belong to distinct agents")
        every = list(legs) + ([intermediary] if intermediary else [])
        for leg in every:
            self.agent(leg.agent)
            if not leg.lines:
                raise LegImbalance(f"empty leg for {leg.agent}")
        if intermediary and intermediary.agent in {leg.agent for leg in legs}:
            raise CrossAgentEntry("the intermediary must be a third agent")

        with self.atomic():
            self._advance_clock(date)
            self._booking_seq += 1
            mid = f"M{self._booking_seq}"
            touched: set[tuple] = set()
            posted = []
            for leg in every:
                entries = self._post_lines(leg.agent, leg.lines, date, mid, contract_ref)
                posted.append(PostedLeg(leg.agent, entries))
                ledger = self.ledgers[leg.agent]
                for e in entries:
                    for name in (e.debit, e.credit):
                        key = claim_key(ledger.accounts[name])
                        if key is not None:
                            touched.add(key)
            booking = MacroBooking(
                id=mid,
                label=label or mid,
                date=date,
                kind=kind,
                legs=tuple(posted[: len(legs)]),
                intermediary=posted[len(legs)] if intermediary else None,
                phase=phase,
                contract_ref=contract_ref,
                boe_ref=boe_ref,
                supersedes=tuple(supersedes),
            )
            bad = [Violation(format_key(k), *self._claims[k]) for k in sorted(touched)
                   if self._claims[k][0] != self._claims[k][1]]
            if bad:
                detail = ", ".join(f"{v.pair}: {v.lhs} != {v.rhs}" for v in bad)
                raise InvarianceViolation(f"booking {booking.label} breaks claim symmetry ({detail})", bad)
            if kind not in SINGLETON_KINDS:
                exp, rev = self.booking_flows(booking)
                if exp != rev:
                    raise InvarianceViolation(
                        f"booking {booking.label} pays out {exp} but receives {rev}",
                        [Violation(f"payments:{booking.label}", exp, rev)])
            self.bookings.append(booking)
            if self.trail is not None:
                report = self.debt_invariance()
                flows = self.payment_invariance()
                if not (report.holds and flows.holds):
                    raise InvarianceViolation(
                        f"full scan failed after booking {booking.label}", report.violations + flows.violations)
                self.trail.append(invariance_record(date, report, flows, booking=booking.label))
        return booking

    # invariances

    def debt_invariance(self) -> DebtReport:
        """Full scan: receivables vs liabilities, in total and per pair."""
        sums: dict[tuple, list[int]] = defaultdict(lambda: [0, 0])
        recv = liab = 0
        for ledger in self.ledgers.values():
            for name, signed in ledger.balances.items():
                acc = ledger.accounts[name]
                key = claim_key(acc)
                if key is None:
                    continue
                if acc.kind is AccountKind.ASSET:
                    sums[key][0] += signed
                    recv += signed
                else:
                    sums[key][1] -= signed
                    liab -= signed
        bad = [Violation(format_key(k), lhs, rhs) for k, (lhs, rhs) in sorted(sums.items()) if lhs != rhs]
        return DebtReport(recv, liab, bad)

    def booking_flows(self, booking: MacroBooking) -> tuple[int, int]:
        """(expenditures, revenues) of one booking's money movements."""
        exp = rev = 0
        for leg in booking.all_legs():
            d = leg_money_delta(self.ledgers[leg.agent], leg.entries)
            if d < 0:
                exp -= d
            else:
                rev += d
        return exp, rev

    def payment_invariance(self, start: dt.date | None = None, end: dt.date | None = None) -> PaymentReport:
        """Expenditures vs revenues over the bookings dated in ``[start, end]``."""
        exp = rev = 0
        bad = []
        for b in self.bookings:
            if b.kind in SINGLETON_KINDS:
                continue
            if (start is not None and b.date < start) or (end is not None and b.date > end):
                continue
            e, r = self.booking_flows(b)
            exp += e
            rev += r
            if e != r:
                bad.append(Violation(f"payments:{b.label}", e, r))
        return PaymentReport(exp, rev, bad)

    def cash_census(self) -> int:
        """Sum of physical money (cash and banknotes) held by every agent."""
        return sum(
            signed
            for ledger in self.ledgers.values()
            for name, signed in ledger.balances.items()
            if ledger.accounts[name].category == "cash"
        )

    def balance_sheet(self, agent_id: str, as_of: dt.date | None = None):
        return self.ledger(agent_id).balance_sheet(as_of)

    def trial_balance(self, agent_id: str):
        return self.ledger(agent_id).trial_balance()

    def journal(self) -> list[JournalEntry]:
        """All entries of all agents in posting order."""
        return sorted((e for lg in self.ledgers.values() for e in lg.journal), key=lambda e: e.id)


def invariance_record(date, debt: DebtReport, flows: PaymentReport, booking: str | None = None) -> dict:
    """The JSON shape of an invariance report."""
    rec = {
        "date": date.isoformat() if date else None,
        "total_receivables": debt.total_receivables,
        "total_liabilities": debt.total_liabilities,
        "total_expenditures": flows.total_expenditures,
        "total_revenues": flows.total_revenues,
        "violations": [{"pair": v.pair, "lhs": v.lhs, "rhs": v.rhs}
                       for v in debt.violations + flows.violations],
    }
    if booking is not None:
        rec["booking"] = booking
    return rec
