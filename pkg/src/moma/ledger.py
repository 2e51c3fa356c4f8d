"""Per-agent double-entry ledgers.

Balances are kept as debit-positive integers in minor units.  Every posting
is validated before it touches state, so a rejected entry leaves the ledger
unchanged.  The journal is append-only; corrections are reversing entries.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import (
    AbnormalBalance,
    CrossAgentEntry,
    CurrencyMismatch,
    DuplicateAccount,
    NonPositiveAmount,
    UnknownAccount,
)
from .money import DEFAULT_CURRENCY, Money


class AccountKind(str, Enum):
    ASSET = "Asset"
    LIABILITY = "Liability"
    EQUITY = "Equity"
    REVENUE = "Revenue"
    EXPENSE = "Expense"

    @property
    def debit_normal(self) -> bool:
        return self in (AccountKind.ASSET, AccountKind.EXPENSE)

    @property
    def code(self) -> str:
        return self.value[0]


_KIND_BY_CODE = {k.code: k for k in AccountKind}


@dataclass(frozen=True)
class Account:
    """A ledger account.

    ``category`` drives the macro checks: ``cash`` and ``deposit`` accounts
    are means of payment, anything with a counterparty is a claim.  Bearer
    instruments (bills of exchange, gold banknotes) carry ``instrument`` so
    claim matching can follow the holder instead of a fixed counterparty.
    """

    owner: str
    name: str
    kind: AccountKind
    counterparty: str | None = None
    claim_flag: bool = False
    contra: bool = False
    category: str = "general"
    instrument: str | None = None

    @property
    def id(self) -> str:
        return account_id(self)

    @property
    def is_medium(self) -> bool:
        return self.category in ("cash", "deposit")


def account_id(acc: Account) -> str:
    """Self-describing id: ``owner/K[c]/category/counterparty/instrument/name``.

    The id carries every attribute the invariance checks need, so an exported
    journal can be re-verified without any side table.
    """
    flags = acc.kind.code + ("c" if acc.contra else "") + ("!" if acc.claim_flag else "")
    return "/".join(
        [acc.owner, flags, acc.category, acc.counterparty or "-", acc.instrument or "-", acc.name]
    )


def parse_account_id(text: str) -> Account:
    parts = text.split("/")
    if len(parts) != 6:
        raise ValueError(f"malformed account id {text!r}")
    owner, flags, category, cp, instrument, name = parts
    if not flags or flags[0] not in _KIND_BY_CODE:
        raise ValueError(f"malformed account kind in {text!r}")
    return Account(
        owner=owner,
        name=name,
        kind=_KIND_BY_CODE[flags[0]],
        counterparty=None if cp == "-" else cp,
        claim_flag="!" in flags,
        contra="c" in flags[1:],
        category=category,
        instrument=None if instrument == "-" else instrument,
    )


@dataclass(frozen=True)
class JournalEntry:
    id: int
    date: dt.date
    owner: str
    debit: str
    credit: str
    amount: Money
    memo: str = ""
    contract_ref: str | None = None
    macro_ref: str | None = None


@dataclass(frozen=True)
class BalanceSheet:
    agent: str
    as_of: dt.date | None
    assets: Money
    liabilities: Money
    equity: Money

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.assets.amount, self.liabilities.amount, self.equity.amount)


def normal_balance(acc: Account, signed: int) -> int:
    """Convert a debit-positive balance to the account's normal side."""
    return signed if acc.kind.debit_normal else -signed


class Ledger:
    """One agent's double-entry accounting system."""

    def __init__(self, owner: str, currency: str = DEFAULT_CURRENCY):
        self.owner = owner
        self.currency = currency
        self.accounts: dict[str, Account] = {}
        self.balances: dict[str, int] = {}
        self.journal: list[JournalEntry] = []
        self._next_id = 1

    # accounts

    def open_account(
        self,
        name: str,
        kind: AccountKind,
        counterparty: str | None = None,
        claim_flag: bool | None = None,
        *,
        contra: bool = False,
        category: str = "general",
        instrument: str | None = None,
    ) -> Account:
        if name in self.accounts:
            raise DuplicateAccount(f"{self.owner} already has an account named {name!r}")
        if "/" in name or not name:
            raise ValueError(f"account name {name!r} must be non-empty and free of '/'")
        if claim_flag is None:
            claim_flag = counterparty is not None
        if claim_flag and counterparty is None and instrument is None:
            raise ValueError("a claim account needs a counterparty or an instrument")
        if counterparty == self.owner:
            raise ValueError("an account cannot have its owner as counterparty")
        acc = Account(
            owner=self.owner,
            name=name,
            kind=AccountKind(kind),
            counterparty=counterparty,
            claim_flag=claim_flag,
            contra=contra,
            category=category,
            instrument=instrument,
        )
        self.accounts[name] = acc
        self.balances[name] = 0
        return acc

    def ensure_account(self, name: str, kind: AccountKind, counterparty=None, **kw) -> Account:
        """Return the named account, opening it if needed (attributes must agree)."""
        acc = self.accounts.get(name)
        if acc is None:
            return self.open_account(name, kind, counterparty, **kw)
        if acc.kind != kind or acc.counterparty != counterparty:
            raise DuplicateAccount(f"{self.owner}/{name} exists with different attributes")
        return acc

    def account(self, name: str) -> Account:
        try:
            return self.accounts[name]
        except KeyError:
            raise UnknownAccount(f"{self.owner} has no account {name!r}") from None

    def balance(self, name: str) -> int:
        """Balance on the account's normal side (positive for a normal balance)."""
        acc = self.account(name)
        return normal_balance(acc, self.balances[name])

    def balance_or_zero(self, name: str) -> int:
        return self.balance(name) if name in self.accounts else 0

    # postings

    def check_entry(self, debit: str, credit: str, amount: Money, pending: dict[str, int] | None = None,
                    check_sign: bool = True):
        """Validate a posting; ``pending`` holds not-yet-applied balance deltas."""
        if not isinstance(amount, Money):
            amount = Money(amount, self.currency)
        if amount.currency != self.currency:
            raise CurrencyMismatch(f"{amount.currency} posted to a {self.currency} ledger")
        if amount.amount <= 0:
            raise NonPositiveAmount(f"entry amount must be positive, got {amount.amount}")
        if debit == credit:
            raise ValueError("debit and credit account must differ")
        for name in (debit, credit):
            if name not in self.accounts:
                raise UnknownAccount(f"{self.owner} has no account {name!r}")
        pending = pending if pending is not None else {}
        for name, delta in ((debit, amount.amount), (credit, -amount.amount)):
            acc = self.accounts[name]
            after = self.balances[name] + pending.get(name, 0) + delta
            if check_sign and not acc.contra and normal_balance(acc, after) < 0:
                raise AbnormalBalance(
                    f"{self.owner}/{name} would go to {normal_balance(acc, after)} "
                    f"(balance {normal_balance(acc, self.balances[name] + pending.get(name, 0))}, "
                    f"posting {amount.amount})"
                )
            pending[name] = pending.get(name, 0) + delta
        return amount

    def post_entry(
        self,
        debit: str,
        credit: str,
        amount: Money | int,
        date: dt.date,
        memo: str = "",
        contract_ref: str | None = None,
        macro_ref: str | None = None,
        entry_id: int | None = None,
        owner: str | None = None,
    ) -> JournalEntry:
        if owner is not None and owner != self.owner:
            raise CrossAgentEntry(f"entry for {owner} posted to the ledger of {self.owner}")
        if not isinstance(amount, Money):
            amount = Money(amount, self.currency)
        amount = self.check_entry(debit, credit, amount)
        if entry_id is None:
            entry_id = self._next_id
        self._next_id = max(self._next_id, entry_id + 1)
        entry = JournalEntry(
            id=entry_id,
            date=date,
            owner=self.owner,
            debit=debit,
            credit=credit,
            amount=amount,
            memo=memo,
            contract_ref=contract_ref,
            macro_ref=macro_ref,
        )
        self.balances[debit] += amount.amount
        self.balances[credit] -= amount.amount
        self.journal.append(entry)
        return entry

    # reports

    def fold(self, as_of: dt.date | None = None, entries: Iterable[JournalEntry] | None = None) -> dict[str, int]:
        """Recompute debit-positive balances from scratch over the journal."""
        out = {name: 0 for name in self.accounts}
        for e in self.journal if entries is None else entries:
            if as_of is not None and e.date > as_of:
                continue
            out[e.debit] += e.amount.amount
            out[e.credit] -= e.amount.amount
        return out

    def check_signs(self, pending: dict[str, int]) -> None:
        """Reject pending deltas that would leave any account on its abnormal side."""
        for name, delta in pending.items():
            acc = self.accounts[name]
            after = self.balances[name] + delta
            if not acc.contra and normal_balance(acc, after) < 0:
                raise AbnormalBalance(
                    f"{self.owner}/{name} would go to {normal_balance(acc, after)} "
                    f"(balance {normal_balance(acc, self.balances[name])})"
                )

    def trial_balance(self) -> list[tuple[Account, int]]:
        """Non-zero accounts with debit-positive balances, in opening order."""
        return [(self.accounts[n], b) for n, b in self.balances.items() if b != 0]

    def balance_sheet(self, as_of: dt.date | None = None) -> BalanceSheet:
        balances = self.balances if as_of is None else self.fold(as_of)
        assets = liabilities = equity = 0
        for name, signed in balances.items():
            kind = self.accounts[name].kind
            if kind is AccountKind.ASSET:
                assets += signed
            elif kind is AccountKind.LIABILITY:
                liabilities -= signed
            else:
                # revenue and expense close into equity
                equity -= signed
        return BalanceSheet(
            agent=self.owner,
            as_of=as_of,
            assets=Money(assets, self.currency),
            liabilities=Money(liabilities, self.currency),
            equity=Money(equity, self.currency),
        )
