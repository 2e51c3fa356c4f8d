"""Account naming conventions shared by every operation.

Each helper opens the account on first use and returns its name.  Names are
free of whitespace so scenario files can refer to them directly.
"""

from __future__ import annotations

from .ledger import AccountKind

A, L, E, R, X = (AccountKind.ASSET, AccountKind.LIABILITY, AccountKind.EQUITY,
                 AccountKind.REVENUE, AccountKind.EXPENSE)

BANKNOTES = "banknotes"


def cash(system, agent: str) -> str:
    """Physical money.  Under a gold regime everyone but the central bank
    holds banknotes, which are bearer claims on the central bank's gold."""
    cb = system.central_bank if system.regime.is_gold else None
    if cb is not None and agent != cb:
        system.ensure_account(agent, "Banknotes", A, cb, category="cash", instrument=BANKNOTES)
        return "Banknotes"
    system.ensure_account(agent, "Cash", A, category="cash")
    return "Cash"


def cash_balance(system, agent: str) -> int:
    lg = system.ledger(agent)
    return lg.balance_or_zero("Cash") + lg.balance_or_zero("Banknotes")


def deposit_at(system, customer: str, bank: str) -> str:
    name = f"DepositAt:{bank}"
    system.ensure_account(customer, name, A, bank, category="deposit")
    return name


def deposit_of(system, bank: str, customer: str) -> str:
    name = f"DepositOf:{customer}"
    system.ensure_account(bank, name, L, customer, category="deposit")
    return name


def deposit_balance(system, customer: str, bank: str) -> int:
    return system.balance(customer, f"DepositAt:{bank}")


def receivable_from(system, agent: str, other: str) -> str:
    name = f"ReceivableFrom:{other}"
    system.ensure_account(agent, name, A, other, category="interbank")
    return name


def payable_to(system, agent: str, other: str) -> str:
    name = f"PayableTo:{other}"
    system.ensure_account(agent, name, L, other, category="interbank")
    return name


def contract_claim(system, agent: str, cid: str, other: str) -> str:
    name = f"Claim:{cid}"
    system.ensure_account(agent, name, A, other, category="contract")
    return name


def contract_debt(system, agent: str, cid: str, other: str) -> str:
    name = f"Debt:{cid}"
    system.ensure_account(agent, name, L, other, category="contract")
    return name


def loan_receivable(system, agent: str, cid: str, other: str) -> str:
    name = f"LoanReceivable:{cid}"
    system.ensure_account(agent, name, A, other, category="loan")
    return name


def loan_payable(system, agent: str, cid: str, other: str) -> str:
    name = f"LoanPayable:{cid}"
    system.ensure_account(agent, name, L, other, category="loan")
    return name


def boe_held(system, holder: str, bid: str, drawee: str) -> str:
    name = f"BoE:{bid}"
    system.ensure_account(holder, name, A, drawee, category="boe", instrument=bid)
    return name


def boe_payable(system, drawee: str, bid: str) -> str:
    name = f"BoEPayable:{bid}"
    system.ensure_account(drawee, name, L, None, claim_flag=True, category="boe", instrument=bid)
    return name


def restitution_claim(system, agent: str, rid: str, other: str) -> str:
    name = f"RestitutionClaim:{rid}"
    system.ensure_account(agent, name, A, other, category="restitution")
    return name


def restitution_debt(system, agent: str, rid: str, other: str) -> str:
    name = f"RestitutionDebt:{rid}"
    system.ensure_account(agent, name, L, other, category="restitution")
    return name


def circulating_m(system) -> str:
    system.ensure_account(system.central_bank, "CirculatingM", L, None, claim_flag=False, category="register")
    return "CirculatingM"


def banknotes_outstanding(system) -> str:
    system.ensure_account(system.central_bank, "BanknotesOutstanding", L, None, claim_flag=True,
                          category="banknote", instrument=BANKNOTES)
    return "BanknotesOutstanding"


def goods(system, agent: str, name: str = "Products") -> str:
    system.ensure_account(agent, name, A)
    return name


def gold(system, agent: str) -> str:
    system.ensure_account(agent, "Gold", A)
    return "Gold"


def equity(system, agent: str) -> str:
    system.ensure_account(agent, "Equity", E)
    return "Equity"


def revenue(system, agent: str, name: str) -> str:
    system.ensure_account(agent, name, R)
    return name


def expense(system, agent: str, name: str) -> str:
    system.ensure_account(agent, name, X)
    return name
