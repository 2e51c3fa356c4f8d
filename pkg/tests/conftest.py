import datetime as dt

import pytest

from moma import Regime, System

D0 = dt.date(2024, 1, 1)


def day(n: int) -> dt.date:
    """Date n days after 2024-01-01."""
    return D0 + dt.timedelta(days=n)


def make_system(*agents: tuple[str, str], regime: Regime | None = None) -> System:
    s = System(regime=regime)
    for aid, role in agents:
        s.add_agent(aid, role)
    return s


@pytest.fixture
def fiat():
    """Central bank, two banks, two companies and a household."""
    return make_system(("CB", "CentralBank"), ("BankA", "Bank"), ("BankB", "Bank"),
                       ("Seller", "Company"), ("Buyer", "Company"), ("Home", "Household"))


def assert_invariances(system) -> None:
    debt, flows = system.debt_invariance(), system.payment_invariance()
    assert debt.holds, debt.violations
    assert flows.holds, flows.violations


def give_product(system, owner: str, pid: str, value: int, date=D0):
    from moma import chart, contracts

    acc = chart.goods(system, owner)
    system.post_entry(owner, acc, chart.equity(system, owner), value, date, memo=f"opening {pid}")
    return contracts.register_product(system, owner, contracts.Product(pid), value)


def fund(system, agent: str, amount: int, date=D0, bank: str = "BankA"):
    """Give a non-bank a deposit by lending it the amount."""
    from moma import issuance

    return issuance.bank_loan(system, bank, agent, amount, date)


FACE = 100_000_00


def trade_claim(system, seller="Seller", buyer="Buyer", price=FACE, cid="T1", date=D0):
    """A delivered, unpaid purchase: the seller holds an open trade claim."""
    from moma import contracts

    give_product(system, seller, f"P-{cid}", price, date)
    contracts.purchase(system, seller, buyer, f"P-{cid}", price, cid=cid)
    contracts.deliver(system, cid, date)


def money_position(system, agent):
    """Means of payment held, debit-positive: cash and deposits up, deposits owed down."""
    lg = system.ledger(agent)
    return sum(bal for n, bal in lg.balances.items() if lg.accounts[n].is_medium)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
