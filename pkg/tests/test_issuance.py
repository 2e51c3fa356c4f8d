from fractions import Fraction

import pytest
from conftest import assert_invariances, day, make_system

from moma import Regime, chart, contracts, issuance
from moma.errors import (
    BelowCredibilityRating,
    GoldRegime,
    InsufficientBankCash,
    InsufficientDeposit,
    InsufficientVaultCash,
    NonPositiveAmount,
    NotCentralBank,
    NotOwner,
)

AMOUNT = 100_000_00


def money_conserved(s) -> bool:
    return s.register.outstanding == s.cash_census()


def test_issue_fills_vault_and_register(fiat):
    issuance.issue_money(fiat, AMOUNT, day(0))
    assert chart.cash_balance(fiat, "CB") == AMOUNT
    assert (fiat.register.total_issued, fiat.register.outstanding) == (AMOUNT, AMOUNT)
    assert fiat.debt_invariance().total_receivables == 0
    assert money_conserved(fiat)


def test_issue_guards(fiat):
    with pytest.raises(NonPositiveAmount):
        issuance.issue_money(fiat, 0, day(0))
    with pytest.raises(NotCentralBank):
        issuance.issue_money(fiat, 1, day(0), issuer="BankA")
    gold = make_system(("CB", "CentralBank"), regime=Regime("gold", 100))
    with pytest.raises(GoldRegime):
        issuance.issue_money(gold, 1, day(0))


def test_cb_loan_creates_receivable_and_deposit(fiat):
    c, b = issuance.cb_loan(fiat, "BankA", AMOUNT, day(0), rate=Fraction(1, 10))
    assert fiat.balance("CB", "LoanReceivable:" + c.id) == AMOUNT
    assert chart.deposit_balance(fiat, "BankA", "CB") == AMOUNT
    with pytest.raises(NonPositiveAmount):
        issuance.cb_loan(fiat, "BankA", 0, day(0))


def test_cb_loan_needs_credibility(fiat):
    fiat.agent("BankB").rating = 10
    with pytest.raises(BelowCredibilityRating):
        issuance.cb_loan(fiat, "BankB", 1, day(0))


def test_cb_loan_repaid_with_interest(fiat):
    # a 360-day tenor on ACT/360 makes the 10% rate a full year's interest
    c, _ = issuance.cb_loan(fiat, "BankA", AMOUNT, day(0), rate=Fraction(1, 10), maturity=day(360))
    assert c.repayment == 110_000_00
    issuance.cb_loan(fiat, "BankA", 10_000_00, day(1))
    contracts.repay_loan(fiat, c.id, None, day(360))
    assert fiat.balance("CB", "LoanReceivable:" + c.id) == fiat.balance("BankA", "LoanPayable:" + c.id) == 0
    assert fiat.balance("CB", "InterestIncome") == 10_000_00
    assert_invariances(fiat)


def test_withdrawal_chain_down_to_the_company(fiat):
    issuance.issue_money(fiat, AMOUNT, day(0))
    issuance.cb_loan(fiat, "BankA", AMOUNT, day(1))
    issuance.withdraw_from_cb(fiat, "BankA", AMOUNT, day(2))
    assert chart.cash_balance(fiat, "BankA") == AMOUNT
    cash_before = {a: chart.cash_balance(fiat, a) for a in fiat.agents}
    c, _ = issuance.bank_loan(fiat, "BankA", "Seller", AMOUNT, day(3), rate=Fraction(1, 10))
    assert {a: chart.cash_balance(fiat, a) for a in fiat.agents} == cash_before
    assert chart.deposit_balance(fiat, "Seller", "BankA") == AMOUNT
    assert fiat.balance("BankA", "LoanReceivable:" + c.id) == AMOUNT
    issuance.withdraw_from_bank(fiat, "Seller", "BankA", AMOUNT, day(4))
    assert chart.cash_balance(fiat, "Seller") == AMOUNT
    assert money_conserved(fiat)
    assert_invariances(fiat)


def test_withdrawal_guards(fiat):
    issuance.cb_loan(fiat, "BankA", 100, day(0))
    with pytest.raises(InsufficientDeposit):
        issuance.withdraw_from_cb(fiat, "BankA", 101, day(1))
    with pytest.raises(InsufficientVaultCash):
        issuance.withdraw_from_cb(fiat, "BankA", 100, day(1))
    issuance.bank_loan(fiat, "BankA", "Seller", 100, day(1))
    with pytest.raises(NonPositiveAmount):
        issuance.withdraw_from_bank(fiat, "Seller", "BankA", 0, day(1))
    with pytest.raises(InsufficientBankCash):
        issuance.withdraw_from_bank(fiat, "Seller", "BankA", 100, day(1))


def test_bank_loan_repaid_from_deposit(fiat):
    c, _ = issuance.bank_loan(fiat, "BankA", "Seller", AMOUNT, day(0), rate=Fraction(1, 10))
    issuance.bank_loan(fiat, "BankA", "Seller", 10_000_00, day(0))
    contracts.repay_loan(fiat, c.id, None, day(1))
    assert fiat.balance("BankA", "LoanReceivable:" + c.id) == 0
    assert fiat.balance("BankA", "InterestIncome") == 10_000_00
    assert_invariances(fiat)


def test_destroy_closes_the_register(fiat):
    issuance.issue_money(fiat, AMOUNT, day(0))
    with pytest.raises(InsufficientVaultCash):
        issuance.destroy_money(fiat, AMOUNT + 1, day(1))
    issuance.destroy_money(fiat, AMOUNT, day(1))
    assert fiat.register.outstanding == 0 == fiat.cash_census()
    assert [e.event for e in fiat.register.events] == ["Issue", "Destroy"]


@pytest.fixture
def gold():
    # 100 000.00 per kilogram
    s = make_system(("CB", "CentralBank"), ("Miner", "GoldMiner"), regime=Regime("gold", 10_000))
    issuance.add_gold(s, "Miner", 1000, day(0))
    return s


def test_banknote_for_gold(gold):
    issuance.issue_banknote_for_gold(gold, "Miner", 1000, day(1))
    assert chart.cash_balance(gold, "Miner") == AMOUNT
    assert gold.gold["CB"] == 1000 and gold.gold["Miner"] == 0
    assert gold.balance("CB", "Gold") == AMOUNT
    # gold backing: outstanding notes equal CB gold at the issue price
    assert gold.balance("CB", "BanknotesOutstanding") == gold.gold["CB"] * gold.regime.gold_price
    assert_invariances(gold)


def test_redeeming_restores_the_initial_state(gold):
    before = {a: (gold.ledger(a).balance_sheet().as_tuple(), gold.gold[a]) for a in gold.agents}
    issuance.issue_banknote_for_gold(gold, "Miner", 1000, day(1))
    issuance.redeem_banknote(gold, "Miner", 1000, day(2))
    after = {a: (gold.ledger(a).balance_sheet().as_tuple(), gold.gold[a]) for a in gold.agents}
    assert after == before
    assert gold.register.outstanding == 0


def test_no_gold_no_banknote(gold):
    with pytest.raises(NotOwner):
        issuance.issue_banknote_for_gold(gold, "Miner", 1001, day(1))
