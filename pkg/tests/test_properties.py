import datetime as dt
from fractions import Fraction

from conftest import D0, make_system
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from moma import boe, chart, contracts, export, issuance, payments
from moma.errors import MomaError
from moma.ledger import AccountKind, Ledger
from moma.scenarios import liquidity, schedule

SLOW = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])

# ledger folding

ACCOUNTS = [("Cash", AccountKind.ASSET), ("Stock", AccountKind.ASSET), ("Loan", AccountKind.LIABILITY),
            ("Capital", AccountKind.EQUITY), ("Sales", AccountKind.REVENUE), ("Costs", AccountKind.EXPENSE)]

entries = st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(1, 10_000), st.integers(0, 3)),
                   max_size=40)


@given(entries)
@settings(max_examples=300, deadline=None)
def test_fold_reproduces_incremental_balances(items):
    lg = Ledger("X")
    for name, kind in ACCOUNTS:
        lg.open_account(name, kind)
    date, snapshots = D0, []
    for d, c, amount, step in items:
        date += dt.timedelta(days=step)
        before = dict(lg.balances), len(lg.journal)
        try:
            lg.post_entry(ACCOUNTS[d][0], ACCOUNTS[c][0], amount, date)
        except (MomaError, ValueError):
            assert (dict(lg.balances), len(lg.journal)) == before
        snapshots.append((date, dict(lg.balances)))
    assert lg.fold() == lg.balances
    for when, bal in snapshots:
        later = [b for d, b in snapshots if d == when]
        assert lg.fold(as_of=when) == later[-1]
    sheet = lg.balance_sheet()
    assert sheet.assets == sheet.liabilities + sheet.equity


# a random fiat economy

AGENTS = ("CB", "BankA", "BankB", "Firm", "Shop", "Home")
OPS = ("issue", "destroy", "cb_loan", "withdraw_cb", "bank_loan", "withdraw", "deposit", "sale", "repay",
       "clear")
steps = st.lists(st.tuples(st.sampled_from(OPS), st.integers(0, 5), st.integers(0, 5), st.integers(1, 500_00)),
                 min_size=1, max_size=25)


def economy():
    s = make_system(("CB", "CentralBank"), ("BankA", "Bank"), ("BankB", "Bank"), ("Firm", "Company"),
                    ("Shop", "Company"), ("Home", "Household"))
    return s


def apply(s, op, a, b, amount, date, n):
    banks, others = ("BankA", "BankB"), ("Firm", "Shop", "Home")
    bank, other = banks[a % 2], others[b % 3]
    if op == "issue":
        issuance.issue_money(s, amount, date)
    elif op == "destroy":
        issuance.destroy_money(s, amount, date)
    elif op == "cb_loan":
        issuance.cb_loan(s, bank, amount, date)
    elif op == "withdraw_cb":
        issuance.withdraw_from_cb(s, bank, amount, date)
    elif op == "bank_loan":
        issuance.bank_loan(s, bank, other, amount, date)
    elif op == "withdraw":
        issuance.withdraw_from_bank(s, other, bank, amount, date)
    elif op == "deposit":
        issuance.deposit_cash(s, other, bank, amount, date)
    elif op == "sale":
        seller, buyer = others[a % 3], others[b % 3]
        if seller == buyer:
            raise MomaError("no self-sales")
        pid = f"P{n}"
        s.post_entry(seller, chart.goods(s, seller), chart.equity(s, seller), amount, date, memo="stock")
        contracts.register_product(s, seller, contracts.Product(pid, "goods"), amount)
        contracts.purchase(s, seller, buyer, pid, amount, medium="auto", cid=f"T{n}")
        contracts.deliver(s, f"T{n}", date)
        contracts.pay(s, f"T{n}", date)
    elif op == "repay":
        loans = sorted(c.id for c in s.contracts.values() if c.kind is contracts.ContractKind.LOAN
                       and c.status is not contracts.Status.FULFILLED)
        if not loans:
            raise MomaError("nothing to repay")
        contracts.repay_loan(s, loans[a % len(loans)], None, date)
    elif op == "clear":
        from moma import clearing

        clearing.clear(s, "BankA", "BankB", date)


def drive(items):
    s, date = economy(), D0
    ok = 0
    for n, (op, a, b, amount) in enumerate(items):
        date += dt.timedelta(days=1)
        fp = s.fingerprint()
        try:
            with s.atomic():
                apply(s, op, a, b, amount, date, n)
        except MomaError:
            assert s.fingerprint() == fp, op
            continue
        ok += 1
        assert s.debt_invariance().holds, op
        assert s.payment_invariance().holds, op
        assert s.cash_census() == s.register.outstanding, op
    return s, ok


@given(steps)
@SLOW
def test_random_economy_keeps_invariances_and_money(items):
    drive(items)


@given(steps)
@SLOW
def test_journal_checker_agrees_with_the_engine(items):
    s, _ = drive(items)
    res = export.check_journal(export.journal_csv(s))
    assert res.ok, res.problem
    d, p = s.debt_invariance(), s.payment_invariance()
    assert (res.record["total_receivables"], res.record["total_liabilities"]) == \
        (d.total_receivables, d.total_liabilities)
    assert (res.record["total_expenditures"], res.record["total_revenues"]) == \
        (p.total_expenditures, p.total_revenues)


@given(steps)
@SLOW
def test_deposits_mirror_bank_liabilities(items):
    s, _ = drive(items)
    for bank in ("BankA", "BankB", "CB"):
        held = sum(chart.deposit_balance(s, c, bank) for c in s.agents if c != bank
                   and f"DepositAt:{bank}" in s.ledger(c).accounts)
        owed = sum(s.balance(bank, n) for n in s.ledger(bank).accounts if n.startswith("DepositOf:"))
        assert held == owed


@given(steps)
@settings(max_examples=50, deadline=None)
def test_failed_atomic_block_restores_everything(items):
    s, _ = drive(items)
    fp, n_bookings, n_contracts = s.fingerprint(), len(s.bookings), len(s.contracts)
    try:
        with s.atomic():
            issuance.issue_money(s, 1, s.clock or D0)
            contracts.purchase(s, "Firm", "Home", "nothing", 1, cid="ZZ")
            raise MomaError("abort")
    except MomaError:
        pass
    assert (s.fingerprint(), len(s.bookings), len(s.contracts)) == (fp, n_bookings, n_contracts)


# bills of exchange

@given(st.integers(1, 10**9), st.fractions(0, 1), st.fractions(0, 1), st.integers(0, 360), st.integers(0, 360))
@settings(max_examples=500)
def test_discount_price_is_monotone(face, r1, r2, d1, d2):
    lo_r, hi_r = sorted((r1, r2))
    lo_d, hi_d = sorted((d1, d2))
    assert boe.discount_price(face, hi_r, lo_d) <= boe.discount_price(face, lo_r, lo_d) <= face
    assert boe.discount_price(face, lo_r, hi_d) <= boe.discount_price(face, lo_r, lo_d)
    assert boe.discount_price(face, 0, hi_d) == face


# schedules and liquidity

@given(st.integers(1, 10**9), st.fractions(0, 1, max_denominator=1000), st.integers(1, 40))
@settings(max_examples=500)
def test_schedule_installments_add_up_exactly(principal, rate, n):
    s = schedule.build_schedule(principal, rate, n, "1m", start=D0)
    amounts = [a for _, a in s.expected]
    total = principal * (1 + rate)
    assert abs(s.total_expected - total) <= Fraction(1, 2)
    assert len(set(amounts[:-1])) <= 1
    assert 0 <= amounts[-1] - amounts[0] < n
    assert [d for d, _ in s.expected] == sorted({d for d, _ in s.expected})


pairs = st.lists(st.tuples(st.sampled_from("ABCDEFGH"), st.integers(0, 10_000)), max_size=6,
                 unique_by=lambda p: p[0])


@given(pairs, pairs)
@settings(max_examples=500)
def test_liquidity_allocation_conserves_and_stays_pro_rata(shortfalls, surpluses):
    assume(not {a for a, _ in shortfalls} & {a for a, _ in surpluses})
    shortfalls = [(a, x) for a, x in shortfalls if x > 0]
    surpluses = [(a, x) for a, x in surpluses if x > 0]
    table = liquidity.allocate(shortfalls, surpluses)
    s_tot, u_tot = sum(x for _, x in shortfalls), sum(x for _, x in surpluses)
    total = min(s_tot, u_tot)
    assert sum(x for *_, x in table) == total
    need, have = dict(shortfalls), dict(surpluses)
    for lender, borrower, x in table:
        ideal = Fraction(total * need[borrower] * have[lender], s_tot * u_tot)
        assert ideal - 1 < x < ideal + 1
    for borrower, x in shortfalls:
        assert sum(y for _, b, y in table if b == borrower) <= x
    for lender, x in surpluses:
        assert sum(y for a, _, y in table if a == lender) <= x


# payment routing

@given(st.sampled_from(["Firm", "Shop", "Home", "BankA"]), st.sampled_from(["Firm", "Shop", "Home", "BankB"]),
       st.integers(1, 1000))
@settings(max_examples=100, deadline=None)
def test_routes_move_exactly_the_amount(payer, payee, amount):
    assume(payer != payee)
    s = economy()
    issuance.cb_loan(s, "BankA", 10_000, D0)
    issuance.cb_loan(s, "BankB", 10_000, D0)
    for a in ("Firm", "Shop", "Home"):
        issuance.bank_loan(s, "BankA", a, 5_000, D0)
    r = payments.route(s, payer, payee, amount)
    assert r.payer_account in s.ledger(payer).accounts
    assert r.payee_account in s.ledger(payee).accounts
