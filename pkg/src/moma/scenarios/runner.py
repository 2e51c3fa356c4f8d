"""Replaying a scenario against a fresh system."""

from __future__ import annotations

import dataclasses
import datetime as dt
from dataclasses import dataclass, field
from fractions import Fraction

from .. import boe, chart, clearing, contracts, issuance, payments
from ..errors import MomaError, ScenarioAssertion, ScenarioParseError
from ..ledger import AccountKind
from ..macro import BookingKind, Leg, Line, Regime, System, invariance_record
from ..money import parse_rational
from . import liquidity, schedule
from .lifecycle import DebtLifecycle, debt_lifecycles
from .parser import Event, Scenario, _column

_YES = {"yes", "true", "1", "on"}
_NO = {"no", "false", "0", "off"}


@dataclass
class RunReport:
    scenario: str
    system: System
    trail: list[dict]
    final: dict
    lifecycles: list[DebtLifecycle]
    schedules: dict[str, schedule.RepaymentSchedule] = field(default_factory=dict)
    assertions: int = 0
    end_date: dt.date | None = None  # last event date, which may follow the last booking

    @property
    def event_bookings(self):
        return [b for b in self.system.bookings if b.phase == "event"]


class Runner:
    """Executes scenario events one by one; every command maps to one method."""

    def __init__(self, scenario: Scenario, check_every_step: bool = True, regime: str | None = None):
        self.scenario = scenario
        self.check = check_every_step
        self.lines = scenario.source.splitlines()
        self.system = System(regime=self._regime(scenario.regime, regime))
        if check_every_step:
            self.system.trail = []
        self.schedules: dict[str, schedule.RepaymentSchedule] = {}
        self.assertions = 0
        self.ev: Event | None = None

    @staticmethod
    def _regime(declared: tuple[str, ...], override: str | None) -> Regime:
        kind = override or (declared[0] if declared else "fiat")
        price = None
        if kind == "gold":
            price = int(declared[1]) if len(declared) > 1 and declared[0] == "gold" else 10_000
        return Regime(kind, price)

    # argument helpers

    def _bad(self, message: str, index: int | None = None) -> ScenarioParseError:
        raw = self.lines[self.ev.line - 1].split("#", 1)[0]
        col = 1
        if index is not None:
            offset = 2 + (1 if self.ev.opening else 0)
            col = _column(raw, offset + index)
        return ScenarioParseError(message, self.ev.line, col)

    def arg(self, i: int) -> str:
        if i >= len(self.ev.args):
            raise self._bad(f"{self.ev.command}: missing argument {i + 1}", None)
        return self.ev.args[i]

    def int_arg(self, i: int) -> int:
        tok = self.arg(i)
        try:
            return int(tok)
        except ValueError:
            raise self._bad(f"expected an integer amount, got {tok!r}", i) from None

    def opt(self, name: str, default=None):
        return self.ev.options.get(name, default)

    def rate_opt(self, name: str = "rate") -> Fraction:
        return parse_rational(self.opt(name, "0"))

    def date_opt(self, name: str) -> dt.date | None:
        v = self.opt(name)
        return dt.date.fromisoformat(v) if v else None

    def bool_opt(self, name: str, default: bool) -> bool:
        v = self.opt(name)
        if v is None:
            return default
        if v.lower() in _YES:
            return True
        if v.lower() in _NO:
            return False
        raise self._bad(f"option {name} expects yes/no, got {v!r}")

    @property
    def label(self) -> str:
        return self.opt("label", "")

    # running

    def run(self) -> RunReport:
        for index, ev in enumerate(self.scenario.events, start=1):
            self.ev = ev
            handler = getattr(self, f"do_{ev.command}", None)
            if handler is None:
                raise ScenarioParseError(f"unknown command {ev.command!r}", ev.line,
                                         _column(self.lines[ev.line - 1], 2 if ev.opening else 1))
            before = len(self.system.bookings)
            try:
                handler(ev.date)
            except ScenarioParseError:
                raise
            except (MomaError, ValueError) as exc:
                if isinstance(exc, ValueError):
                    raise self._bad(str(exc)) from exc
                exc.event_index, exc.line, exc.date = index, ev.line, ev.date
                exc.args = (f"event {index} (line {ev.line}, {ev.date} {ev.command}): {exc}",)
                raise
            if ev.opening:
                for i in range(before, len(self.system.bookings)):
                    self.system.bookings[i] = dataclasses.replace(self.system.bookings[i], phase="opening")
        s = self.system
        final = invariance_record(s.clock, s.debt_invariance(), s.payment_invariance())
        end = self.scenario.events[-1].date if self.scenario.events else s.clock
        return RunReport(self.scenario.name, s, list(s.trail or []), final, debt_lifecycles(s),
                         self.schedules, self.assertions, end)

    # set-up

    def do_scenario(self, date):
        pass

    def do_regime(self, date):
        kind = self.arg(0)
        if kind not in ("fiat", "gold"):
            raise self._bad(f"unknown regime {kind!r}", 0)
        if self.system.agents:
            raise self._bad("the regime must be declared before any agent")

    def do_agent(self, date):
        self.system.add_agent(self.arg(0), self.arg(1), name=self.opt("name"), rating=int(self.opt("rating", 100)))

    def do_account(self, date):
        kind = AccountKind(self.arg(2))
        cp = self.opt("counterparty")
        self.system.open_account(self.arg(0), self.arg(1), kind, cp, self.bool_opt("claim", cp is not None),
                                 contra=self.bool_opt("contra", False), category=self.opt("category", "general"))

    def do_position(self, date):
        agent, name, amount = self.arg(0), self.arg(1), self.int_arg(2)
        chart.goods(self.system, agent, name)
        self.system.post_entry(agent, name, chart.equity(self.system, agent), amount, date, memo="opening")

    def do_product(self, date):
        agent, pid, value = self.arg(0), self.arg(1), self.int_arg(2)
        account = self.opt("account", "Products")
        chart.goods(self.system, agent, account)
        with self.system.atomic():
            if value:
                self.system.post_entry(agent, account, chart.equity(self.system, agent), value, date,
                                       memo=f"opening {pid}")
            contracts.register_product(self.system, agent, contracts.Product(pid, self.opt("description", ""),
                                                                             account), value)

    def do_gold(self, date):
        issuance.add_gold(self.system, self.arg(0), self.int_arg(1), date)

    # money

    def do_issue(self, date):
        issuance.issue_money(self.system, self.int_arg(0), date, label=self.label)

    def do_destroy(self, date):
        issuance.destroy_money(self.system, self.int_arg(0), date, label=self.label)

    def do_gold_issue(self, date):
        issuance.issue_banknote_for_gold(self.system, self.arg(0), self.int_arg(1), date, label=self.label)

    def do_redeem(self, date):
        issuance.redeem_banknote(self.system, self.arg(0), self.int_arg(1), date, label=self.label)

    def do_cb_loan(self, date):
        issuance.cb_loan(self.system, self.arg(0), self.int_arg(1), date, rate=self.rate_opt(),
                         maturity=self.date_opt("maturity"), label=self.label, cid=self.opt("id"))

    def do_bank_loan(self, date):
        issuance.bank_loan(self.system, self.arg(0), self.arg(1), self.int_arg(2), date, rate=self.rate_opt(),
                           maturity=self.date_opt("maturity"), label=self.label, cid=self.opt("id"))

    def do_loan(self, date):
        contracts.grant_loan(self.system, self.arg(0), self.arg(1), self.int_arg(2), date, rate=self.rate_opt(),
                             maturity=self.date_opt("maturity"), label=self.label, medium=self.opt("medium"),
                             cid=self.opt("id"))

    def do_repay(self, date):
        amount = self.int_arg(1) if len(self.ev.args) > 1 else None
        contracts.repay_loan(self.system, self.arg(0), amount, date, label=self.label, medium=self.opt("medium"))

    def do_withdraw(self, date):
        issuance.withdraw(self.system, self.arg(0), self.arg(1), self.int_arg(2), date, label=self.label)

    def do_withdraw_cb(self, date):
        issuance.withdraw_from_cb(self.system, self.arg(0), self.int_arg(1), date, label=self.label)

    def do_distribute(self, date):
        payments.distribute(self.system, self.arg(0), self.arg(1), self.int_arg(2), date, label=self.label,
                            medium=self.opt("medium", "auto"))

    def do_deposit(self, date):
        issuance.deposit_cash(self.system, self.arg(0), self.arg(1), self.int_arg(2), date, label=self.label)

    # trade

    def do_purchase(self, date):
        contracts.purchase(self.system, self.arg(1), self.arg(2), self.arg(3), self.int_arg(4),
                           medium=self.opt("medium", "cash"), cid=self.arg(0))

    def do_deliver(self, date):
        contracts.deliver(self.system, self.arg(0), date, label=self.label)

    def do_pay(self, date):
        contracts.pay(self.system, self.arg(0), date, label=self.label, medium=self.opt("medium"))

    def do_produce(self, date):
        s, agent, out = self.system, self.arg(0), self.arg(1)
        inputs = self.arg(2).split(",")
        account = self.opt("account", "Products")
        with s.atomic():
            value = 0
            chart.goods(s, agent, account)
            for pid in inputs:
                rec = contracts.product_record(s, pid)
                if s.owners.get(pid) != agent:
                    raise contracts.NotOwner(f"{agent} does not own {pid}")
                if rec.book_value and rec.thing.account != account:
                    s.post_entry(agent, account, rec.thing.account, rec.book_value, date, memo=f"produce {out}")
                value += rec.book_value
                del s.owners[pid]
            contracts.register_product(s, agent, contracts.Product(out, self.opt("description", ""), account),
                                       value)

    def do_consume(self, date):
        s, agent, pid = self.system, self.arg(0), self.arg(1)
        rec = contracts.product_record(s, pid)
        if s.owners.get(pid) != agent:
            raise contracts.NotOwner(f"{agent} does not own {pid}")
        with s.atomic():
            if rec.book_value:
                s.post_entry(agent, chart.expense(s, agent, "Consumption"), rec.thing.account, rec.book_value, date,
                             memo=f"consume {pid}")
            del s.owners[pid]

    def do_invalidate(self, date):
        contracts.invalidate_obligation(self.system, self.arg(0), date, label=self.label)

    def do_restitute(self, date):
        contracts.settle_restitution(self.system, self.arg(0), self.arg(1), date, label=self.label)

    # bills

    def do_draw(self, date):
        boe.draw(self.system, self.arg(1), self.arg(2), self.arg(3), self.int_arg(4),
                 dt.date.fromisoformat(self.arg(5)), date, endorsable=self.bool_opt("endorsable", True),
                 underlying=self.opt("underlying"), bid=self.arg(0))

    def do_sola(self, date):
        boe.create_sola(self.system, self.arg(1), self.arg(2), self.int_arg(3), dt.date.fromisoformat(self.arg(4)),
                        date, endorsable=self.bool_opt("endorsable", True), underlying=self.opt("underlying"),
                        bid=self.arg(0), label=self.label)

    def do_accept(self, date):
        boe.accept(self.system, self.arg(0), date, label=self.label)

    def do_discount(self, date):
        boe.discount(self.system, self.arg(0), self.arg(1), parse_rational(self.arg(2)), date, label=self.label)

    def do_endorse(self, date):
        price = self.opt("price")
        boe.endorse(self.system, self.arg(0), self.arg(1), date, price=int(price) if price is not None else None,
                    label=self.label)

    def do_transfer(self, date):
        b = boe.bill(self.system, self.arg(0))
        boe.transfer_interbank(self.system, b.id, b.holder, self.arg(1), date, label=self.label)

    def do_present(self, date):
        boe.present(self.system, self.arg(0), date)

    def do_settle(self, date):
        boe.settle(self.system, self.arg(0), date, label=self.label)

    def do_protest(self, date):
        boe.protest(self.system, self.arg(0), date)

    def do_recourse(self, date):
        payer = self.arg(1) if len(self.ev.args) > 1 else None
        boe.resolve_recourse(self.system, self.arg(0), payer, date, label=self.label)

    def do_archive(self, date):
        boe.archive(self.system, self.arg(0), date)

    # clearing

    def do_clear(self, date):
        clearing.clear(self.system, self.arg(0), self.arg(1), date, settle=self.bool_opt("settle", True),
                       label=self.label)

    def do_settle_cash(self, date):
        clearing.settle_in_cash(self.system, self.arg(0), self.arg(1), self.int_arg(2), date, label=self.label)

    # investment

    def do_invest(self, date):
        sid, investor, producer = self.arg(0), self.arg(1), self.arg(2)
        principal, rate = self.int_arg(3), parse_rational(self.arg(4))
        n, period = self.int_arg(5), self.arg(6)
        sched = schedule.build_schedule(principal, rate, n, period, date, investor, producer)
        c, _ = contracts.grant_loan(self.system, investor, producer, principal, date,
                                    repayment=sched.total_expected, maturity=sched.expected[-1][0],
                                    label=self.label, medium=self.opt("medium"), cid=sid)
        c.rate = rate
        sched.contract = c.id
        self.schedules[sid] = sched

    def do_actual(self, date):
        sched = self._schedule(self.arg(0))
        amount = self.int_arg(1)
        with self.system.atomic():
            schedule.record_actual(sched, date, amount)
            try:
                contracts.repay_loan(self.system, sched.contract, amount, date, label=self.label,
                                     medium=self.opt("medium"))
            except MomaError:
                sched.actual.pop()
                raise

    def _schedule(self, sid: str) -> schedule.RepaymentSchedule:
        if sid not in self.schedules:
            raise self._bad(f"unknown schedule {sid!r}", 0)
        return self.schedules[sid]

    def _pairs(self, name: str) -> list[tuple[str, int]]:
        text = self.opt(name, "")
        out = []
        for item in filter(None, text.split(",")):
            agent, _, amount = item.partition(":")
            if not amount:
                raise self._bad(f"{name} entries read AGENT:AMOUNT, got {item!r}")
            out.append((agent, int(amount)))
        return out

    def do_match(self, date):
        liquidity.liquidity_match(self.system, self._pairs("shortfall"), self._pairs("surplus"),
                                  parse_rational(self.arg(0)), date, maturity=self.date_opt("maturity"))

    # hand-written bookings

    def do_book(self, date):
        args = self.ev.args
        if len(args) not in (4, 8):
            raise self._bad("book takes AGENT DEBIT CREDIT AMOUNT, once or twice")
        legs = []
        for k in range(0, len(args), 4):
            legs.append(Leg(args[k], [Line(args[k + 1], args[k + 2], self.int_arg(k + 3), "manual")]))
        self.system.post_macro_booking(BookingKind(self.opt("kind", "Other")), date, legs,
                                       label=self.label or "manual")

    # assertions

    def _fail(self, what: str, got, want):
        raise ScenarioAssertion(f"expected {what} = {want}, got {got}")

    def do_expect(self, date):
        s = self.system
        what = self.arg(0)
        self.assertions += 1
        if what == "balance":
            got, want = s.balance(self.arg(1), self.arg(2)), self.int_arg(3)
        elif what == "cash":
            got, want = chart.cash_balance(s, self.arg(1)), self.int_arg(2)
        elif what == "deposit":
            got, want = chart.deposit_balance(s, self.arg(1), self.arg(2)), self.int_arg(3)
        elif what == "sheet":
            got = s.balance_sheet(self.arg(1)).as_tuple()
            want = (self.int_arg(2), self.int_arg(3), self.int_arg(4))
        elif what == "sheets_zero":
            got = {a: s.balance_sheet(a).as_tuple() for a in s.agents if s.balance_sheet(a).as_tuple() != (0, 0, 0)}
            want = {}
        elif what == "register":
            got = (s.register.total_issued, s.register.total_destroyed)
            want = (self.int_arg(1), self.int_arg(2))
        elif what == "money_conserved":
            got, want = s.cash_census(), s.register.outstanding
        elif what == "state":
            got, want = boe.bill(s, self.arg(1)).state.value, self.arg(2)
        elif what == "archived":
            got, want = boe.bill(s, self.arg(1)).archived, True
        elif what == "holder":
            got, want = boe.bill(s, self.arg(1)).holder, self.arg(2)
        elif what == "status":
            got, want = contracts.contract(s, self.arg(1)).status.value, self.arg(2)
        elif what == "bookings":
            got, want = sum(1 for b in s.bookings if b.phase == "event"), self.int_arg(1)
        elif what == "invariances":
            d, p = s.debt_invariance(), s.payment_invariance()
            got, want = (d.holds, p.holds), (True, True)
        elif what == "owner":
            got, want = s.owners.get(self.arg(1)), self.arg(2)
        elif what == "gold":
            got, want = s.gold[self.arg(1)], self.int_arg(2)
        elif what == "deviation":
            got, want = schedule.deviation(self._schedule(self.arg(1)), date), self.int_arg(2)
        elif what == "claims":
            cat = self.arg(1)
            got = sum(signed for lg in s.ledgers.values() for n, signed in lg.balances.items()
                      if lg.accounts[n].category == cat and lg.accounts[n].claim_flag
                      and lg.accounts[n].kind is AccountKind.ASSET)
            want = self.int_arg(2)
        elif what == "receivables":
            got, want = s.debt_invariance().total_receivables, self.int_arg(1)
        elif what == "open_lifecycles":
            got, want = sum(1 for x in debt_lifecycles(s) if x.settled is None), self.int_arg(1)
        else:
            raise self._bad(f"unknown expectation {what!r}", 0)
        if got != want:
            self._fail(" ".join(self.ev.args[:-1] if what not in ("sheets_zero", "invariances", "money_conserved",
                                                                  "archived") else self.ev.args), got, want)


def run(scenario: Scenario, check_every_step: bool = True, regime: str | None = None) -> RunReport:
    return Runner(scenario, check_every_step, regime).run()

