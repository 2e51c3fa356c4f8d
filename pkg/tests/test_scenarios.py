import datetime as dt
from fractions import Fraction

import pytest
from conftest import D0

from moma import scenarios
from moma.errors import (
    GoldRegime,
    NonPositivePrincipal,
    OutOfHorizon,
    ScenarioAssertion,
    ScenarioParseError,
    UnknownScenario,
)
from moma.scenarios import lifecycle, liquidity, schedule


def parse_error(text):
    with pytest.raises(ScenarioParseError) as info:
        scenarios.run(scenarios.parse(text))
    return info.value


@pytest.mark.parametrize("text, line, column", [
    ("2024-01-01 agent CB CentralBank\nyesterday agent B Bank\n", 2, 1),
    ("2024-13-01 agent CB CentralBank\n", 1, 1),
    ("2024-01-01 Agent CB CentralBank\n", 1, 12),
    ("2024-01-01 agent CB CentralBank\n2024-01-01 teleport CB\n", 2, 12),
    ("2024-01-01 agent CB CentralBank\n2024-01-01 issue lots\n", 2, 18),
    ("2024-02-01 agent CB CentralBank\n2024-01-01 issue 5\n", 2, 1),
    ("2024-01-01 issue 5 label=a label=b\n", 1, 28),
    ("2024-01-01 issue label=a 5\n", 1, 26),
    ("2024-01-01\n", 1, 11),
])
def test_parse_errors_carry_line_and_column(text, line, column):
    err = parse_error(text)
    assert (err.line, err.column) == (line, column)
    assert f"line {line}, column {column}" in str(err)


def test_comments_and_blank_lines_are_ignored():
    sc = scenarios.parse("# heading\n\n2024-01-01 agent CB CentralBank  # the issuer\n   \n")
    assert [(e.line, e.command, e.args) for e in sc.events] == [(3, "agent", ("CB", "CentralBank"))]


def test_empty_scenario_has_trivial_invariances():
    rr = scenarios.run(scenarios.parse(""))
    assert rr.final["total_receivables"] == rr.final["total_liabilities"] == 0
    assert rr.final["total_expenditures"] == rr.final["total_revenues"] == 0
    assert rr.final["violations"] == []


def test_failed_expectation_reports_the_event():
    text = "2024-01-01 agent CB CentralBank\n2024-01-01 issue 500\n2024-01-02 expect cash CB 400\n"
    with pytest.raises(ScenarioAssertion, match=r"event 3 \(line 3, 2024-01-02 expect\).*= 400, got 500"):
        scenarios.run(scenarios.parse(text))


def test_unknown_builtin():
    with pytest.raises(UnknownScenario):
        scenarios.load("builtin:nope")


@pytest.mark.parametrize("name", scenarios.BUILTINS)
def test_builtin_runs_clean(name):
    rr = scenarios.run(scenarios.builtin(name))
    assert rr.assertions > 0
    assert rr.final["violations"] == []
    assert all(not rec["violations"] for rec in rr.trail)
    assert len(rr.trail) == len(rr.system.bookings)


@pytest.mark.parametrize("name", scenarios.BUILTINS)
def test_check_every_step_does_not_change_results(name):
    a = scenarios.run(scenarios.builtin(name), check_every_step=True)
    b = scenarios.run(scenarios.builtin(name), check_every_step=False)
    assert a.system.fingerprint() == b.system.fingerprint()
    assert a.final == b.final and b.trail == []


@pytest.mark.parametrize("name", scenarios.BUILTINS)
def test_open_lifecycles_account_for_every_receivable(name):
    sc = scenarios.builtin(name)
    for k in range(len(sc.events) + 1):
        prefix = scenarios.Scenario(sc.name, sc.source, sc.events[:k], sc.regime)
        rr = scenarios.run(prefix, check_every_step=False)
        open_total = sum(x.open_amount for x in rr.lifecycles if x.settled is None)
        assert open_total == rr.final["total_receivables"], (name, k)


def test_vortex_lifecycles_all_close_and_money_returns():
    rr = scenarios.run(scenarios.builtin("vortex"))
    assert rr.lifecycles and all(x.settled is not None for x in rr.lifecycles)
    s = rr.system
    assert (s.register.total_issued, s.register.total_destroyed) == (100_000_00, 100_000_00)
    assert s.cash_census() == 0
    g = lifecycle.vortex_graph(rr.lifecycles)
    assert lifecycle.components(g) == 1


def test_lifecycle_dict_round_trip():
    rr = scenarios.run(scenarios.builtin("boe_purchase"))
    for x in rr.lifecycles:
        assert lifecycle.DebtLifecycle.from_dict(x.as_dict()) == x


def test_regime_override_to_gold_rejects_fiat_issue():
    with pytest.raises(GoldRegime, match=r"line 12, 2001-01-01 issue"):
        scenarios.run(scenarios.builtin("vortex"), regime="gold")


# repayment schedules

def test_single_period_schedule():
    s = schedule.build_schedule(100_000_00, Fraction(1, 10), 1, start=D0)
    assert s.expected == [(dt.date(2025, 1, 1), 110_000_00)]


def test_three_installments_put_the_remainder_last():
    s = schedule.build_schedule(100_000_00, Fraction(1, 10), 3, start=D0)
    assert [a for _, a in s.expected] == [36_666_66, 36_666_66, 36_666_68]
    assert s.total_expected == 110_000_00
    assert [d for d, _ in s.expected] == [dt.date(2025, 1, 1), dt.date(2026, 1, 1), dt.date(2027, 1, 1)]


def test_deviation_tracks_shortfall():
    s = schedule.build_schedule(100_000_00, Fraction(1, 10), 3, start=D0)
    assert schedule.deviation(s, D0) == 0
    assert schedule.deviation(s, dt.date(2025, 1, 1)) == 36_666_66
    schedule.record_actual(s, dt.date(2025, 1, 1), 30_000_00)
    assert schedule.deviation(s, dt.date(2025, 1, 1)) == 6_666_66
    schedule.record_actual(s, dt.date(2025, 6, 1), 6_666_66)
    assert schedule.deviation(s, dt.date(2025, 6, 1)) == 0
    assert s.actual[0][2] is False and s.actual[1][2] is True


def test_schedule_guards():
    with pytest.raises(NonPositivePrincipal):
        schedule.build_schedule(0, Fraction(0), 1)
    s = schedule.build_schedule(100, Fraction(0), 1, start=D0)
    with pytest.raises(OutOfHorizon):
        schedule.deviation(s, dt.date(2023, 12, 31))
    with pytest.raises(OutOfHorizon):
        schedule.record_actual(s, dt.date(2025, 1, 2), 1)


def test_month_periods_clamp_to_month_end():
    assert schedule.add_period(dt.date(2024, 1, 31), "1m") == dt.date(2024, 2, 29)
    assert schedule.add_period(dt.date(2024, 2, 29), "1y") == dt.date(2025, 2, 28)
    assert schedule.add_period(D0, "30d", 2) == dt.date(2024, 3, 1)
    with pytest.raises(ValueError):
        schedule.add_period(D0, "fortnight")


# liquidity matching

def test_one_to_one_match():
    assert liquidity.allocate([("A", 100)], [("B", 100)]) == [("B", "A", 100)]


def test_two_lenders_share_pro_rata():
    assert liquidity.allocate([("A", 100)], [("B", 50), ("C", 150)]) == [("B", "A", 25), ("C", "A", 75)]
    assert liquidity.allocate([("A", 100)], [("B", 100), ("C", 100)]) == [("B", "A", 50), ("C", "A", 50)]


def test_no_surplus_leaves_the_shortfall_unmatched(fiat):
    r = liquidity.liquidity_match(fiat, [("Buyer", 100)], [], Fraction(0), D0)
    assert r.allocations == [] and r.unmatched_shortfall == 100 and r.bookings == []


def test_match_books_loans(fiat):
    from conftest import fund

    fund(fiat, "Seller", 200)
    r = liquidity.liquidity_match(fiat, [("Buyer", 100)], [("Seller", 200)], Fraction(2, 100), D0)
    assert r.allocations == [("Seller", "Buyer", 100)] and r.unmatched_surplus == 100
    assert len(r.bookings) == 1
    assert fiat.debt_invariance().holds


def test_largest_remainder_breaks_ties_by_position():
    assert liquidity.largest_remainder(10, [1, 1, 1]) == [4, 3, 3]
    assert liquidity.largest_remainder(0, [1, 2]) == [0, 0]
    assert liquidity.largest_remainder(5, [0, 0]) == [0, 0]
