"""Expected repayment schedules and their deviations."""

from __future__ import annotations

import calendar
import datetime as dt
import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import NonPositivePrincipal, OutOfHorizon
from ..money import round_half_away

_PERIOD = re.compile(r"^(\d+)([ymd])$")


def add_period(date: dt.date, period: str, times: int = 1) -> dt.date:
    """Shift a date by ``times`` periods such as ``1y``, ``6m`` or ``30d``.

    Month arithmetic clamps to the last day of the target month.
    """
    m = _PERIOD.match(period)
    if not m:
        raise ValueError(f"bad period {period!r}; use e.g. 1y, 6m, 30d")
    n, unit = int(m.group(1)) * times, m.group(2)
    if unit == "d":
        return date + dt.timedelta(days=n)
    months = n * 12 if unit == "y" else n
    y, mo = divmod(date.month - 1 + months, 12)
    year, month = date.year + y, mo + 1
    return dt.date(year, month, min(date.day, calendar.monthrange(year, month)[1]))


@dataclass
class RepaymentSchedule:
    investor: str
    producer: str
    payout: tuple[dt.date, int]
    expected: list[tuple[dt.date, int]]
    actual: list[tuple[dt.date, int, bool]] = field(default_factory=list)
    contract: str | None = None

    @property
    def total_expected(self) -> int:
        return sum(a for _, a in self.expected)

    def horizon(self) -> tuple[dt.date, dt.date]:
        return self.payout[0], self.expected[-1][0]

    def due_by(self, date: dt.date) -> int:
        return sum(a for d, a in self.expected if d <= date)

    def received_by(self, date: dt.date) -> int:
        return sum(a for d, a, _ in self.actual if d <= date)


def build_schedule(principal: int, rate: Fraction, n_periods: int, period: str = "1y",
                   start: dt.date = dt.date(2000, 1, 1), investor: str = "", producer: str = "") -> RepaymentSchedule:
    """Equal installments of principal·(1+rate)/n; leftover cents go to the last one."""
    if principal <= 0:
        raise NonPositivePrincipal(f"principal must be positive, got {principal}")
    if n_periods < 1:
        raise ValueError("a schedule needs at least one period")
    total = round_half_away(principal * (1 + Fraction(rate)))
    base = total // n_periods
    amounts = [base] * (n_periods - 1) + [total - base * (n_periods - 1)]
    expected = [(add_period(start, period, i + 1), a) for i, a in enumerate(amounts)]
    return RepaymentSchedule(investor, producer, (start, principal), expected)


def record_actual(schedule: RepaymentSchedule, date: dt.date, amount: int) -> None:
    first, last = schedule.horizon()
    if not first <= date <= last:
        raise OutOfHorizon(f"{date} is outside {first}..{last}")
    filled = schedule.received_by(date) + amount >= schedule.due_by(date)
    schedule.actual.append((date, amount, filled))


def deviation(schedule: RepaymentSchedule, date: dt.date) -> int:
    """Expected minus received up to ``date``; positive means a shortfall."""
    first, last = schedule.horizon()
    if not first <= date <= last:
        raise OutOfHorizon(f"{date} is outside {first}..{last}")
    return schedule.due_by(date) - schedule.received_by(date)
