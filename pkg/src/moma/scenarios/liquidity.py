"""Pro-rata matching of liquidity shortfalls with surpluses."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from ..contracts import grant_loan
from ..macro import MacroBooking


@dataclass
class MatchResult:
    allocations: list[tuple[str, str, int]]  # (lender, borrower, amount)
    bookings: list[MacroBooking] = field(default_factory=list)
    unmatched_shortfall: int = 0
    unmatched_surplus: int = 0


def largest_remainder(total: int, weights: list[int]) -> list[int]:
    """Split ``total`` proportionally to ``weights`` in integers (ties by position)."""
    w = sum(weights)
    if w == 0:
        return [0] * len(weights)
    exact = [Fraction(total * x, w) for x in weights]
    out = [int(e) for e in exact]
    order = sorted(range(len(weights)), key=lambda i: (-(exact[i] - out[i]), i))
    for i in order[: total - sum(out)]:
        out[i] += 1
    return out


def allocate(shortfalls: list[tuple[str, int]], surpluses: list[tuple[str, int]]) -> list[tuple[str, str, int]]:
    """Integer transfer table whose cells round the proportional ideal.

    Row and column totals are largest-remainder roundings of the matched
    amount; the cells are then rounded up or down so that they add up to
    those totals (a min-cost flow picks which cells round up).
    """
    s_tot = sum(a for _, a in shortfalls)
    u_tot = sum(a for _, a in surpluses)
    total = min(s_tot, u_tot)
    if total == 0:
        return []
    rows = largest_remainder(total, [a for _, a in shortfalls])
    cols = largest_remainder(total, [a for _, a in surpluses])
    denom = s_tot * u_tot
    floor = {}
    g = nx.DiGraph()
    for i, (_, s) in enumerate(shortfalls):
        for j, (_, u) in enumerate(surpluses):
            num = total * s * u
            floor[i, j] = num // denom
            if num % denom:
                g.add_edge(("r", i), ("c", j), capacity=1, weight=-(num % denom))
    for i in range(len(shortfalls)):
        g.add_node(("r", i), demand=-(rows[i] - sum(floor[i, j] for j in range(len(surpluses)))))
    for j in range(len(surpluses)):
        g.add_node(("c", j), demand=cols[j] - sum(floor[i, j] for i in range(len(shortfalls))))
    flow = nx.min_cost_flow(g)
    out = []
    for j, (lender, _) in enumerate(surpluses):
        for i, (borrower, _) in enumerate(shortfalls):
            amount = floor[i, j] + flow.get(("r", i), {}).get(("c", j), 0)
            if amount:
                out.append((lender, borrower, amount))
    return out


def liquidity_match(system, shortfalls: list[tuple[str, int]], surpluses: list[tuple[str, int]],
                    rate: Fraction, date: dt.date, maturity: dt.date | None = None) -> MatchResult:
    """Fund shortfalls from surpluses with loans at ``rate`` for the term."""
    shortfalls = [(a, x) for a, x in shortfalls if x > 0]
    surpluses = [(a, x) for a, x in surpluses if x > 0]
    table = allocate(shortfalls, surpluses)
    matched = sum(a for *_, a in table)
    result = MatchResult(table, [], sum(a for _, a in shortfalls) - matched, sum(a for _, a in surpluses) - matched)
    with system.atomic():
        for lender, borrower, amount in table:
            # ``rate`` is the rate for the whole term
            _, booking = grant_loan(system, lender, borrower, amount, date, rate=rate)
            if maturity is not None:
                system.contracts[booking.contract_ref].maturity = maturity
            result.bookings.append(booking)
    return result
