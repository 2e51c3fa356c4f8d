"""Exact price, interest and markup arithmetic.  All functions are pure."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Context, Decimal
from fractions import Fraction

from .errors import MarkupNotAboveOne, NonPositiveAmount, ZeroDenominator, ZeroPayout
from .money import round_half_away


def interest_rate(payout: int, repayment: int) -> Fraction:
    """Rate implied by paying out ``payout`` and getting ``repayment`` back."""
    if payout == 0:
        raise ZeroPayout("payout must be non-zero")
    if payout < 0:
        raise NonPositiveAmount("payout must be positive")
    return Fraction(repayment, payout) - 1


def relative_price(pa: Fraction | int, pb: Fraction | int) -> Fraction:
    """Units of B exchanged for one unit of A, given money prices of both."""
    if pb == 0:
        raise ZeroDenominator("price of the reference good is zero")
    return Fraction(pa) / Fraction(pb)


def markup(cost: Fraction | int, factor: Fraction | int) -> tuple[Fraction, Fraction]:
    """Exact (price, profit) for a unit cost and a markup factor above one."""
    factor, cost = Fraction(factor), Fraction(cost)
    if factor <= 1:
        raise MarkupNotAboveOne(f"markup must exceed 1, got {factor}")
    if cost < 0:
        raise NonPositiveAmount("cost must not be negative")
    price = factor * cost
    return price, price - cost


def markup_profit(cost: Fraction | int, factor: Fraction | int) -> tuple[int, int]:
    """(price, profit) in minor units; profit is price minus the rounded cost."""
    price, _ = markup(cost, factor)
    price = round_half_away(price)
    return price, price - round_half_away(Fraction(cost))


def significant(x: Fraction, digits: int = 3) -> str:
    """Decimal display of a rational to ``digits`` significant digits."""
    if x == 0:
        return "0"
    ctx = Context(prec=digits, rounding=ROUND_HALF_UP)
    value = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(value, "f")


def percent(x: Fraction, decimals: int = 1) -> str:
    """``Fraction(1, 10)`` -> ``"10.0%"``."""
    scaled = round_half_away(x * 100 * 10**decimals)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**decimals)
    return f"{sign}{whole}.{frac:0{decimals}d}%" if decimals else f"{sign}{whole}%"
