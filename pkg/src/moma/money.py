"""Exact money amounts in integer minor units."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CurrencyMismatch

DEFAULT_CURRENCY = "EUR"


def round_half_away(x: Fraction | int) -> int:
    """Round a rational to the nearest integer, ties away from zero."""
    x = Fraction(x)
    if x >= 0:
        return int((x + Fraction(1, 2)) // 1)
    return -int((-x + Fraction(1, 2)) // 1)


def parse_rational(text: str) -> Fraction:
    """Parse ``"1/10"``, ``"0.05"`` or ``"5%"`` into an exact fraction."""
    text = text.strip()
    if text.endswith("%"):
        return Fraction(text[:-1]) / 100
    return Fraction(text)


@dataclass(frozen=True, order=True)
class Money:
    amount: int
    currency: str = DEFAULT_CURRENCY

    def __post_init__(self):
        if not isinstance(self.amount, int) or isinstance(self.amount, bool):
            raise TypeError(f"money amount must be an int, got {self.amount!r}")
        if len(self.currency) != 3 or not self.currency.isalpha():
            raise ValueError(f"bad currency code {self.currency!r}")

    def _check(self, other: Money) -> None:
        if not isinstance(other, Money):
            raise TypeError(f"expected Money, got {type(other).__name__}")
        if other.currency != self.currency:
            raise CurrencyMismatch(f"{self.currency} vs {other.currency}")

    def __add__(self, other: Money) -> Money:
        self._check(other)
        return Money(self.amount + other.amount, self.currency)

    def __sub__(self, other: Money) -> Money:
        self._check(other)
        return Money(self.amount - other.amount, self.currency)

    def __neg__(self) -> Money:
        return Money(-self.amount, self.currency)

    def scale(self, factor: Fraction | int) -> Money:
        """Multiply by an exact rational, rounding half away from zero."""
        return Money(round_half_away(Fraction(factor) * self.amount), self.currency)

    def __str__(self) -> str:
        return format_minor(self.amount, self.currency)


def format_minor(amount: int, currency: str = DEFAULT_CURRENCY) -> str:
    """``12345`` -> ``"123.45 EUR"``."""
    sign = "-" if amount < 0 else ""
    major, minor = divmod(abs(amount), 100)
    return f"{sign}{major}.{minor:02d} {currency}"
