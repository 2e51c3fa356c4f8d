"""Macro-accounting engine: per-agent ledgers joined by two-sided bookings."""

from .errors import MomaError
from .ledger import Account, AccountKind, BalanceSheet, JournalEntry, Ledger
from .macro import Agent, BookingKind, Leg, Line, MacroBooking, Regime, Role, System
from .money import Money

__all__ = [
    "Account",
    "AccountKind",
    "Agent",
    "BalanceSheet",
    "BookingKind",
    "JournalEntry",
    "Ledger",
    "Leg",
    "Line",
    "MacroBooking",
    "MomaError",
    "Money",
    "Regime",
    "Role",
    "System",
]

__version__ = "0.1.0"
