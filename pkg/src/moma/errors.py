"""Exception hierarchy.

Every domain failure derives from :class:`MomaError`.  The CLI maps these to
exit code 2; parse and IO problems (:class:`ScenarioParseError`,
:class:`UnknownScenario`, :class:`UnknownView`) map to exit code 1.
"""

from __future__ import annotations


class MomaError(Exception):
    """Base class for all engine errors."""


class UsageError(MomaError):
    """Bad input to the front end: parse, IO, unknown names."""


# ledger-core
class DuplicateAccount(MomaError):
    pass


class UnknownAccount(MomaError):
    pass


class UnknownAgent(MomaError):
    pass


class CrossAgentEntry(MomaError):
    pass


class NonPositiveAmount(MomaError):
    pass


class CurrencyMismatch(MomaError):
    pass


class AbnormalBalance(MomaError):
    pass


class BackdatedBooking(MomaError):
    pass


# macro-ledger
class ArityViolation(MomaError):
    pass


class LegImbalance(MomaError):
    pass


class InvarianceViolation(MomaError):
    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NotABank(MomaError):
    pass


class InsufficientFunds(MomaError):
    pass


class InsufficientCentralBankDeposit(InsufficientFunds):
    pass


class NoOpenClaim(MomaError):
    pass


# contracts
class SelfContract(MomaError):
    pass


class IllTypedPromises(MomaError):
    pass


class NotOwner(MomaError):
    pass


class AlreadyExecuted(MomaError):
    pass


class AlreadyInvalidated(MomaError):
    pass


class AlreadySettled(MomaError):
    pass


class ContractInvalidated(MomaError):
    pass


class UnknownContract(MomaError):
    pass


class ZeroPayout(MomaError):
    pass


class ZeroDenominator(MomaError):
    pass


class MarkupNotAboveOne(MomaError):
    pass


# boe
class PastMaturity(MomaError):
    pass


class NonPositiveFace(MomaError):
    pass


class WrongState(MomaError):
    pass


class RateOutOfRange(MomaError):
    pass


class NotEndorsable(MomaError):
    pass


class NotHolder(MomaError):
    pass


class SelfTransfer(MomaError):
    pass


class TooEarly(MomaError):
    pass


class NotRecourseDebtor(MomaError):
    pass


class UnknownBill(MomaError):
    pass


# issuance
class NotCentralBank(MomaError):
    pass


class GoldRegime(MomaError):
    pass


class NotGoldRegime(MomaError):
    pass


class BelowCredibilityRating(MomaError):
    pass


class InsufficientDeposit(InsufficientFunds):
    pass


class InsufficientVaultCash(InsufficientFunds):
    pass


class InsufficientBankCash(InsufficientFunds):
    pass


# scenarios
class UnknownScenario(UsageError):
    pass


class ScenarioParseError(UsageError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NonPositivePrincipal(MomaError):
    pass


class OutOfHorizon(MomaError):
    pass


class ScenarioAssertion(MomaError):
    """An ``expect`` line in a scenario did not hold."""


class UnknownView(UsageError):
    pass
