"""netbank: a double-entry internet banking core.

Exact integer money, an event-sourced journal with snapshot recovery,
session security (lockout, idle timeout), immediate and future-dated
payments, cheque services, a JSON HTTP API and a CLI.
"""

from .bank import Bank
from .clock import ManualClock, SystemClock
from .errors import BankError
from .identity import PasswordPolicy
from .money import Money
from .store import BankStore, recover

__all__ = [
    "Bank",
    "BankError",
    "BankStore",
    "ManualClock",
    "Money",
    "PasswordPolicy",
    "SystemClock",
    "recover",
]

__version__ = "0.1.0"
