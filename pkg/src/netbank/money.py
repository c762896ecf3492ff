"""Exact money arithmetic.

All amounts are integer counts of minor units (sen for MYR). Fractions of
a minor unit cannot be represented, so rounding bugs cannot exist. Mixing
currencies in arithmetic raises CURRENCY_MISMATCH.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BankError

MYR = "MYR"


@dataclass(frozen=True)
class Money:
    """An exact amount of a single currency in minor units."""

    amount_minor: int
    currency: str = MYR

    def __post_init__(self):
        if not isinstance(self.amount_minor, int) or isinstance(self.amount_minor, bool):
            raise TypeError(f"amount_minor must be int, got {type(self.amount_minor).__name__}")
        if not isinstance(self.currency, str) or len(self.currency) != 3 or not self.currency.isalpha():
            raise ValueError(f"currency must be a 3-letter code, got {self.currency!r}")

    def _same(self, other: "Money") -> None:
        if not isinstance(other, Money):
            raise TypeError(f"expected Money, got {type(other).__name__}")
        if other.currency != self.currency:
            raise BankError(
                "CURRENCY_MISMATCH",
                f"cannot combine {self.currency} with {other.currency}",
            )

    def __add__(self, other: "Money") -> "Money":
        self._same(other)
        return Money(self.amount_minor + other.amount_minor, self.currency)

    def __sub__(self, other: "Money") -> "Money":
        self._same(other)
        return Money(self.amount_minor - other.amount_minor, self.currency)

    def __neg__(self) -> "Money":
        return Money(-self.amount_minor, self.currency)

    def __lt__(self, other: "Money") -> bool:
        self._same(other)
        return self.amount_minor < other.amount_minor

    def __le__(self, other: "Money") -> bool:
        self._same(other)
        return self.amount_minor <= other.amount_minor

    @property
    def is_zero(self) -> bool:
        return self.amount_minor == 0

    @property
    def is_positive(self) -> bool:
        return self.amount_minor > 0

    def to_dict(self) -> dict:
        return {"amount_minor": self.amount_minor, "currency": self.currency}

    @classmethod
    def from_dict(cls, data: dict) -> "Money":
        return cls(int(data["amount_minor"]), str(data.get("currency", MYR)))

    @classmethod
    def from_major(cls, text: str, currency: str = MYR) -> "Money":
        """Parse a decimal major-unit string ("125.50") into minor units.

        Used by fixtures and demos; wire payloads always carry minor units.
        """
        text = text.strip()
        sign = -1 if text.startswith("-") else 1
        text = text.lstrip("+-")
        if "." in text:
            whole, frac = text.split(".", 1)
            if len(frac) > 2 or not frac.isdigit():
                raise ValueError(f"not a valid amount: {text!r}")
            frac = frac.ljust(2, "0")
        else:
            whole, frac = text, "00"
        if not whole.isdigit():
            raise ValueError(f"not a valid amount: {text!r}")
        return cls(sign * (int(whole) * 100 + int(frac)), currency)

    def __str__(self) -> str:
        sign = "-" if self.amount_minor < 0 else ""
        units, cents = divmod(abs(self.amount_minor), 100)
        return f"{self.currency} {sign}{units}.{cents:02d}"
