import pytest
from hypothesis import given, strategies as st

from netbank import BankError, Money


class TestArithmetic:
    def test_add_sub(self):
        assert Money(500) + Money(250) == Money(750)
        assert Money(500) - Money(200) == Money(300)
        assert -Money(500) == Money(-500)

    def test_currency_mismatch_raises(self):
        with pytest.raises(BankError) as err:
            Money(100, "MYR") + Money(100, "USD")
        assert err.value.code == "CURRENCY_MISMATCH"

    def test_comparisons_same_currency_only(self):
        assert Money(100) < Money(200)
        with pytest.raises(BankError):
            Money(100, "MYR") <= Money(100, "SGD")

    def test_no_floats_allowed(self):
        with pytest.raises(TypeError):
            Money(10.5)  # type: ignore[arg-type]
        with pytest.raises(TypeError):
            Money(True)  # type: ignore[arg-type]

    @given(st.integers(-10**12, 10**12), st.integers(-10**12, 10**12))
    def test_exact_integer_arithmetic(self, a, b):
        assert (Money(a) + Money(b)).amount_minor == a + b
        assert (Money(a) - Money(b)).amount_minor == a - b


class TestParsingFormatting:
    def test_from_major(self):
        assert Money.from_major("125.50") == Money(12_550)
        assert Money.from_major("100") == Money(10_000)
        assert Money.from_major("-3.07") == Money(-307)

    def test_from_major_rejects_garbage(self):
        for bad in ("12.345", "abc", "1.2.3"):
            with pytest.raises(ValueError):
                Money.from_major(bad)

    def test_dict_round_trip(self):
        money = Money(12345, "MYR")
        assert Money.from_dict(money.to_dict()) == money

    def test_str(self):
        assert str(Money(12_550)) == "MYR 125.50"
        assert str(Money(-307)) == "MYR -3.07"

    def test_bad_currency(self):
        with pytest.raises(ValueError):
            Money(1, "MY")
        with pytest.raises(ValueError):
            Money(1, "M¥R")
