import pytest

from netbank import Bank, ManualClock, PasswordPolicy
from netbank.clock import ms_to_date

# fast KDF for tests; production default stays deliberately slow
TEST_KDF_ITERATIONS = 1200

ADMIN_USER, ADMIN_PASSWORD = "admin", "Adm1n!Secure"
ALICE_PASSWORD = "Al1ce!pass"
BOB_PASSWORD = "B0b!secure99"
ALICE_IC = "900101-14-5678"
BOB_IC = "880202-10-1234"


def make_bank(clock=None, **kwargs) -> Bank:
    kwargs.setdefault("kdf_iterations", TEST_KDF_ITERATIONS)
    kwargs.setdefault("policy", PasswordPolicy())
    return Bank(clock or ManualClock(), **kwargs)


def seed_two_customers(bank: Bank) -> dict:
    """admin + alice (current/saving/card) + bob (current/saving), logged in."""
    bank.ensure_admin(ADMIN_USER, ADMIN_PASSWORD)
    admin = bank.login(ADMIN_USER, ADMIN_PASSWORD)
    bank.admin_add_customer(
        admin["token"],
        {"full_name": "Alice Tan", "ic_passport_no": ALICE_IC, "email": "alice@example.com"},
        "alice", ALICE_PASSWORD,
        [
            {"kind": "current", "opening_minor": 250_000, "account_id": "ALI-CUR"},
            {"kind": "saving", "opening_minor": 1_000_000, "account_id": "ALI-SAV"},
            {"kind": "credit_card", "credit_limit_minor": 500_000, "account_id": "ALI-CARD",
             "owed_minor": 40_000},
        ],
        must_change=False,
    )
    bank.admin_add_customer(
        admin["token"],
        {"full_name": "Bob Lim", "ic_passport_no": BOB_IC, "email": "bob@example.com"},
        "bob", BOB_PASSWORD,
        [
            {"kind": "current", "opening_minor": 100_000, "account_id": "BOB-CUR"},
            {"kind": "saving", "opening_minor": 50_000, "account_id": "BOB-SAV"},
        ],
        must_change=False,
    )
    alice = bank.login("alice", ALICE_PASSWORD)
    bob = bank.login("bob", BOB_PASSWORD)
    return {
        "admin": admin["token"],
        "alice": alice["token"],
        "bob": bob["token"],
        "alice_customer_id": alice["customer_id"],
        "bob_customer_id": bob["customer_id"],
    }


@pytest.fixture
def clock() -> ManualClock:
    return ManualClock()


@pytest.fixture
def bank(clock) -> Bank:
    return make_bank(clock)


@pytest.fixture
def seeded(bank):
    tokens = seed_two_customers(bank)
    return bank, tokens


def today(bank: Bank) -> str:
    return ms_to_date(bank.clock.now_ms())
