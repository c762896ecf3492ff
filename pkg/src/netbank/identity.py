"""Customers, credentials and sessions.

Security rules implemented here:
  - passwords are stored only as salted, iterated one-way digests
    (PBKDF2-HMAC-SHA256, per-credential random salt >= 16 bytes);
  - a configurable number of consecutive failed log-ons locks the
    credential until an administrator re-initializes it;
  - sessions expire after an idle timeout and callers are warned inside
    the final 30 seconds;
  - passwords older than the configured maximum age force a change at
    the next log-on.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field

from .errors import BankError

# Permitted special characters, exactly this set.
SPECIAL_CHARACTERS = "!@#%&^&*()_+=[{}|\\:;'\",<.>/?"

DEFAULT_KDF_ITERATIONS = 50_000
SALT_BYTES = 16
TOKEN_BYTES = 16  # 128-bit session tokens
WARNING_WINDOW_S = 30  # fixed warning window before timeout


@dataclass
class PasswordPolicy:
    min_length: int = 8
    special_chars: str = SPECIAL_CHARACTERS
    require_special: bool = True
    max_age_days: int | None = 90
    max_failed_attempts: int = 3

    def __post_init__(self):
        if self.max_failed_attempts < 1:
            raise ValueError("max_failed_attempts must be >= 1")


def validate_password(policy: PasswordPolicy, candidate: str) -> list[str]:
    """Pure policy check: same (policy, candidate) always gives the same verdict."""
    violations = []
    if len(candidate) < policy.min_length:
        violations.append("min_length")
    if policy.require_special and not any(c in policy.special_chars for c in candidate):
        violations.append("require_special")
    return violations


def digest_password(password: str, salt: bytes, iterations: int) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)


@dataclass
class Customer:
    customer_id: str
    full_name: str
    ic_passport_no: str
    email: str = ""
    postal_address: str = ""
    phone: str = ""
    secure_delivery_contact: str = ""
    atm_enabled: bool = True
    status: str = "active"  # active | cancelled
    created_ms: int = 0

    PROFILE_FIELDS = ("email", "postal_address", "phone", "secure_delivery_contact")

    def to_dict(self) -> dict:
        return {
            "customer_id": self.customer_id,
            "full_name": self.full_name,
            "ic_passport_no": self.ic_passport_no,
            "email": self.email,
            "postal_address": self.postal_address,
            "phone": self.phone,
            "secure_delivery_contact": self.secure_delivery_contact,
            "atm_enabled": self.atm_enabled,
            "status": self.status,
            "created_ms": self.created_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Customer":
        return cls(**d)

    def view(self) -> dict:
        # ic_passport_no is an authentication factor for password changes;
        # keep it out of API responses
        body = self.to_dict()
        body.pop("ic_passport_no")
        return body


@dataclass
class Credential:
    """Log-on material. The plaintext password never appears here or in logs."""

    username: str
    salt_hex: str
    digest_hex: str
    kdf_iterations: int
    password_set_ms: int
    customer_id: str | None = None  # None for pure admin credentials
    failed_attempts: int = 0
    locked: bool = False
    must_change: bool = False
    is_admin: bool = False

    def verify(self, password: str) -> bool:
        digest = digest_password(password, bytes.fromhex(self.salt_hex), self.kdf_iterations)
        return secrets.compare_digest(digest.hex(), self.digest_hex)

    def to_dict(self) -> dict:
        return {
            "username": self.username,
            "salt_hex": self.salt_hex,
            "digest_hex": self.digest_hex,
            "kdf_iterations": self.kdf_iterations,
            "password_set_ms": self.password_set_ms,
            "customer_id": self.customer_id,
            "failed_attempts": self.failed_attempts,
            "locked": self.locked,
            "must_change": self.must_change,
            "is_admin": self.is_admin,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Credential":
        return cls(**d)


def make_credential_material(password: str, iterations: int) -> tuple[str, str]:
    """Fresh (salt_hex, digest_hex) for a new password."""
    salt = secrets.token_bytes(SALT_BYTES)
    return salt.hex(), digest_password(password, salt, iterations).hex()


@dataclass
class Session:
    token: str
    username: str
    customer_id: str | None
    created_ms: int
    last_activity_ms: int
    idle_timeout_s: int
    warning_window_s: int = WARNING_WINDOW_S


class SessionStore:
    """Ephemeral bearer sessions. Never journaled: a restart logs everyone out.

    Expiry is lazy (checked on access) plus an optional sweep(). A dead
    token (logged out or expired) stays permanently unusable.
    """

    def __init__(self, idle_timeout_s: int = 300):
        self.idle_timeout_s = idle_timeout_s
        self._live: dict[str, Session] = {}
        self._dead: set[str] = set()

    def create(self, username: str, customer_id: str | None, now_ms: int) -> Session:
        token = secrets.token_hex(TOKEN_BYTES)
        while token in self._live or token in self._dead:
            token = secrets.token_hex(TOKEN_BYTES)
        session = Session(
            token=token,
            username=username,
            customer_id=customer_id,
            created_ms=now_ms,
            last_activity_ms=now_ms,
            idle_timeout_s=self.idle_timeout_s,
        )
        self._live[token] = session
        return session

    def resolve(self, token: str, now_ms: int) -> Session:
        """Look a token up without refreshing its activity clock."""
        if token in self._dead:
            raise BankError("SESSION_EXPIRED")
        session = self._live.get(token)
        if session is None:
            raise BankError("UNAUTHENTICATED")
        if now_ms - session.last_activity_ms > session.idle_timeout_s * 1000:
            self.drop(token)
            raise BankError("SESSION_EXPIRED")
        return session

    def touch(self, token: str, now_ms: int) -> Session:
        """Resolve and mark activity: every authenticated call counts."""
        session = self.resolve(token, now_ms)
        session.last_activity_ms = now_ms
        return session

    def remaining_s(self, session: Session, now_ms: int) -> int:
        remaining_ms = session.idle_timeout_s * 1000 - (now_ms - session.last_activity_ms)
        return remaining_ms // 1000

    def meta(self, session: Session, now_ms: int) -> dict:
        remaining = self.remaining_s(session, now_ms)
        return {"remaining_s": remaining, "warn": 0 < remaining <= session.warning_window_s}

    def drop(self, token: str) -> None:
        self._live.pop(token, None)
        self._dead.add(token)

    def drop_for_customer(self, customer_id: str) -> None:
        for token in [t for t, s in self._live.items() if s.customer_id == customer_id]:
            self.drop(token)

    def sweep(self, now_ms: int) -> int:
        expired = [
            t for t, s in self._live.items()
            if now_ms - s.last_activity_ms > s.idle_timeout_s * 1000
        ]
        for token in expired:
            self.drop(token)
        return len(expired)

    def live_count(self) -> int:
        return len(self._live)


class IdentityCore:
    """Durable customer and credential state."""

    def __init__(self):
        self.customers: dict[str, Customer] = {}
        self.credentials: dict[str, Credential] = {}
        self.next_customer_seq = 1

    def get_customer(self, customer_id: str) -> Customer:
        customer = self.customers.get(customer_id)
        if customer is None:
            raise BankError("UNKNOWN_CUSTOMER", f"no such customer: {customer_id}")
        return customer

    def get_credential(self, username: str) -> Credential:
        cred = self.credentials.get(username)
        if cred is None:
            raise BankError("UNKNOWN_USER", f"no such user: {username}")
        return cred

    def peek_customer_id(self) -> str:
        return f"C{self.next_customer_seq:05d}"

    # ---------- event application ----------

    def apply_customer(self, customer: dict, credential: dict) -> None:
        cust = Customer.from_dict(customer)
        self.customers[cust.customer_id] = cust
        cred = Credential.from_dict(credential)
        self.credentials[cred.username] = cred
        seq_part = cust.customer_id[1:]
        if seq_part.isdigit():
            self.next_customer_seq = max(self.next_customer_seq, int(seq_part) + 1)

    def apply_admin(self, credential: dict) -> None:
        cred = Credential.from_dict(credential)
        self.credentials[cred.username] = cred

    def apply_customer_cancelled(self, customer_id: str) -> None:
        self.customers[customer_id].status = "cancelled"

    def apply_login_failed(self, username: str, failed_attempts: int, locked: bool) -> None:
        cred = self.credentials[username]
        cred.failed_attempts = failed_attempts
        cred.locked = locked

    def apply_login_succeeded(self, username: str) -> None:
        self.credentials[username].failed_attempts = 0

    def apply_password_changed(self, username: str, salt_hex: str, digest_hex: str,
                               kdf_iterations: int, set_ms: int) -> None:
        cred = self.credentials[username]
        cred.salt_hex = salt_hex
        cred.digest_hex = digest_hex
        cred.kdf_iterations = kdf_iterations
        cred.password_set_ms = set_ms
        cred.must_change = False

    def apply_profile_updated(self, customer_id: str, fields: dict) -> None:
        customer = self.customers[customer_id]
        for key, value in fields.items():
            setattr(customer, key, value)

    def apply_atm_cancelled(self, customer_id: str) -> None:
        self.customers[customer_id].atm_enabled = False

    def apply_reinitialized(self, username: str) -> None:
        cred = self.credentials[username]
        cred.locked = False
        cred.failed_attempts = 0

    # ---------- persistence ----------

    def to_state_dict(self) -> dict:
        return {
            "customers": [c.to_dict() for c in sorted(self.customers.values(), key=lambda c: c.customer_id)],
            "credentials": [c.to_dict() for c in sorted(self.credentials.values(), key=lambda c: c.username)],
            "next_customer_seq": self.next_customer_seq,
        }

    def load_state_dict(self, state: dict) -> None:
        self.__init__()
        for c in state["customers"]:
            self.customers[c["customer_id"]] = Customer.from_dict(c)
        for c in state["credentials"]:
            self.credentials[c["username"]] = Credential.from_dict(c)
        self.next_customer_seq = state["next_customer_seq"]
