"""Funds transfers, bill payments and the value-date scheduler.

Transfers require a single-use TAC bound to the issuing session. Targets
are either the customer's own accounts or entries from a beneficiary book
capped at 10 per customer. Immediate items post a ledger entry at
creation; future-dated items wait in pending status until the scheduler
processes their value date, in deterministic (effective_date, id) order.

Transfer and bill-payment ids are drawn from one shared monotonic
sequence so the scheduler's execution order is a total order.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

from .clock import clamp_window, ms_to_iso
from .errors import BankError

MAX_BENEFICIARIES = 10
TAC_DIGITS = 6

PENDING, EXECUTED, FAILED, CANCELLED = "pending", "executed", "failed", "cancelled"
TERMINAL_STATUSES = (EXECUTED, FAILED, CANCELLED)


@dataclass
class Beneficiary:
    beneficiary_id: int
    customer_id: str
    account_no: str
    nickname: str
    created_ms: int

    def to_dict(self) -> dict:
        return {
            "beneficiary_id": self.beneficiary_id,
            "customer_id": self.customer_id,
            "account_no": self.account_no,
            "nickname": self.nickname,
            "created_ms": self.created_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Beneficiary":
        return cls(**d)


@dataclass
class Tac:
    """Single-use transfer authorization code, bound to one session."""

    code: str
    session_token: str
    issued_ms: int
    ttl_s: int
    used: bool = False


class TacStore:
    """Ephemeral TAC issuance and verification (never journaled)."""

    def __init__(self, ttl_s: int = 300):
        self.ttl_s = ttl_s
        self._by_session: dict[str, dict[str, Tac]] = {}

    def issue(self, session_token: str, now_ms: int) -> Tac:
        codes = self._by_session.setdefault(session_token, {})
        code = f"{secrets.randbelow(10 ** TAC_DIGITS):0{TAC_DIGITS}d}"
        while code in codes:
            code = f"{secrets.randbelow(10 ** TAC_DIGITS):0{TAC_DIGITS}d}"
        tac = Tac(code=code, session_token=session_token, issued_ms=now_ms, ttl_s=self.ttl_s)
        codes[code] = tac
        return tac

    def consume(self, session_token: str, code: str, now_ms: int) -> None:
        tac = self._by_session.get(session_token, {}).get(code)
        if tac is None or tac.used or now_ms - tac.issued_ms > tac.ttl_s * 1000:
            raise BankError("INVALID_TAC", "TAC is unknown, used, expired or from another session")
        tac.used = True

    def drop_session(self, session_token: str) -> None:
        self._by_session.pop(session_token, None)


@dataclass
class TransferInstruction:
    transfer_id: int
    customer_id: str
    source_account: str
    target_kind: str  # own | beneficiary
    target_account: str  # own account id, or the beneficiary's external account number
    amount_minor: int
    currency: str
    effective_date: str
    status: str
    created_ms: int
    target_beneficiary_id: int | None = None
    notify_email: str | None = None
    executed_entry_id: int | None = None
    failure_reason: str | None = None
    resolved_ms: int | None = None

    def to_dict(self) -> dict:
        return {
            "transfer_id": self.transfer_id,
            "customer_id": self.customer_id,
            "source_account": self.source_account,
            "target_kind": self.target_kind,
            "target_account": self.target_account,
            "amount_minor": self.amount_minor,
            "currency": self.currency,
            "effective_date": self.effective_date,
            "status": self.status,
            "created_ms": self.created_ms,
            "target_beneficiary_id": self.target_beneficiary_id,
            "notify_email": self.notify_email,
            "executed_entry_id": self.executed_entry_id,
            "failure_reason": self.failure_reason,
            "resolved_ms": self.resolved_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TransferInstruction":
        return cls(**d)

    def view(self) -> dict:
        body = self.to_dict()
        body["amount"] = {"amount_minor": self.amount_minor, "currency": self.currency}
        body["created_at"] = ms_to_iso(self.created_ms)
        return body


@dataclass
class BillerRegistration:
    registration_id: int
    customer_id: str
    corporation: str
    bill_account_no: str
    holder_name: str
    status: str = "active"  # active | removed

    def to_dict(self) -> dict:
        return {
            "registration_id": self.registration_id,
            "customer_id": self.customer_id,
            "corporation": self.corporation,
            "bill_account_no": self.bill_account_no,
            "holder_name": self.holder_name,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BillerRegistration":
        return cls(**d)


@dataclass
class BillPayment:
    payment_id: int
    customer_id: str
    payer_account: str
    corporation: str
    bill_account_no: str
    holder_name: str
    amount_minor: int
    currency: str
    effective_date: str
    status: str
    created_ms: int
    bill_ref: str | None = None
    executed_entry_id: int | None = None
    failure_reason: str | None = None
    resolved_ms: int | None = None

    def to_dict(self) -> dict:
        return {
            "payment_id": self.payment_id,
            "customer_id": self.customer_id,
            "payer_account": self.payer_account,
            "corporation": self.corporation,
            "bill_account_no": self.bill_account_no,
            "holder_name": self.holder_name,
            "amount_minor": self.amount_minor,
            "currency": self.currency,
            "effective_date": self.effective_date,
            "status": self.status,
            "created_ms": self.created_ms,
            "bill_ref": self.bill_ref,
            "executed_entry_id": self.executed_entry_id,
            "failure_reason": self.failure_reason,
            "resolved_ms": self.resolved_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BillPayment":
        return cls(**d)

    def view(self) -> dict:
        body = self.to_dict()
        body["amount"] = {"amount_minor": self.amount_minor, "currency": self.currency}
        body["created_at"] = ms_to_iso(self.created_ms)
        return body


class PaymentsCore:
    """Durable payments state: beneficiary book, instructions, registrations."""

    def __init__(self):
        self.beneficiaries: dict[int, Beneficiary] = {}
        self.transfers: dict[int, TransferInstruction] = {}
        self.registrations: dict[int, BillerRegistration] = {}
        self.bill_payments: dict[int, BillPayment] = {}
        self.next_beneficiary_id = 1
        self.next_instruction_id = 1  # shared by transfers and bill payments
        self.next_registration_id = 1
        self.last_value_date: str | None = None

    # ---------- beneficiary book ----------

    def beneficiaries_of(self, customer_id: str) -> list[Beneficiary]:
        book = [b for b in self.beneficiaries.values() if b.customer_id == customer_id]
        book.sort(key=lambda b: (b.created_ms, b.beneficiary_id))
        return book

    def check_save_beneficiary(self, customer_id: str, account_no: str) -> None:
        book = self.beneficiaries_of(customer_id)
        if len(book) >= MAX_BENEFICIARIES:
            raise BankError("LIMIT_EXCEEDED", f"beneficiary book is full ({MAX_BENEFICIARIES})")
        if any(b.account_no == account_no for b in book):
            raise BankError("DUPLICATE_BENEFICIARY", f"account {account_no} already saved")

    def get_beneficiary(self, customer_id: str, beneficiary_id: int) -> Beneficiary:
        b = self.beneficiaries.get(beneficiary_id)
        if b is None or b.customer_id != customer_id:
            raise BankError("UNKNOWN_BENEFICIARY", f"no such beneficiary: {beneficiary_id}")
        return b

    # ---------- instructions ----------

    def get_transfer(self, customer_id: str, transfer_id: int) -> TransferInstruction:
        t = self.transfers.get(transfer_id)
        if t is None or t.customer_id != customer_id:
            raise BankError("UNKNOWN_TRANSFER", f"no such transfer: {transfer_id}")
        return t

    def get_payment(self, customer_id: str, payment_id: int) -> BillPayment:
        p = self.bill_payments.get(payment_id)
        if p is None or p.customer_id != customer_id:
            raise BankError("UNKNOWN_PAYMENT", f"no such payment: {payment_id}")
        return p

    def get_registration(self, customer_id: str, registration_id: int) -> BillerRegistration:
        r = self.registrations.get(registration_id)
        if r is None or r.customer_id != customer_id or r.status != "active":
            raise BankError("UNKNOWN_REGISTRATION", f"no active registration: {registration_id}")
        return r

    def pending_transfers_of(self, customer_id: str) -> list[TransferInstruction]:
        items = [t for t in self.transfers.values() if t.customer_id == customer_id and t.status == PENDING]
        items.sort(key=lambda t: (t.effective_date, t.transfer_id))
        return items

    def pending_payments_of(self, customer_id: str) -> list[BillPayment]:
        items = [p for p in self.bill_payments.values() if p.customer_id == customer_id and p.status == PENDING]
        items.sort(key=lambda p: (p.effective_date, p.payment_id))
        return items

    def due_items(self, business_date: str) -> list[tuple[str, int, object]]:
        """Pending items with effective_date <= business_date in execution order."""
        due: list[tuple[str, int, object]] = []
        for t in self.transfers.values():
            if t.status == PENDING and t.effective_date <= business_date:
                due.append(("transfer", t.transfer_id, t))
        for p in self.bill_payments.values():
            if p.status == PENDING and p.effective_date <= business_date:
                due.append(("payment", p.payment_id, p))
        due.sort(key=lambda item: (item[2].effective_date, item[1]))
        return due

    def history_of(self, customer_id: str, frm: str, to: str, now_ms: int, *, payments: bool) -> list[dict]:
        """Terminal instructions in the window, clamped to the retention horizon."""
        if frm > to:
            raise BankError("INVALID_RANGE", f"from {frm} is after to {to}")
        lo, hi = clamp_window(frm, to, now_ms)
        pool = self.bill_payments.values() if payments else self.transfers.values()
        out = []
        for item in pool:
            if item.customer_id != customer_id or item.status not in TERMINAL_STATUSES:
                continue
            stamp = item.resolved_ms if item.resolved_ms is not None else item.created_ms
            if lo <= stamp <= hi:
                out.append(item.view())
        out.sort(key=lambda v: (v["resolved_ms"] or 0, v.get("payment_id", v.get("transfer_id"))), reverse=True)
        return out

    def top_ten_payees(self) -> list[str]:
        counts: dict[str, int] = {}
        for p in self.bill_payments.values():
            if p.status == EXECUTED:
                counts[p.corporation] = counts.get(p.corporation, 0) + 1
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return [name for name, _ in ranked[:10]]

    # ---------- event application ----------

    def _bump_instruction_id(self, used_id: int) -> None:
        self.next_instruction_id = max(self.next_instruction_id, used_id + 1)

    def apply_beneficiary_saved(self, data: dict) -> None:
        b = Beneficiary.from_dict(data)
        self.beneficiaries[b.beneficiary_id] = b
        self.next_beneficiary_id = max(self.next_beneficiary_id, b.beneficiary_id + 1)

    def apply_beneficiary_updated(self, beneficiary_id: int, fields: dict) -> None:
        b = self.beneficiaries[beneficiary_id]
        for key, value in fields.items():
            setattr(b, key, value)

    def apply_beneficiary_deleted(self, beneficiary_id: int) -> None:
        del self.beneficiaries[beneficiary_id]

    def apply_transfer(self, data: dict) -> None:
        t = TransferInstruction.from_dict(data)
        self.transfers[t.transfer_id] = t
        self._bump_instruction_id(t.transfer_id)

    def apply_transfer_cancelled(self, transfer_id: int, resolved_ms: int) -> None:
        t = self.transfers[transfer_id]
        t.status = CANCELLED
        t.resolved_ms = resolved_ms

    def apply_registration(self, data: dict) -> None:
        r = BillerRegistration.from_dict(data)
        self.registrations[r.registration_id] = r
        self.next_registration_id = max(self.next_registration_id, r.registration_id + 1)

    def apply_deregistered(self, registration_ids: list[int]) -> None:
        for rid in registration_ids:
            self.registrations[rid].status = "removed"

    def apply_payment(self, data: dict) -> None:
        p = BillPayment.from_dict(data)
        self.bill_payments[p.payment_id] = p
        self._bump_instruction_id(p.payment_id)

    def apply_payment_cancelled(self, payment_id: int, resolved_ms: int) -> None:
        p = self.bill_payments[payment_id]
        p.status = CANCELLED
        p.resolved_ms = resolved_ms

    def apply_value_date_result(self, item_kind: str, item_id: int, outcome: str,
                                entry_id: int | None, failure_reason: str | None,
                                resolved_ms: int) -> None:
        item = self.transfers[item_id] if item_kind == "transfer" else self.bill_payments[item_id]
        item.status = EXECUTED if outcome == "executed" else FAILED
        item.executed_entry_id = entry_id
        item.failure_reason = failure_reason
        item.resolved_ms = resolved_ms

    def apply_value_date_watermark(self, business_date: str) -> None:
        if self.last_value_date is None or business_date > self.last_value_date:
            self.last_value_date = business_date

    # ---------- persistence ----------

    def to_state_dict(self) -> dict:
        return {
            "beneficiaries": [b.to_dict() for b in sorted(self.beneficiaries.values(), key=lambda b: b.beneficiary_id)],
            "transfers": [t.to_dict() for t in sorted(self.transfers.values(), key=lambda t: t.transfer_id)],
            "registrations": [r.to_dict() for r in sorted(self.registrations.values(), key=lambda r: r.registration_id)],
            "bill_payments": [p.to_dict() for p in sorted(self.bill_payments.values(), key=lambda p: p.payment_id)],
            "next_beneficiary_id": self.next_beneficiary_id,
            "next_instruction_id": self.next_instruction_id,
            "next_registration_id": self.next_registration_id,
            "last_value_date": self.last_value_date,
        }

    def load_state_dict(self, state: dict) -> None:
        self.__init__()
        for b in state["beneficiaries"]:
            self.apply_beneficiary_saved(b)
        for t in state["transfers"]:
            self.apply_transfer(t)
        for r in state["registrations"]:
            self.apply_registration(r)
        for p in state["bill_payments"]:
            self.apply_payment(p)
        self.next_beneficiary_id = state["next_beneficiary_id"]
        self.next_instruction_id = state["next_instruction_id"]
        self.next_registration_id = state["next_registration_id"]
        self.last_value_date = state["last_value_date"]
