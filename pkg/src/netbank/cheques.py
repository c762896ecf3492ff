"""Cheque services: status enquiry, stop payment, cheque books.

Cheques exist once a requested book is dispatched: dispatch registers a
numbered range of unpaid cheques against the account. Legal transitions
are unpaid -> paid / stopped / returned; all three outcomes are terminal,
and a stopped cheque can never be paid.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BankError

CHEQUE_BOOK_LEAVES = (25, 50)
FIRST_CHEQUE_NO = 100_001

UNPAID, PAID, STOPPED, RETURNED = "unpaid", "paid", "stopped", "returned"


@dataclass
class Cheque:
    account_id: str
    cheque_no: str
    status: str = UNPAID
    status_changed_ms: int = 0
    paid_entry_id: int | None = None

    def to_dict(self) -> dict:
        return {
            "account_id": self.account_id,
            "cheque_no": self.cheque_no,
            "status": self.status,
            "status_changed_ms": self.status_changed_ms,
            "paid_entry_id": self.paid_entry_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Cheque":
        return cls(**d)


@dataclass
class ChequeBookRequest:
    request_id: int
    account_id: str
    leaves: int
    requested_ms: int
    status: str = "queued"  # queued | dispatched

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "account_id": self.account_id,
            "leaves": self.leaves,
            "requested_ms": self.requested_ms,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChequeBookRequest":
        return cls(**d)


class ChequeCore:
    def __init__(self):
        self.cheques: dict[tuple[str, str], Cheque] = {}
        self.requests: dict[int, ChequeBookRequest] = {}
        self.next_request_id = 1
        self.next_cheque_no: dict[str, int] = {}  # per account

    def get_cheque(self, account_id: str, cheque_no: str) -> Cheque:
        cheque = self.cheques.get((account_id, cheque_no))
        if cheque is None:
            raise BankError("UNKNOWN_CHEQUE", f"no cheque {cheque_no} on account {account_id}")
        return cheque

    def get_request(self, request_id: int) -> ChequeBookRequest:
        request = self.requests.get(request_id)
        if request is None:
            raise BankError("UNKNOWN_CHEQUE", f"no cheque book request {request_id}")
        return request

    def peek_numbers(self, account_id: str, leaves: int) -> list[str]:
        start = self.next_cheque_no.get(account_id, FIRST_CHEQUE_NO)
        return [f"{start + i:06d}" for i in range(leaves)]

    # ---------- event application ----------

    def apply_book_requested(self, data: dict) -> None:
        request = ChequeBookRequest.from_dict(data)
        self.requests[request.request_id] = request
        self.next_request_id = max(self.next_request_id, request.request_id + 1)

    def apply_book_dispatched(self, request_id: int, account_id: str, cheque_nos: list[str]) -> None:
        self.requests[request_id].status = "dispatched"
        for no in cheque_nos:
            self.cheques[(account_id, no)] = Cheque(account_id=account_id, cheque_no=no)
        top = max(int(no) for no in cheque_nos)
        self.next_cheque_no[account_id] = max(self.next_cheque_no.get(account_id, FIRST_CHEQUE_NO), top + 1)

    def apply_stopped(self, account_id: str, cheque_no: str, ts_ms: int) -> None:
        cheque = self.cheques[(account_id, cheque_no)]
        cheque.status = STOPPED
        cheque.status_changed_ms = ts_ms

    def apply_presented(self, account_id: str, cheque_no: str, outcome: str,
                        entry_id: int | None, ts_ms: int) -> None:
        cheque = self.cheques[(account_id, cheque_no)]
        cheque.status = outcome
        cheque.status_changed_ms = ts_ms
        cheque.paid_entry_id = entry_id

    # ---------- persistence ----------

    def to_state_dict(self) -> dict:
        return {
            "cheques": [c.to_dict() for c in sorted(self.cheques.values(), key=lambda c: (c.account_id, c.cheque_no))],
            "requests": [r.to_dict() for r in sorted(self.requests.values(), key=lambda r: r.request_id)],
            "next_request_id": self.next_request_id,
            "next_cheque_no": dict(sorted(self.next_cheque_no.items())),
        }

    def load_state_dict(self, state: dict) -> None:
        self.__init__()
        for c in state["cheques"]:
            cheque = Cheque.from_dict(c)
            self.cheques[(cheque.account_id, cheque.cheque_no)] = cheque
        for r in state["requests"]:
            self.apply_book_requested(r)
        self.next_request_id = state["next_request_id"]
        self.next_cheque_no = dict(state["next_cheque_no"])
