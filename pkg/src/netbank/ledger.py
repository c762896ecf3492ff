"""Double-entry ledger: accounts, postings, balances, history.

Sign convention: a posting amount is positive when it credits the account
(balance up) and negative when it debits it. Every entry's postings sum
to exactly zero per currency; legs owed to or by external parties (bill
corporations, cheque payees, cash deposits) are carried by the designated
clearing account so that value never appears or vanishes.

Balances are derived state: they are folded incrementally as entries
apply and can always be recomputed from the entry list.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .clock import clamp_window, ms_to_iso
from .errors import BankError
from .money import MYR, Money

CLEARING_ACCOUNT = "CLEARING"

ACCOUNT_KINDS = ("current", "saving", "credit_card")
ENTRY_KINDS = ("transfer", "bill_payment", "cheque", "deposit", "adjustment")
STATEMENT_CHANNELS = ("online", "email", "post")


@dataclass
class Account:
    account_id: str
    customer_id: str
    kind: str
    currency: str = MYR
    status: str = "active"  # active | closed
    opened_ms: int = 0
    credit_limit_minor: int = 0  # credit_card only

    def to_dict(self) -> dict:
        return {
            "account_id": self.account_id,
            "customer_id": self.customer_id,
            "kind": self.kind,
            "currency": self.currency,
            "status": self.status,
            "opened_ms": self.opened_ms,
            "credit_limit_minor": self.credit_limit_minor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Account":
        return cls(**d)


@dataclass(frozen=True)
class Posting:
    account_id: str
    amount_minor: int
    currency: str

    def to_dict(self) -> dict:
        return {"account_id": self.account_id, "amount_minor": self.amount_minor, "currency": self.currency}


@dataclass(frozen=True)
class LedgerEntry:
    """Immutable once posted. entry_id is assigned in journal order."""

    entry_id: int
    posted_ms: int
    kind: str
    description: str
    postings: tuple[Posting, ...]

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "posted_ms": self.posted_ms,
            "kind": self.kind,
            "description": self.description,
            "postings": [p.to_dict() for p in self.postings],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LedgerEntry":
        return cls(
            entry_id=d["entry_id"],
            posted_ms=d["posted_ms"],
            kind=d["kind"],
            description=d["description"],
            postings=tuple(Posting(p["account_id"], p["amount_minor"], p["currency"]) for p in d["postings"]),
        )


@dataclass
class StatementRequest:
    request_id: int
    account_id: str
    channel: str
    requested_ms: int
    status: str  # queued | fulfilled

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "account_id": self.account_id,
            "channel": self.channel,
            "requested_ms": self.requested_ms,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StatementRequest":
        return cls(**d)


class LedgerCore:
    """Accounts plus the entry log and derived balances.

    Mutations happen only through apply_* methods invoked by the event
    pipeline; check_* / prepare_* helpers validate commands without
    touching state.
    """

    def __init__(self):
        self.accounts: dict[str, Account] = {}
        self.entries: list[LedgerEntry] = []
        self.statement_requests: list[StatementRequest] = []
        self.balances: dict[str, dict[str, int]] = {}  # account -> currency -> minor units
        self._by_account: dict[str, list[int]] = {}  # account -> entry list indexes
        self.next_entry_id = 1
        self.next_account_seq = 1
        self.next_statement_id = 1

    # ---------- reads ----------

    def get_account(self, account_id: str) -> Account:
        acct = self.accounts.get(account_id)
        if acct is None:
            raise BankError("UNKNOWN_ACCOUNT", f"no such account: {account_id}")
        return acct

    def balance(self, account_id: str) -> Money:
        if account_id != CLEARING_ACCOUNT:
            acct = self.get_account(account_id)
            currency = acct.currency
        else:
            currency = MYR
        per_currency = self.balances.get(account_id, {})
        if account_id == CLEARING_ACCOUNT and per_currency:
            # the clearing account may hold several currencies; report MYR
            currency = MYR if MYR in per_currency else sorted(per_currency)[0]
        return Money(per_currency.get(currency, 0), currency)

    def balance_minor(self, account_id: str, currency: str) -> int:
        return self.balances.get(account_id, {}).get(currency, 0)

    def amount_owed(self, account: Account) -> int:
        """Credit cards store debt as a negative raw balance."""
        return -self.balance_minor(account.account_id, account.currency)

    def entries_for(self, account_id: str) -> list[LedgerEntry]:
        return [self.entries[i] for i in self._by_account.get(account_id, [])]

    def history(self, account_id: str, frm: str, to: str, now_ms: int) -> list[dict]:
        """Entries touching the account inside the window, newest first.

        The window is clamped to the 90-day retention horizon; this is a
        query-time clamp, the records themselves are kept.
        """
        self.get_account(account_id)
        if frm > to:
            raise BankError("INVALID_RANGE", f"from {frm} is after to {to}")
        lo, hi = clamp_window(frm, to, now_ms)
        out = []
        for entry in self.entries_for(account_id):
            if lo <= entry.posted_ms <= hi:
                out.append(self.entry_view(entry, account_id))
        out.sort(key=lambda v: (v["posted_ms"], v["entry_id"]), reverse=True)
        return out

    def entry_view(self, entry: LedgerEntry, account_id: str | None = None) -> dict:
        view = {
            "entry_id": entry.entry_id,
            "posted_ms": entry.posted_ms,
            "posted_at": ms_to_iso(entry.posted_ms),
            "kind": entry.kind,
            "description": entry.description,
            "postings": [p.to_dict() for p in entry.postings],
        }
        if account_id is not None:
            delta = sum(p.amount_minor for p in entry.postings if p.account_id == account_id)
            currency = next(
                (p.currency for p in entry.postings if p.account_id == account_id),
                MYR,
            )
            view["amount"] = {"amount_minor": delta, "currency": currency}
        return view

    # ---------- command validation ----------

    def check_postings(self, postings: list[Posting], extra_deltas: dict | None = None) -> tuple[str, str] | None:
        """Validate a draft entry against current balances.

        extra_deltas maps (account_id, currency) -> minor units already
        claimed by earlier items of the same batch (the value-date
        scheduler executes sequentially). Returns (code, message) or None.
        """
        if len(postings) < 2:
            return "UNBALANCED", "an entry needs at least two postings"
        sums: dict[str, int] = {}
        for p in postings:
            if p.amount_minor == 0:
                return "SCHEMA_VIOLATION", "zero-amount posting"
            sums[p.currency] = sums.get(p.currency, 0) + p.amount_minor
        for currency, total in sums.items():
            if total != 0:
                return "UNBALANCED", f"postings sum to {total} {currency}, expected 0"

        deltas: dict[tuple[str, str], int] = {}
        for p in postings:
            if p.account_id != CLEARING_ACCOUNT:
                acct = self.accounts.get(p.account_id)
                if acct is None:
                    return "UNKNOWN_ACCOUNT", f"no such account: {p.account_id}"
                if acct.status != "active":
                    return "ACCOUNT_CLOSED", f"account {p.account_id} is closed"
                if acct.currency != p.currency:
                    return "CURRENCY_MISMATCH", (
                        f"account {p.account_id} holds {acct.currency}, posting is {p.currency}"
                    )
            deltas[(p.account_id, p.currency)] = deltas.get((p.account_id, p.currency), 0) + p.amount_minor

        for (account_id, currency), delta in deltas.items():
            if account_id == CLEARING_ACCOUNT:
                continue
            acct = self.accounts[account_id]
            base = self.balance_minor(account_id, currency)
            if extra_deltas:
                base += extra_deltas.get((account_id, currency), 0)
            after = base + delta
            if acct.kind == "credit_card":
                # raw balance of a card sits in [-credit_limit, 0]; the
                # customer owes -balance
                if after > 0 or after < -acct.credit_limit_minor:
                    return "OVER_LIMIT", (
                        f"card {account_id} owed amount would leave [0, {acct.credit_limit_minor}]"
                    )
            elif after < 0:
                return "INSUFFICIENT_FUNDS", f"account {account_id} would go to {after}"
        return None

    def prepare_entry(
        self,
        kind: str,
        description: str,
        postings: list[Posting],
        now_ms: int,
        *,
        entry_id: int | None = None,
        extra_deltas: dict | None = None,
    ) -> dict:
        """Validate a draft and produce the entry payload for the event log."""
        if kind not in ENTRY_KINDS:
            raise BankError("SCHEMA_VIOLATION", f"unknown entry kind: {kind}")
        problem = self.check_postings(postings, extra_deltas)
        if problem is not None:
            raise BankError(problem[0], problem[1])
        entry = LedgerEntry(
            entry_id=self.next_entry_id if entry_id is None else entry_id,
            posted_ms=now_ms,
            kind=kind,
            description=description,
            postings=tuple(postings),
        )
        return entry.to_dict()

    # ---------- event application ----------

    def apply_account(self, data: dict) -> None:
        acct = Account.from_dict(data)
        self.accounts[acct.account_id] = acct
        seq_part = acct.account_id[1:]
        if seq_part.isdigit():
            self.next_account_seq = max(self.next_account_seq, int(seq_part) + 1)

    def apply_close_accounts(self, customer_id: str) -> None:
        for acct in self.accounts.values():
            if acct.customer_id == customer_id and acct.status == "active":
                self.accounts[acct.account_id] = replace(acct, status="closed")

    def apply_entry(self, data: dict) -> None:
        entry = LedgerEntry.from_dict(data)
        index = len(self.entries)
        self.entries.append(entry)
        touched = set()
        for p in entry.postings:
            per = self.balances.setdefault(p.account_id, {})
            per[p.currency] = per.get(p.currency, 0) + p.amount_minor
            touched.add(p.account_id)
        for account_id in touched:
            self._by_account.setdefault(account_id, []).append(index)
        self.next_entry_id = max(self.next_entry_id, entry.entry_id + 1)

    def apply_statement(self, data: dict) -> None:
        req = StatementRequest.from_dict(data)
        self.statement_requests.append(req)
        self.next_statement_id = max(self.next_statement_id, req.request_id + 1)

    # ---------- persistence ----------

    def to_state_dict(self) -> dict:
        return {
            "accounts": [a.to_dict() for a in sorted(self.accounts.values(), key=lambda a: a.account_id)],
            "entries": [e.to_dict() for e in self.entries],
            "statement_requests": [s.to_dict() for s in self.statement_requests],
            "next_entry_id": self.next_entry_id,
            "next_account_seq": self.next_account_seq,
            "next_statement_id": self.next_statement_id,
        }

    def load_state_dict(self, state: dict) -> None:
        self.__init__()
        for a in state["accounts"]:
            self.apply_account(a)
        for e in state["entries"]:
            self.apply_entry(e)
        for s in state["statement_requests"]:
            self.apply_statement(s)
        self.next_entry_id = state["next_entry_id"]
        self.next_account_seq = state["next_account_seq"]
        self.next_statement_id = state["next_statement_id"]
