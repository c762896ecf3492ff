"""The banking application core.

Every state-mutating command is validated against current state, turned
into exactly one event, appended to the journal (when one is attached)
and only then applied. Events carry every generated value (ids,
timestamps, salts, digests), so replaying the journal reproduces the
durable state bit for bit; recovery is replay.

Sessions and TACs are deliberately ephemeral: a restart signs everyone
off but loses no money movement.

All mutations serialize through one lock (the single-logical-writer
contract); posting order equals journal order.
"""

from __future__ import annotations

import threading

from .cheques import CHEQUE_BOOK_LEAVES, ChequeCore, PAID, RETURNED, STOPPED
from .clock import ms_to_date, ms_to_iso, parse_date
from .errors import (
    BankError,
    CONFIRM_TEXT,
    LOGOUT_TEXT,
    VIEW_ACCOUNT_TEXT,
    WELCOME_TEXT,
)
from .identity import (
    Credential,
    Customer,
    DEFAULT_KDF_ITERATIONS,
    IdentityCore,
    PasswordPolicy,
    SessionStore,
    make_credential_material,
    validate_password,
)
from .journal import Journal
from .ledger import (
    ACCOUNT_KINDS,
    CLEARING_ACCOUNT,
    LedgerCore,
    Posting,
    STATEMENT_CHANNELS,
)
from .money import Money
from .payments import (
    CANCELLED,
    EXECUTED,
    FAILED,
    PENDING,
    PaymentsCore,
    TacStore,
)

DEFAULT_IDLE_TIMEOUT_S = 300
DEFAULT_TAC_TTL_S = 300


class Bank:
    """Facade over the domain cores plus the commit pipeline."""

    def __init__(
        self,
        clock,
        *,
        journal: Journal | None = None,
        policy: PasswordPolicy | None = None,
        idle_timeout_s: int = DEFAULT_IDLE_TIMEOUT_S,
        tac_ttl_s: int = DEFAULT_TAC_TTL_S,
        kdf_iterations: int = DEFAULT_KDF_ITERATIONS,
    ):
        self.clock = clock
        self.journal = journal
        self.policy = policy or PasswordPolicy()
        self.kdf_iterations = kdf_iterations
        self.ledger = LedgerCore()
        self.identity = IdentityCore()
        self.payments = PaymentsCore()
        self.cheques = ChequeCore()
        self.sessions = SessionStore(idle_timeout_s)
        self.tacs = TacStore(tac_ttl_s)
        self._lock = threading.RLock()
        self.events_applied = 0

    # ------------------------------------------------------------------
    # commit pipeline
    # ------------------------------------------------------------------

    def _commit(self, event: dict) -> None:
        """Journal first, apply second: an acknowledged mutation is durable."""
        if self.journal is not None:
            self.journal.append(event, event.get("ts_ms", self._now()))
        self.apply(event)

    def apply(self, event: dict) -> None:
        handler = self._APPLY[event["type"]]
        handler(self, event)
        self.events_applied += 1

    def _now(self) -> int:
        return self.clock.now_ms()

    def _today(self) -> str:
        return ms_to_date(self._now())

    # ------------------------------------------------------------------
    # sessions and authorization
    # ------------------------------------------------------------------

    def _session(self, token: str, *, refresh: bool = True):
        now = self._now()
        if refresh:
            return self.sessions.touch(token, now)
        return self.sessions.resolve(token, now)

    def _customer_session(self, token: str):
        session = self._session(token)
        if session.customer_id is None:
            raise BankError("NOT_OWNER", "administrative sessions have no customer context")
        return session, session.customer_id

    def _admin_session(self, token: str):
        session = self._session(token)
        cred = self.identity.credentials.get(session.username)
        if cred is None or not cred.is_admin:
            raise BankError("NOT_ADMIN", "administrator session required")
        return session

    def _owned_account(self, customer_id: str, account_id: str):
        acct = self.ledger.accounts.get(account_id)
        if acct is None or acct.customer_id != customer_id:
            # not revealed whether the account exists for someone else
            raise BankError("UNKNOWN_ACCOUNT", f"no such account: {account_id}")
        return acct

    def _effective_must_change(self, cred: Credential, now_ms: int) -> bool:
        if cred.must_change:
            return True
        max_age = self.policy.max_age_days
        if max_age is None:
            return False
        return now_ms - cred.password_set_ms > max_age * 86_400_000

    def authorize(self, token: str, *, refresh: bool = True) -> dict:
        """Resolve a bearer token into a session context for the API layer."""
        with self._lock:
            now = self._now()
            session = self._session(token, refresh=refresh)
            cred = self.identity.credentials.get(session.username)
            meta = self.sessions.meta(session, now)
            return {
                "username": session.username,
                "customer_id": session.customer_id,
                "is_admin": bool(cred and cred.is_admin),
                "must_change": bool(cred and self._effective_must_change(cred, now)),
                "remaining_s": meta["remaining_s"],
                "warn": meta["warn"],
            }

    def sweep_sessions(self) -> int:
        with self._lock:
            return self.sessions.sweep(self._now())

    # ------------------------------------------------------------------
    # identity operations
    # ------------------------------------------------------------------

    def ensure_admin(self, username: str, password: str) -> None:
        """Bootstrap the administrator credential from configuration (idempotent)."""
        with self._lock:
            existing = self.identity.credentials.get(username)
            if existing is not None:
                if not existing.is_admin:
                    raise BankError("DUPLICATE_USERNAME", f"{username} exists and is not an admin")
                return
            salt_hex, digest_hex = make_credential_material(password, self.kdf_iterations)
            self._commit({
                "type": "admin_created",
                "ts_ms": self._now(),
                "credential": {
                    "username": username,
                    "salt_hex": salt_hex,
                    "digest_hex": digest_hex,
                    "kdf_iterations": self.kdf_iterations,
                    "password_set_ms": self._now(),
                    "customer_id": None,
                    "failed_attempts": 0,
                    "locked": False,
                    "must_change": False,
                    "is_admin": True,
                },
            })

    def login(self, username: str, password: str) -> dict:
        with self._lock:
            now = self._now()
            cred = self.identity.credentials.get(username)
            if cred is None:
                raise BankError("INVALID_CREDENTIALS")
            customer = self.identity.customers.get(cred.customer_id) if cred.customer_id else None
            if customer is not None and customer.status == "cancelled":
                raise BankError("CUSTOMER_CANCELLED", "this customer profile has been cancelled")
            if cred.locked:
                raise BankError("LOCKED")
            if not cred.verify(password):
                attempts = cred.failed_attempts + 1
                locked = attempts >= self.policy.max_failed_attempts
                self._commit({
                    "type": "login_failed",
                    "ts_ms": now,
                    "username": username,
                    "failed_attempts": attempts,
                    "locked": locked,
                })
                raise BankError("INVALID_CREDENTIALS")
            if cred.failed_attempts:
                self._commit({"type": "login_succeeded", "ts_ms": now, "username": username})
            session = self.sessions.create(username, cred.customer_id, now)
            return {
                "token": session.token,
                "message": WELCOME_TEXT,
                "must_change": self._effective_must_change(cred, now),
                "customer_id": cred.customer_id,
                "is_admin": cred.is_admin,
                "idle_timeout_s": session.idle_timeout_s,
            }

    def heartbeat(self, token: str) -> dict:
        """Read-only liveness probe; deliberately does not refresh activity."""
        with self._lock:
            session = self._session(token, refresh=False)
            return self.sessions.meta(session, self._now())

    def acknowledge_continue(self, token: str) -> dict:
        with self._lock:
            session = self._session(token)
            return self.sessions.meta(session, self._now())

    def logout(self, token: str) -> dict:
        with self._lock:
            self._session(token, refresh=False)
            self.sessions.drop(token)
            self.tacs.drop_session(token)
            return {"message": LOGOUT_TEXT}

    def change_password(self, token: str, ic_passport_no: str, new_password: str) -> dict:
        with self._lock:
            session = self._session(token)
            cred = self.identity.get_credential(session.username)
            customer = self.identity.customers.get(cred.customer_id) if cred.customer_id else None
            if customer is None or customer.ic_passport_no != ic_passport_no:
                raise BankError("IC_MISMATCH", "IC/Passport number does not match our records")
            violations = validate_password(self.policy, new_password)
            if violations:
                raise BankError("POLICY_VIOLATION", f"password rejected: {', '.join(violations)}",
                                rules=violations)
            salt_hex, digest_hex = make_credential_material(new_password, self.kdf_iterations)
            self._commit({
                "type": "password_changed",
                "ts_ms": self._now(),
                "username": session.username,
                "salt_hex": salt_hex,
                "digest_hex": digest_hex,
                "kdf_iterations": self.kdf_iterations,
            })
            return {"changed": True}

    def update_profile(self, token: str, fields: dict) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            for key in fields:
                if key not in Customer.PROFILE_FIELDS:
                    raise BankError("INVALID_FIELD", f"{key} is not an updatable profile field")
            if fields:
                self._commit({
                    "type": "profile_updated",
                    "ts_ms": self._now(),
                    "customer_id": customer_id,
                    "fields": dict(fields),
                })
            return self.identity.get_customer(customer_id).view()

    def cancel_atm(self, token: str) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            customer = self.identity.get_customer(customer_id)
            if not customer.atm_enabled:
                raise BankError("ALREADY_CANCELLED", "ATM facilities are already cancelled")
            self._commit({"type": "atm_cancelled", "ts_ms": self._now(), "customer_id": customer_id})
            return {"atm_enabled": False}

    # ---------- administrator ----------

    def admin_reinitialize(self, admin_token: str, username: str) -> dict:
        with self._lock:
            self._admin_session(admin_token)
            self.identity.get_credential(username)
            self._commit({"type": "credential_reinitialized", "ts_ms": self._now(), "username": username})
            return {"username": username, "locked": False, "failed_attempts": 0}

    def admin_add_customer(self, admin_token: str, draft: dict, username: str,
                           initial_password: str, accounts: list[dict] | None = None,
                           *, must_change: bool = True) -> dict:
        with self._lock:
            self._admin_session(admin_token)
            return self._add_customer(draft, username, initial_password,
                                      accounts or [], must_change=must_change)

    def _add_customer(self, draft: dict, username: str, initial_password: str,
                      accounts: list[dict], *, must_change: bool = True) -> dict:
        if username in self.identity.credentials:
            raise BankError("DUPLICATE_USERNAME", f"username already taken: {username}")
        if not draft.get("full_name"):
            raise BankError("SCHEMA_VIOLATION", "full_name is required")
        if not draft.get("ic_passport_no"):
            raise BankError("SCHEMA_VIOLATION", "ic_passport_no is required")
        violations = validate_password(self.policy, initial_password)
        if violations:
            raise BankError("POLICY_VIOLATION", f"initial password rejected: {', '.join(violations)}",
                            rules=violations)

        now = self._now()
        customer_id = draft.get("customer_id") or self.identity.peek_customer_id()
        customer = {
            "customer_id": customer_id,
            "full_name": draft["full_name"],
            "ic_passport_no": draft["ic_passport_no"],
            "email": draft.get("email", ""),
            "postal_address": draft.get("postal_address", ""),
            "phone": draft.get("phone", ""),
            "secure_delivery_contact": draft.get("secure_delivery_contact", ""),
            "atm_enabled": bool(draft.get("atm_enabled", True)),
            "status": "active",
            "created_ms": now,
        }
        salt_hex, digest_hex = make_credential_material(initial_password, self.kdf_iterations)
        credential = {
            "username": username,
            "salt_hex": salt_hex,
            "digest_hex": digest_hex,
            "kdf_iterations": self.kdf_iterations,
            "password_set_ms": now,
            "customer_id": customer_id,
            "failed_attempts": 0,
            "locked": False,
            "must_change": must_change,
            "is_admin": False,
        }

        account_dicts, opening_entries = [], []
        account_seq = self.ledger.next_account_seq
        entry_id = self.ledger.next_entry_id
        for spec in accounts:
            kind = spec.get("kind")
            if kind not in ACCOUNT_KINDS:
                raise BankError("SCHEMA_VIOLATION", f"unknown account kind: {kind}")
            account_id = spec.get("account_id") or f"A{account_seq:06d}"
            account_seq += 1
            currency = spec.get("currency", "MYR")
            credit_limit = int(spec.get("credit_limit_minor", 0))
            if kind != "credit_card" and credit_limit:
                raise BankError("SCHEMA_VIOLATION", "credit_limit_minor only applies to credit cards")
            account_dicts.append({
                "account_id": account_id,
                "customer_id": customer_id,
                "kind": kind,
                "currency": currency,
                "status": "active",
                "opened_ms": now,
                "credit_limit_minor": credit_limit,
            })
            opening = int(spec.get("opening_minor", 0))
            owed = int(spec.get("owed_minor", 0))
            if kind == "credit_card":
                if opening:
                    raise BankError("SCHEMA_VIOLATION", "credit cards take owed_minor, not opening_minor")
                if owed < 0 or owed > credit_limit:
                    raise BankError("SCHEMA_VIOLATION", "owed_minor must lie in [0, credit_limit]")
                if owed:
                    opening_entries.append({
                        "entry_id": entry_id,
                        "posted_ms": now,
                        "kind": "adjustment",
                        "description": "Opening card balance",
                        "postings": [
                            {"account_id": account_id, "amount_minor": -owed, "currency": currency},
                            {"account_id": CLEARING_ACCOUNT, "amount_minor": owed, "currency": currency},
                        ],
                    })
                    entry_id += 1
            else:
                if opening < 0:
                    raise BankError("SCHEMA_VIOLATION", "opening_minor must be >= 0")
                if opening:
                    opening_entries.append({
                        "entry_id": entry_id,
                        "posted_ms": now,
                        "kind": "deposit",
                        "description": "Opening balance deposit",
                        "postings": [
                            {"account_id": CLEARING_ACCOUNT, "amount_minor": -opening, "currency": currency},
                            {"account_id": account_id, "amount_minor": opening, "currency": currency},
                        ],
                    })
                    entry_id += 1

        self._commit({
            "type": "customer_added",
            "ts_ms": now,
            "customer": customer,
            "credential": credential,
            "accounts": account_dicts,
            "entries": opening_entries,
        })
        return {
            "customer_id": customer_id,
            "username": username,
            "account_ids": [a["account_id"] for a in account_dicts],
        }

    def admin_cancel_customer(self, admin_token: str, customer_id: str) -> dict:
        with self._lock:
            self._admin_session(admin_token)
            self.identity.get_customer(customer_id)
            self._commit({"type": "customer_cancelled", "ts_ms": self._now(), "customer_id": customer_id})
            self.sessions.drop_for_customer(customer_id)
            return {"customer_id": customer_id, "status": "cancelled"}

    def admin_transactions(self, admin_token: str, offset: int = 0, limit: int = 100) -> dict:
        with self._lock:
            self._admin_session(admin_token)
            entries = self.ledger.entries
            page = entries[offset:offset + limit]
            return {
                "total": len(entries),
                "offset": offset,
                "limit": limit,
                "entries": [self.ledger.entry_view(e) for e in page],
            }

    # ------------------------------------------------------------------
    # ledger operations
    # ------------------------------------------------------------------

    def post_entry(self, kind: str, description: str, postings: list[tuple[str, Money]]) -> int:
        """Validate and post a balanced entry; returns its id.

        Internal surface used by deposits, adjustments and fixtures; the
        customer-facing flows go through transfers, payments and cheques.
        """
        with self._lock:
            drafted = [Posting(account_id, money.amount_minor, money.currency)
                       for account_id, money in postings]
            entry = self.ledger.prepare_entry(kind, description, drafted, self._now())
            self._commit({"type": "entry_posted", "ts_ms": self._now(), "entry": entry})
            return entry["entry_id"]

    def balance(self, account_id: str) -> Money:
        with self._lock:
            return self.ledger.balance(account_id)

    def accounts_view(self, token: str) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            accounts = sorted(
                (a for a in self.ledger.accounts.values() if a.customer_id == customer_id),
                key=lambda a: a.account_id,
            )
            views = []
            for acct in accounts:
                view = {
                    "account_id": acct.account_id,
                    "kind": acct.kind,
                    "status": acct.status,
                    "currency": acct.currency,
                    "opened_at": ms_to_iso(acct.opened_ms),
                    "balance": self.ledger.balance(acct.account_id).to_dict(),
                }
                if acct.kind == "credit_card":
                    view["credit_limit"] = {"amount_minor": acct.credit_limit_minor, "currency": acct.currency}
                    view["amount_owed"] = {"amount_minor": self.ledger.amount_owed(acct), "currency": acct.currency}
                views.append(view)
            return {"message": VIEW_ACCOUNT_TEXT, "accounts": views}

    def account_history(self, token: str, account_id: str, frm: str, to: str) -> list[dict]:
        with self._lock:
            _, customer_id = self._customer_session(token)
            self._owned_account(customer_id, account_id)
            return self.ledger.history(account_id, parse_date(frm), parse_date(to), self._now())

    def request_statement(self, token: str, account_id: str, channel: str) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            self._owned_account(customer_id, account_id)
            if channel not in STATEMENT_CHANNELS:
                raise BankError("INVALID_CHANNEL", f"channel must be one of {STATEMENT_CHANNELS}")
            now = self._now()
            request = {
                "request_id": self.ledger.next_statement_id,
                "account_id": account_id,
                "channel": channel,
                "requested_ms": now,
                "status": "fulfilled" if channel == "online" else "queued",
            }
            self._commit({"type": "statement_requested", "ts_ms": now, "request": request})
            view = dict(request)
            view["requested_at"] = ms_to_iso(now)
            if channel == "online":
                frm = ms_to_date(now - 90 * 86_400_000)
                view["body"] = self.ledger.history(account_id, frm, ms_to_date(now), now)
            return view

    # ------------------------------------------------------------------
    # payments operations
    # ------------------------------------------------------------------

    def issue_tac(self, token: str) -> dict:
        with self._lock:
            self._customer_session(token)
            tac = self.tacs.issue(token, self._now())
            return {"code": tac.code, "ttl_s": tac.ttl_s}

    def save_beneficiary(self, token: str, account_no: str, nickname: str) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            if not account_no:
                raise BankError("SCHEMA_VIOLATION", "account_no is required")
            self.payments.check_save_beneficiary(customer_id, account_no)
            now = self._now()
            beneficiary = {
                "beneficiary_id": self.payments.next_beneficiary_id,
                "customer_id": customer_id,
                "account_no": account_no,
                "nickname": nickname,
                "created_ms": now,
            }
            self._commit({"type": "beneficiary_saved", "ts_ms": now, "beneficiary": beneficiary})
            return beneficiary

    def update_beneficiary(self, token: str, beneficiary_id: int, fields: dict) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            beneficiary = self.payments.get_beneficiary(customer_id, beneficiary_id)
            for key in fields:
                if key not in ("nickname", "account_no"):
                    raise BankError("INVALID_FIELD", f"{key} is not an updatable beneficiary field")
            new_no = fields.get("account_no")
            if new_no and new_no != beneficiary.account_no:
                if any(b.account_no == new_no for b in self.payments.beneficiaries_of(customer_id)):
                    raise BankError("DUPLICATE_BENEFICIARY", f"account {new_no} already saved")
            if fields:
                self._commit({
                    "type": "beneficiary_updated",
                    "ts_ms": self._now(),
                    "beneficiary_id": beneficiary_id,
                    "fields": dict(fields),
                })
            return self.payments.beneficiaries[beneficiary_id].to_dict()

    def delete_beneficiary(self, token: str, beneficiary_id: int) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            self.payments.get_beneficiary(customer_id, beneficiary_id)
            self._commit({
                "type": "beneficiary_deleted",
                "ts_ms": self._now(),
                "beneficiary_id": beneficiary_id,
            })
            return {"deleted": beneficiary_id}

    def list_beneficiaries(self, token: str) -> list[dict]:
        with self._lock:
            _, customer_id = self._customer_session(token)
            return [b.to_dict() for b in self.payments.beneficiaries_of(customer_id)]

    def create_transfer(self, token: str, source_account: str, amount: Money,
                        effective_date: str, tac_code: str, *,
                        target_account_id: str | None = None,
                        target_beneficiary_id: int | None = None,
                        notify_email: str | None = None) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            source = self.ledger.accounts.get(source_account)
            if source is None or source.customer_id != customer_id:
                raise BankError("NOT_OWNER", f"{source_account} is not one of your accounts")

            if (target_account_id is None) == (target_beneficiary_id is None):
                raise BankError("SCHEMA_VIOLATION",
                                "exactly one of target_account_id / target_beneficiary_id is required")
            if target_account_id is not None:
                target = self.ledger.accounts.get(target_account_id)
                if target is None or target.customer_id != customer_id:
                    raise BankError("NOT_OWNER", f"{target_account_id} is not one of your accounts")
                if target.account_id == source_account:
                    raise BankError("SAME_ACCOUNT", "source and target are the same account")
                target_kind, target_account = "own", target.account_id
                description = f"Transfer {source_account} -> {target_account}"
            else:
                beneficiary = self.payments.get_beneficiary(customer_id, target_beneficiary_id)
                target_kind, target_account = "beneficiary", beneficiary.account_no
                description = f"Transfer to {beneficiary.account_no} ({beneficiary.nickname})"

            if not amount.is_positive:
                raise BankError("NON_POSITIVE_AMOUNT", "amount must be greater than zero")
            if amount.currency != source.currency:
                raise BankError("CURRENCY_MISMATCH",
                                f"account {source_account} holds {source.currency}")
            effective = parse_date(effective_date)
            today = self._today()
            if effective < today:
                raise BankError("PAST_DATE", f"effective date {effective} is before {today}")

            now = self._now()
            self.tacs.consume(token, tac_code, now)  # single use, whatever happens next

            instruction = {
                "transfer_id": self.payments.next_instruction_id,
                "customer_id": customer_id,
                "source_account": source_account,
                "target_kind": target_kind,
                "target_account": target_account,
                "amount_minor": amount.amount_minor,
                "currency": amount.currency,
                "effective_date": effective,
                "status": PENDING,
                "created_ms": now,
                "target_beneficiary_id": target_beneficiary_id,
                "notify_email": notify_email,
                "executed_entry_id": None,
                "failure_reason": None,
                "resolved_ms": None,
            }

            if effective > today:
                self._commit({"type": "transfer_created", "ts_ms": now,
                              "instruction": instruction, "entry": None})
                return self.payments.transfers[instruction["transfer_id"]].view()

            postings = self._transfer_postings(instruction)
            problem = self.ledger.check_postings(postings)
            if problem is not None:
                code, detail = problem
                if code in ("INSUFFICIENT_FUNDS", "OVER_LIMIT"):
                    instruction.update(status=FAILED, failure_reason=code, resolved_ms=now)
                    self._commit({"type": "transfer_created", "ts_ms": now,
                                  "instruction": instruction, "entry": None})
                raise BankError(code, detail)
            entry = self.ledger.prepare_entry("transfer", description, postings, now)
            instruction.update(status=EXECUTED, executed_entry_id=entry["entry_id"], resolved_ms=now)
            self._commit({"type": "transfer_created", "ts_ms": now,
                          "instruction": instruction, "entry": entry})
            return self.payments.transfers[instruction["transfer_id"]].view()

    def _transfer_postings(self, instruction: dict) -> list[Posting]:
        amount = instruction["amount_minor"]
        currency = instruction["currency"]
        credit_to = (instruction["target_account"] if instruction["target_kind"] == "own"
                     else CLEARING_ACCOUNT)
        return [
            Posting(instruction["source_account"], -amount, currency),
            Posting(credit_to, amount, currency),
        ]

    def pending_transfers(self, token: str) -> list[dict]:
        with self._lock:
            _, customer_id = self._customer_session(token)
            return [t.view() for t in self.payments.pending_transfers_of(customer_id)]

    def cancel_pending_transfer(self, token: str, transfer_id: int) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            instruction = self.payments.get_transfer(customer_id, transfer_id)
            if instruction.status != PENDING:
                raise BankError("NOT_PENDING", f"transfer {transfer_id} is {instruction.status}")
            self._commit({"type": "transfer_cancelled", "ts_ms": self._now(), "transfer_id": transfer_id})
            return self.payments.transfers[transfer_id].view()

    def transfer_history(self, token: str, frm: str, to: str) -> list[dict]:
        with self._lock:
            _, customer_id = self._customer_session(token)
            return self.payments.history_of(customer_id, parse_date(frm), parse_date(to),
                                            self._now(), payments=False)

    # ---------- bill payments ----------

    def register_biller(self, token: str, corporation: str, bill_account_no: str,
                        holder_name: str) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            if not corporation or not bill_account_no:
                raise BankError("SCHEMA_VIOLATION", "corporation and bill_account_no are required")
            for r in self.payments.registrations.values():
                if (r.customer_id == customer_id and r.status == "active"
                        and r.corporation == corporation and r.bill_account_no == bill_account_no):
                    raise BankError("DUPLICATE_REGISTRATION",
                                    f"{corporation}/{bill_account_no} is already registered")
            registration = {
                "registration_id": self.payments.next_registration_id,
                "customer_id": customer_id,
                "corporation": corporation,
                "bill_account_no": bill_account_no,
                "holder_name": holder_name,
                "status": "active",
            }
            self._commit({"type": "biller_registered", "ts_ms": self._now(),
                          "registration": registration})
            return registration

    def deregister_billers(self, token: str, registration_ids: list[int]) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            for rid in registration_ids:
                self.payments.get_registration(customer_id, rid)  # all must be active and owned
            self._commit({"type": "billers_deregistered", "ts_ms": self._now(),
                          "registration_ids": list(registration_ids)})
            return {"removed": list(registration_ids)}

    def list_registrations(self, token: str) -> list[dict]:
        with self._lock:
            _, customer_id = self._customer_session(token)
            items = [r.to_dict() for r in self.payments.registrations.values()
                     if r.customer_id == customer_id and r.status == "active"]
            items.sort(key=lambda r: r["registration_id"])
            return items

    def pay_registered(self, token: str, registration_id: int, payer_account: str,
                       amount: Money, effective_date: str, bill_ref: str | None = None) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            registration = self.payments.get_registration(customer_id, registration_id)
            return self._make_bill_payment(
                token, customer_id, payer_account, registration.corporation,
                registration.bill_account_no, registration.holder_name,
                amount, effective_date, bill_ref,
            )

    def open_payment(self, token: str, corporation: str, bill_account_no: str,
                     holder_name: str, payer_account: str, amount: Money,
                     effective_date: str, bill_ref: str | None = None) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            if not corporation:
                raise BankError("SCHEMA_VIOLATION", "corporation is required")
            return self._make_bill_payment(
                token, customer_id, payer_account, corporation,
                bill_account_no, holder_name, amount, effective_date, bill_ref,
            )

    def _make_bill_payment(self, token: str, customer_id: str, payer_account: str,
                           corporation: str, bill_account_no: str, holder_name: str,
                           amount: Money, effective_date: str, bill_ref: str | None) -> dict:
        payer = self.ledger.accounts.get(payer_account)
        if payer is None or payer.customer_id != customer_id:
            raise BankError("NOT_OWNER", f"{payer_account} is not one of your accounts")
        if not amount.is_positive:
            raise BankError("NON_POSITIVE_AMOUNT", "amount must be greater than zero")
        if amount.currency != payer.currency:
            raise BankError("CURRENCY_MISMATCH", f"account {payer_account} holds {payer.currency}")
        effective = parse_date(effective_date)
        today = self._today()
        if effective < today:
            raise BankError("PAST_DATE", f"effective date {effective} is before {today}")

        now = self._now()
        payment = {
            "payment_id": self.payments.next_instruction_id,
            "customer_id": customer_id,
            "payer_account": payer_account,
            "corporation": corporation,
            "bill_account_no": bill_account_no,
            "holder_name": holder_name,
            "amount_minor": amount.amount_minor,
            "currency": amount.currency,
            "effective_date": effective,
            "status": PENDING,
            "created_ms": now,
            "bill_ref": bill_ref,
            "executed_entry_id": None,
            "failure_reason": None,
            "resolved_ms": None,
        }

        if effective > today:
            self._commit({"type": "bill_payment_created", "ts_ms": now,
                          "payment": payment, "entry": None})
        else:
            postings = self._payment_postings(payment)
            problem = self.ledger.check_postings(postings)
            if problem is not None:
                code, detail = problem
                if code in ("INSUFFICIENT_FUNDS", "OVER_LIMIT"):
                    payment.update(status=FAILED, failure_reason=code, resolved_ms=now)
                    self._commit({"type": "bill_payment_created", "ts_ms": now,
                                  "payment": payment, "entry": None})
                raise BankError(code, detail)
            description = f"Bill payment to {corporation} (bill acct {bill_account_no})"
            entry = self.ledger.prepare_entry("bill_payment", description, postings, now)
            payment.update(status=EXECUTED, executed_entry_id=entry["entry_id"], resolved_ms=now)
            self._commit({"type": "bill_payment_created", "ts_ms": now,
                          "payment": payment, "entry": entry})
        view = self.payments.bill_payments[payment["payment_id"]].view()
        return {"message": CONFIRM_TEXT, "payment": view}

    def _payment_postings(self, payment: dict) -> list[Posting]:
        """Bill legs go to clearing unless the bill account is the customer's own card."""
        amount = payment["amount_minor"]
        currency = payment["currency"]
        credit_to = CLEARING_ACCOUNT
        own = self.ledger.accounts.get(payment["bill_account_no"])
        if own is not None and own.customer_id == payment["customer_id"] and own.kind == "credit_card":
            credit_to = own.account_id
        return [
            Posting(payment["payer_account"], -amount, currency),
            Posting(credit_to, amount, currency),
        ]

    def enquire_future_payments(self, token: str) -> list[dict]:
        with self._lock:
            _, customer_id = self._customer_session(token)
            return [p.view() for p in self.payments.pending_payments_of(customer_id)]

    def cancel_future_payment(self, token: str, payment_id: int) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            payment = self.payments.get_payment(customer_id, payment_id)
            if payment.status != PENDING:
                raise BankError("NOT_PENDING", f"payment {payment_id} is {payment.status}")
            self._commit({"type": "bill_payment_cancelled", "ts_ms": self._now(),
                          "payment_id": payment_id})
            return self.payments.bill_payments[payment_id].view()

    def bill_payment_history(self, token: str, frm: str, to: str) -> list[dict]:
        with self._lock:
            _, customer_id = self._customer_session(token)
            return self.payments.history_of(customer_id, parse_date(frm), parse_date(to),
                                            self._now(), payments=True)

    def top_ten_payees(self) -> list[str]:
        with self._lock:
            return self.payments.top_ten_payees()

    # ---------- value-date scheduler ----------

    def admin_run_value_date(self, admin_token: str, business_date: str) -> dict:
        with self._lock:
            self._admin_session(admin_token)
            return self.run_value_date(business_date)

    def run_value_date(self, business_date: str) -> dict:
        """Execute every pending item due on or before business_date.

        Items run in (effective_date, id) order against the evolving
        balances; an item that no longer fits fails with a recorded
        reason. Re-running a processed date is a no-op.
        """
        with self._lock:
            business_date = parse_date(business_date)
            last = self.payments.last_value_date
            if last is not None and business_date < last:
                raise BankError("DATE_REGRESSION",
                                f"{business_date} is before last processed {last}")
            now = self._now()
            due = self.payments.due_items(business_date)
            results = []
            deltas: dict[tuple[str, str], int] = {}
            entry_id = self.ledger.next_entry_id
            for kind, item_id, item in due:
                item_dict = item.to_dict()
                postings = (self._transfer_postings(item_dict) if kind == "transfer"
                            else self._payment_postings(item_dict))
                problem = self.ledger.check_postings(postings, deltas)
                if problem is None:
                    if kind == "transfer":
                        description = (f"Transfer {item.source_account} -> {item.target_account}"
                                       if item.target_kind == "own"
                                       else f"Transfer to {item.target_account}")
                    else:
                        description = (f"Bill payment to {item.corporation} "
                                       f"(bill acct {item.bill_account_no})")
                    entry = {
                        "entry_id": entry_id,
                        "posted_ms": now,
                        "kind": "transfer" if kind == "transfer" else "bill_payment",
                        "description": description,
                        "postings": [p.to_dict() for p in postings],
                    }
                    entry_id += 1
                    for p in postings:
                        key = (p.account_id, p.currency)
                        deltas[key] = deltas.get(key, 0) + p.amount_minor
                    results.append({"kind": kind, "id": item_id, "outcome": "executed",
                                    "entry": entry, "failure_reason": None})
                else:
                    results.append({"kind": kind, "id": item_id, "outcome": "failed",
                                    "entry": None, "failure_reason": problem[0]})

            watermark_moves = last is None or business_date > last
            if results or watermark_moves:
                self._commit({"type": "value_date_run", "ts_ms": now,
                              "business_date": business_date, "results": results})

            notifications = []
            for result in results:
                if result["kind"] == "transfer":
                    email = self.payments.transfers[result["id"]].notify_email
                    if email:
                        notifications.append({"transfer_id": result["id"], "email": email,
                                              "outcome": result["outcome"]})
            return {
                "business_date": business_date,
                "executed": [{"kind": r["kind"], "id": r["id"], "entry_id": r["entry"]["entry_id"]}
                             for r in results if r["outcome"] == "executed"],
                "failed": [{"kind": r["kind"], "id": r["id"], "reason": r["failure_reason"]}
                           for r in results if r["outcome"] == "failed"],
                "executed_count": sum(1 for r in results if r["outcome"] == "executed"),
                "failed_count": sum(1 for r in results if r["outcome"] == "failed"),
                "notifications": notifications,
            }

    # ------------------------------------------------------------------
    # cheque operations
    # ------------------------------------------------------------------

    def cheque_status(self, token: str, account_id: str, cheque_no: str) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            acct = self.ledger.accounts.get(account_id)
            if acct is None or acct.customer_id != customer_id:
                raise BankError("NOT_OWNER", f"{account_id} is not one of your accounts")
            cheque = self.cheques.get_cheque(account_id, cheque_no)
            view = cheque.to_dict()
            view["status_changed_at"] = ms_to_iso(cheque.status_changed_ms) if cheque.status_changed_ms else None
            return view

    def stop_cheque(self, token: str, account_id: str, cheque_no: str) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            acct = self.ledger.accounts.get(account_id)
            if acct is None or acct.customer_id != customer_id:
                raise BankError("NOT_OWNER", f"{account_id} is not one of your accounts")
            cheque = self.cheques.get_cheque(account_id, cheque_no)
            if cheque.status == PAID:
                raise BankError("ALREADY_PAID", f"cheque {cheque_no} was already paid")
            if cheque.status in (STOPPED, RETURNED):
                raise BankError("ALREADY_TERMINAL", f"cheque {cheque_no} is already {cheque.status}")
            self._commit({"type": "cheque_stopped", "ts_ms": self._now(),
                          "account_id": account_id, "cheque_no": cheque_no})
            return {"account_id": account_id, "cheque_no": cheque_no, "status": STOPPED,
                    "message": f"Stop payment placed on cheque {cheque_no}"}

    def request_cheque_book(self, token: str, account_id: str, leaves: int) -> dict:
        with self._lock:
            _, customer_id = self._customer_session(token)
            acct = self._owned_account(customer_id, account_id)
            if acct.kind != "current":
                raise BankError("NOT_CURRENT_ACCOUNT", "cheque books are issued on current accounts only")
            if leaves not in CHEQUE_BOOK_LEAVES:
                raise BankError("INVALID_LEAVES", f"leaves must be one of {CHEQUE_BOOK_LEAVES}")
            now = self._now()
            request = {
                "request_id": self.cheques.next_request_id,
                "account_id": account_id,
                "leaves": leaves,
                "requested_ms": now,
                "status": "queued",
            }
            self._commit({"type": "cheque_book_requested", "ts_ms": now, "request": request})
            return dict(request)

    def admin_dispatch_cheque_book(self, admin_token: str, request_id: int) -> dict:
        with self._lock:
            self._admin_session(admin_token)
            request = self.cheques.get_request(request_id)
            if request.status == "dispatched":
                raise BankError("ALREADY_TERMINAL", f"request {request_id} already dispatched")
            cheque_nos = self.cheques.peek_numbers(request.account_id, request.leaves)
            self._commit({"type": "cheque_book_dispatched", "ts_ms": self._now(),
                          "request_id": request_id, "account_id": request.account_id,
                          "cheque_nos": cheque_nos})
            return {"request_id": request_id, "account_id": request.account_id,
                    "cheque_nos": cheque_nos, "status": "dispatched"}

    def admin_present_cheque(self, admin_token: str, account_id: str, cheque_no: str,
                             amount: Money) -> dict:
        with self._lock:
            self._admin_session(admin_token)
            cheque = self.cheques.get_cheque(account_id, cheque_no)
            if cheque.status == STOPPED:
                raise BankError("CHEQUE_STOPPED", f"cheque {cheque_no} has a stop order")
            if cheque.status == PAID:
                raise BankError("ALREADY_PAID", f"cheque {cheque_no} was already paid")
            if cheque.status == RETURNED:
                raise BankError("ALREADY_TERMINAL", f"cheque {cheque_no} was returned")
            if not amount.is_positive:
                raise BankError("NON_POSITIVE_AMOUNT", "presented amount must be positive")
            now = self._now()
            postings = [
                Posting(account_id, -amount.amount_minor, amount.currency),
                Posting(CLEARING_ACCOUNT, amount.amount_minor, amount.currency),
            ]
            problem = self.ledger.check_postings(postings)
            if problem is not None and problem[0] in ("INSUFFICIENT_FUNDS", "ACCOUNT_CLOSED"):
                self._commit({"type": "cheque_presented", "ts_ms": now,
                              "account_id": account_id, "cheque_no": cheque_no,
                              "outcome": RETURNED, "entry": None})
                return {"account_id": account_id, "cheque_no": cheque_no, "status": RETURNED}
            if problem is not None:
                raise BankError(problem[0], problem[1])
            entry = self.ledger.prepare_entry(
                "cheque", f"Cheque {cheque_no} presented", postings, now)
            self._commit({"type": "cheque_presented", "ts_ms": now,
                          "account_id": account_id, "cheque_no": cheque_no,
                          "outcome": PAID, "entry": entry})
            return {"account_id": account_id, "cheque_no": cheque_no, "status": PAID,
                    "entry_id": entry["entry_id"]}

    # ------------------------------------------------------------------
    # fixtures
    # ------------------------------------------------------------------

    def seed_fixture(self, fixture: dict) -> dict:
        """Load a demo/test fixture: customers with accounts and cheque books.

        Opening balances are explicit fixture choices, posted as deposits
        from the clearing account so conservation holds from the start.
        """
        with self._lock:
            created = []
            for item in fixture.get("customers", []):
                result = self._add_customer(
                    draft=item,
                    username=item["username"],
                    initial_password=item["password"],
                    accounts=item.get("accounts", []),
                    must_change=bool(item.get("must_change", True)),
                )
                created.append(result)
                for book in item.get("cheque_books", []):
                    account_id = result["account_ids"][book.get("account_index", 0)]
                    request = {
                        "request_id": self.cheques.next_request_id,
                        "account_id": account_id,
                        "leaves": book.get("leaves", 25),
                        "requested_ms": self._now(),
                        "status": "queued",
                    }
                    self._commit({"type": "cheque_book_requested", "ts_ms": self._now(),
                                  "request": request})
                    cheque_nos = self.cheques.peek_numbers(account_id, request["leaves"])
                    self._commit({"type": "cheque_book_dispatched", "ts_ms": self._now(),
                                  "request_id": request["request_id"], "account_id": account_id,
                                  "cheque_nos": cheque_nos})
            return {"customers": created}

    # ------------------------------------------------------------------
    # event application (the deterministic state machine)
    # ------------------------------------------------------------------

    def _apply_admin_created(self, event: dict) -> None:
        self.identity.apply_admin(event["credential"])

    def _apply_customer_added(self, event: dict) -> None:
        self.identity.apply_customer(event["customer"], event["credential"])
        for account in event["accounts"]:
            self.ledger.apply_account(account)
        for entry in event["entries"]:
            self.ledger.apply_entry(entry)

    def _apply_customer_cancelled(self, event: dict) -> None:
        self.identity.apply_customer_cancelled(event["customer_id"])
        self.ledger.apply_close_accounts(event["customer_id"])

    def _apply_login_failed(self, event: dict) -> None:
        self.identity.apply_login_failed(event["username"], event["failed_attempts"], event["locked"])

    def _apply_login_succeeded(self, event: dict) -> None:
        self.identity.apply_login_succeeded(event["username"])

    def _apply_password_changed(self, event: dict) -> None:
        self.identity.apply_password_changed(
            event["username"], event["salt_hex"], event["digest_hex"],
            event["kdf_iterations"], event["ts_ms"])

    def _apply_profile_updated(self, event: dict) -> None:
        self.identity.apply_profile_updated(event["customer_id"], event["fields"])

    def _apply_atm_cancelled(self, event: dict) -> None:
        self.identity.apply_atm_cancelled(event["customer_id"])

    def _apply_credential_reinitialized(self, event: dict) -> None:
        self.identity.apply_reinitialized(event["username"])

    def _apply_entry_posted(self, event: dict) -> None:
        self.ledger.apply_entry(event["entry"])

    def _apply_statement_requested(self, event: dict) -> None:
        self.ledger.apply_statement(event["request"])

    def _apply_beneficiary_saved(self, event: dict) -> None:
        self.payments.apply_beneficiary_saved(event["beneficiary"])

    def _apply_beneficiary_updated(self, event: dict) -> None:
        self.payments.apply_beneficiary_updated(event["beneficiary_id"], event["fields"])

    def _apply_beneficiary_deleted(self, event: dict) -> None:
        self.payments.apply_beneficiary_deleted(event["beneficiary_id"])

    def _apply_transfer_created(self, event: dict) -> None:
        self.payments.apply_transfer(event["instruction"])
        if event["entry"] is not None:
            self.ledger.apply_entry(event["entry"])

    def _apply_transfer_cancelled(self, event: dict) -> None:
        self.payments.apply_transfer_cancelled(event["transfer_id"], event["ts_ms"])

    def _apply_biller_registered(self, event: dict) -> None:
        self.payments.apply_registration(event["registration"])

    def _apply_billers_deregistered(self, event: dict) -> None:
        self.payments.apply_deregistered(event["registration_ids"])

    def _apply_bill_payment_created(self, event: dict) -> None:
        self.payments.apply_payment(event["payment"])
        if event["entry"] is not None:
            self.ledger.apply_entry(event["entry"])

    def _apply_bill_payment_cancelled(self, event: dict) -> None:
        self.payments.apply_payment_cancelled(event["payment_id"], event["ts_ms"])

    def _apply_value_date_run(self, event: dict) -> None:
        for result in event["results"]:
            if result["outcome"] == "executed":
                self.ledger.apply_entry(result["entry"])
                self.payments.apply_value_date_result(
                    result["kind"], result["id"], "executed",
                    result["entry"]["entry_id"], None, event["ts_ms"])
            else:
                self.payments.apply_value_date_result(
                    result["kind"], result["id"], "failed",
                    None, result["failure_reason"], event["ts_ms"])
        self.payments.apply_value_date_watermark(event["business_date"])

    def _apply_cheque_book_requested(self, event: dict) -> None:
        self.cheques.apply_book_requested(event["request"])

    def _apply_cheque_book_dispatched(self, event: dict) -> None:
        self.cheques.apply_book_dispatched(event["request_id"], event["account_id"],
                                           event["cheque_nos"])

    def _apply_cheque_stopped(self, event: dict) -> None:
        self.cheques.apply_stopped(event["account_id"], event["cheque_no"], event["ts_ms"])

    def _apply_cheque_presented(self, event: dict) -> None:
        entry = event["entry"]
        if entry is not None:
            self.ledger.apply_entry(entry)
        self.cheques.apply_presented(event["account_id"], event["cheque_no"],
                                     event["outcome"],
                                     entry["entry_id"] if entry else None,
                                     event["ts_ms"])

    _APPLY = {
        "admin_created": _apply_admin_created,
        "customer_added": _apply_customer_added,
        "customer_cancelled": _apply_customer_cancelled,
        "login_failed": _apply_login_failed,
        "login_succeeded": _apply_login_succeeded,
        "password_changed": _apply_password_changed,
        "profile_updated": _apply_profile_updated,
        "atm_cancelled": _apply_atm_cancelled,
        "credential_reinitialized": _apply_credential_reinitialized,
        "entry_posted": _apply_entry_posted,
        "statement_requested": _apply_statement_requested,
        "beneficiary_saved": _apply_beneficiary_saved,
        "beneficiary_updated": _apply_beneficiary_updated,
        "beneficiary_deleted": _apply_beneficiary_deleted,
        "transfer_created": _apply_transfer_created,
        "transfer_cancelled": _apply_transfer_cancelled,
        "biller_registered": _apply_biller_registered,
        "billers_deregistered": _apply_billers_deregistered,
        "bill_payment_created": _apply_bill_payment_created,
        "bill_payment_cancelled": _apply_bill_payment_cancelled,
        "value_date_run": _apply_value_date_run,
        "cheque_book_requested": _apply_cheque_book_requested,
        "cheque_book_dispatched": _apply_cheque_book_dispatched,
        "cheque_stopped": _apply_cheque_stopped,
        "cheque_presented": _apply_cheque_presented,
    }

    # ------------------------------------------------------------------
    # persistence
    # ------------------------------------------------------------------

    def to_state_dict(self) -> dict:
        """Canonical durable state; sessions and TACs are excluded by design."""
        with self._lock:
            return {
                "ledger": self.ledger.to_state_dict(),
                "identity": self.identity.to_state_dict(),
                "payments": self.payments.to_state_dict(),
                "cheques": self.cheques.to_state_dict(),
            }

    def load_state_dict(self, state: dict) -> None:
        with self._lock:
            self.ledger.load_state_dict(state["ledger"])
            self.identity.load_state_dict(state["identity"])
            self.payments.load_state_dict(state["payments"])
            self.cheques.load_state_dict(state["cheques"])

    @classmethod
    def replay(cls, events, clock, **kwargs) -> "Bank":
        bank = cls(clock, **kwargs)
        for event in events:
            bank.apply(event)
        return bank
