"""JSON-over-HTTP face of the bank.

Every route delegates to exactly one Bank operation. Success bodies are
{ok: true, data: ...}; failures are {ok: false, error: {code, message}}.
Authenticated responses carry session metadata (remaining_s, warn) both
in the envelope and as X-Session-* headers so clients can render the
idle-timeout warning.

Unauthenticated routes: POST /login, GET /health, GET /payees/top-ten.
Every other call requires "Authorization: Bearer <token>" and refreshes
the session's activity clock - except GET /session/heartbeat, which is a
deliberate read-only probe.
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict
from starlette.exceptions import HTTPException as StarletteHTTPException

from .bank import Bank
from .clock import ms_to_date
from .errors import BankError
from .money import Money

# Routes a customer may still use while a password change is being forced.
MUST_CHANGE_ALLOWED = {"/password", "/logout", "/session/continue", "/session/heartbeat"}


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MoneyBody(_Body):
    amount_minor: int
    currency: str = "MYR"

    def to_money(self) -> Money:
        try:
            return Money(self.amount_minor, self.currency)
        except (TypeError, ValueError) as exc:
            raise BankError("SCHEMA_VIOLATION", str(exc)) from exc


class LoginBody(_Body):
    username: str
    password: str


class PasswordBody(_Body):
    ic_passport_no: str
    new_password: str


class ProfileBody(_Body):
    email: str | None = None
    postal_address: str | None = None
    phone: str | None = None
    secure_delivery_contact: str | None = None


class BeneficiaryBody(_Body):
    account_no: str
    nickname: str = ""


class BeneficiaryUpdateBody(_Body):
    account_no: str | None = None
    nickname: str | None = None


class TransferBody(_Body):
    source_account: str
    amount: MoneyBody
    effective_date: str
    tac: str
    target_account_id: str | None = None
    target_beneficiary_id: int | None = None
    notify_email: str | None = None


class BillerBody(_Body):
    corporation: str
    bill_account_no: str
    holder_name: str = ""


class DeregisterBody(_Body):
    registration_ids: list[int]


class RegisteredPaymentBody(_Body):
    registration_id: int
    payer_account: str
    amount: MoneyBody
    effective_date: str
    bill_ref: str | None = None


class OpenPaymentBody(_Body):
    corporation: str
    bill_account_no: str
    payer_account: str
    amount: MoneyBody
    effective_date: str
    holder_name: str = ""
    bill_ref: str | None = None


class StopChequeBody(_Body):
    account_id: str


class ChequeBookBody(_Body):
    account_id: str
    leaves: int


class StatementBody(_Body):
    account_id: str
    channel: str


class AccountDraft(_Body):
    kind: str
    currency: str = "MYR"
    credit_limit_minor: int = 0
    opening_minor: int = 0
    owed_minor: int = 0
    account_id: str | None = None


class CustomerDraft(_Body):
    full_name: str
    ic_passport_no: str
    email: str = ""
    postal_address: str = ""
    phone: str = ""
    secure_delivery_contact: str = ""
    atm_enabled: bool = True


class AdminCustomerBody(_Body):
    customer: CustomerDraft
    username: str
    initial_password: str
    accounts: list[AccountDraft] = []
    must_change: bool = True


class PresentChequeBody(_Body):
    account_id: str
    cheque_no: str
    amount: MoneyBody


class RunValueDateBody(_Body):
    business_date: str


def _bearer_token(request: Request) -> str:
    header = request.headers.get("authorization", "")
    if not header.lower().startswith("bearer ") or not header[7:].strip():
        raise BankError("UNAUTHENTICATED", "missing bearer token")
    return header[7:].strip()


def _respond(data, ctx: dict | None = None, status_code: int = 200) -> JSONResponse:
    body = {"ok": True, "data": data}
    headers = {}
    if ctx is not None:
        body["session"] = {"remaining_s": ctx["remaining_s"], "warn": ctx["warn"]}
        headers["X-Session-Remaining-S"] = str(ctx["remaining_s"])
        headers["X-Session-Warn"] = "true" if ctx["warn"] else "false"
    return JSONResponse(body, status_code=status_code, headers=headers)


def create_app(bank: Bank) -> FastAPI:
    app = FastAPI(title="netbank", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.bank = bank
    app.state.started_ms = bank.clock.now_ms()

    def auth(request: Request) -> dict:
        token = _bearer_token(request)
        ctx = bank.authorize(token)
        ctx["token"] = token
        if ctx["must_change"] and request.url.path not in MUST_CHANGE_ALLOWED:
            raise BankError("PASSWORD_CHANGE_REQUIRED",
                            "password change required before other functions are available")
        return ctx

    @app.exception_handler(BankError)
    async def bank_error(request: Request, exc: BankError):
        return JSONResponse({"ok": False, "error": exc.to_dict()}, status_code=exc.http_status)

    @app.exception_handler(RequestValidationError)
    async def invalid_body(request: Request, exc: RequestValidationError):
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        error = BankError("SCHEMA_VIOLATION", detail or "request body is not schema-valid")
        return JSONResponse({"ok": False, "error": error.to_dict()}, status_code=422)

    @app.exception_handler(StarletteHTTPException)
    async def unknown_route(request: Request, exc: StarletteHTTPException):
        if exc.status_code in (404, 405):
            error = BankError("UNKNOWN_ROUTE", f"no such route: {request.url.path}")
            return JSONResponse({"ok": False, "error": error.to_dict()}, status_code=404)
        return JSONResponse(
            {"ok": False, "error": {"code": "HTTP_ERROR", "message": str(exc.detail)}},
            status_code=exc.status_code,
        )

    # ---------- unauthenticated ----------

    @app.get("/health")
    def health():
        journal = bank.journal
        healthy = journal.healthy if journal is not None else True
        seq = journal.last_seq if journal is not None else bank.events_applied
        uptime_s = max(0, (bank.clock.now_ms() - app.state.started_ms) // 1000)
        body = {"status": "ok" if healthy else "failing", "uptime_s": uptime_s, "journal_seq": seq}
        return JSONResponse({"ok": healthy, "data": body}, status_code=200 if healthy else 503)

    @app.post("/login")
    def login(body: LoginBody):
        result = bank.login(body.username, body.password)
        meta = {"remaining_s": result["idle_timeout_s"], "warn": False}
        return _respond(result, meta)

    @app.get("/payees/top-ten")
    def top_ten():
        return _respond({"payees": bank.top_ten_payees()})

    # ---------- session ----------

    @app.get("/session/heartbeat")
    def heartbeat(request: Request):
        token = _bearer_token(request)
        return _respond(bank.heartbeat(token))

    @app.post("/session/continue")
    def session_continue(request: Request):
        token = _bearer_token(request)
        return _respond(bank.acknowledge_continue(token))

    @app.post("/logout")
    def logout(request: Request):
        token = _bearer_token(request)
        return _respond(bank.logout(token))

    @app.post("/password")
    def change_password(body: PasswordBody, ctx: dict = Depends(auth)):
        return _respond(bank.change_password(ctx["token"], body.ic_passport_no, body.new_password), ctx)

    # ---------- accounts ----------

    @app.get("/accounts")
    def accounts(ctx: dict = Depends(auth)):
        return _respond(bank.accounts_view(ctx["token"]), ctx)

    @app.get("/accounts/{account_id}/history")
    def account_history(account_id: str, ctx: dict = Depends(auth),
                        frm: str | None = Query(default=None, alias="from"),
                        to: str | None = Query(default=None)):
        frm, to = _default_window(bank, frm, to)
        return _respond({"entries": bank.account_history(ctx["token"], account_id, frm, to)}, ctx)

    @app.post("/statements")
    def request_statement(body: StatementBody, ctx: dict = Depends(auth)):
        return _respond(bank.request_statement(ctx["token"], body.account_id, body.channel), ctx)

    # ---------- profile / utility ----------

    @app.put("/profile")
    def update_profile(body: ProfileBody, ctx: dict = Depends(auth)):
        fields = {k: v for k, v in body.model_dump().items() if v is not None}
        return _respond(bank.update_profile(ctx["token"], fields), ctx)

    @app.delete("/atm")
    def cancel_atm(ctx: dict = Depends(auth)):
        return _respond(bank.cancel_atm(ctx["token"]), ctx)

    # ---------- beneficiaries ----------

    @app.get("/beneficiaries")
    def list_beneficiaries(ctx: dict = Depends(auth)):
        return _respond({"beneficiaries": bank.list_beneficiaries(ctx["token"])}, ctx)

    @app.post("/beneficiaries")
    def save_beneficiary(body: BeneficiaryBody, ctx: dict = Depends(auth)):
        return _respond(bank.save_beneficiary(ctx["token"], body.account_no, body.nickname), ctx)

    @app.put("/beneficiaries/{beneficiary_id}")
    def update_beneficiary(beneficiary_id: int, body: BeneficiaryUpdateBody, ctx: dict = Depends(auth)):
        fields = {k: v for k, v in body.model_dump().items() if v is not None}
        return _respond(bank.update_beneficiary(ctx["token"], beneficiary_id, fields), ctx)

    @app.delete("/beneficiaries/{beneficiary_id}")
    def delete_beneficiary(beneficiary_id: int, ctx: dict = Depends(auth)):
        return _respond(bank.delete_beneficiary(ctx["token"], beneficiary_id), ctx)

    # ---------- transfers ----------

    @app.post("/tac")
    def issue_tac(ctx: dict = Depends(auth)):
        return _respond(bank.issue_tac(ctx["token"]), ctx)

    @app.post("/transfers")
    def create_transfer(body: TransferBody, ctx: dict = Depends(auth)):
        result = bank.create_transfer(
            ctx["token"], body.source_account, body.amount.to_money(),
            body.effective_date, body.tac,
            target_account_id=body.target_account_id,
            target_beneficiary_id=body.target_beneficiary_id,
            notify_email=body.notify_email,
        )
        return _respond(result, ctx)

    @app.get("/transfers/pending")
    def pending_transfers(ctx: dict = Depends(auth)):
        return _respond({"transfers": bank.pending_transfers(ctx["token"])}, ctx)

    @app.post("/transfers/{transfer_id}/cancel")
    def cancel_transfer(transfer_id: int, ctx: dict = Depends(auth)):
        return _respond(bank.cancel_pending_transfer(ctx["token"], transfer_id), ctx)

    @app.get("/transfers/history")
    def transfer_history(ctx: dict = Depends(auth),
                         frm: str | None = Query(default=None, alias="from"),
                         to: str | None = Query(default=None)):
        frm, to = _default_window(bank, frm, to)
        return _respond({"transfers": bank.transfer_history(ctx["token"], frm, to)}, ctx)

    # ---------- bill payments ----------

    @app.get("/billers")
    def list_billers(ctx: dict = Depends(auth)):
        return _respond({"registrations": bank.list_registrations(ctx["token"])}, ctx)

    @app.post("/billers")
    def register_biller(body: BillerBody, ctx: dict = Depends(auth)):
        return _respond(
            bank.register_biller(ctx["token"], body.corporation, body.bill_account_no, body.holder_name),
            ctx,
        )

    @app.post("/billers/deregister")
    def deregister_billers(body: DeregisterBody, ctx: dict = Depends(auth)):
        return _respond(bank.deregister_billers(ctx["token"], body.registration_ids), ctx)

    @app.post("/payments/registered")
    def pay_registered(body: RegisteredPaymentBody, ctx: dict = Depends(auth)):
        result = bank.pay_registered(
            ctx["token"], body.registration_id, body.payer_account,
            body.amount.to_money(), body.effective_date, body.bill_ref,
        )
        return _respond(result, ctx)

    @app.post("/payments/open")
    def open_payment(body: OpenPaymentBody, ctx: dict = Depends(auth)):
        result = bank.open_payment(
            ctx["token"], body.corporation, body.bill_account_no, body.holder_name,
            body.payer_account, body.amount.to_money(), body.effective_date, body.bill_ref,
        )
        return _respond(result, ctx)

    @app.get("/payments/pending")
    def pending_payments(ctx: dict = Depends(auth)):
        return _respond({"payments": bank.enquire_future_payments(ctx["token"])}, ctx)

    @app.post("/payments/{payment_id}/cancel")
    def cancel_payment(payment_id: int, ctx: dict = Depends(auth)):
        return _respond(bank.cancel_future_payment(ctx["token"], payment_id), ctx)

    @app.get("/payments/history")
    def payment_history(ctx: dict = Depends(auth),
                        frm: str | None = Query(default=None, alias="from"),
                        to: str | None = Query(default=None)):
        frm, to = _default_window(bank, frm, to)
        return _respond({"payments": bank.bill_payment_history(ctx["token"], frm, to)}, ctx)

    # ---------- cheques ----------

    @app.get("/cheques/{cheque_no}")
    def cheque_status(cheque_no: str, account_id: str, ctx: dict = Depends(auth)):
        return _respond(bank.cheque_status(ctx["token"], account_id, cheque_no), ctx)

    @app.post("/cheques/{cheque_no}/stop")
    def stop_cheque(cheque_no: str, body: StopChequeBody, ctx: dict = Depends(auth)):
        return _respond(bank.stop_cheque(ctx["token"], body.account_id, cheque_no), ctx)

    @app.post("/cheque-books")
    def request_cheque_book(body: ChequeBookBody, ctx: dict = Depends(auth)):
        return _respond(bank.request_cheque_book(ctx["token"], body.account_id, body.leaves), ctx)

    # ---------- administrator ----------

    @app.post("/admin/customers")
    def admin_add_customer(body: AdminCustomerBody, ctx: dict = Depends(auth)):
        result = bank.admin_add_customer(
            ctx["token"], body.customer.model_dump(), body.username, body.initial_password,
            [a.model_dump() for a in body.accounts], must_change=body.must_change,
        )
        return _respond(result, ctx)

    @app.post("/admin/customers/{customer_id}/cancel")
    def admin_cancel_customer(customer_id: str, ctx: dict = Depends(auth)):
        return _respond(bank.admin_cancel_customer(ctx["token"], customer_id), ctx)

    @app.post("/admin/credentials/{username}/reinitialize")
    def admin_reinitialize(username: str, ctx: dict = Depends(auth)):
        return _respond(bank.admin_reinitialize(ctx["token"], username), ctx)

    @app.post("/admin/cheques/present")
    def admin_present_cheque(body: PresentChequeBody, ctx: dict = Depends(auth)):
        result = bank.admin_present_cheque(
            ctx["token"], body.account_id, body.cheque_no, body.amount.to_money())
        return _respond(result, ctx)

    @app.post("/admin/cheque-books/{request_id}/dispatch")
    def admin_dispatch_cheque_book(request_id: int, ctx: dict = Depends(auth)):
        return _respond(bank.admin_dispatch_cheque_book(ctx["token"], request_id), ctx)

    @app.post("/admin/run-value-date")
    def admin_run_value_date(body: RunValueDateBody, ctx: dict = Depends(auth)):
        return _respond(bank.admin_run_value_date(ctx["token"], body.business_date), ctx)

    @app.get("/admin/transactions")
    def admin_transactions(ctx: dict = Depends(auth), offset: int = 0, limit: int = 100):
        return _respond(bank.admin_transactions(ctx["token"], offset, limit), ctx)

    return app


def _default_window(bank: Bank, frm: str | None, to: str | None) -> tuple[str, str]:
    """History windows default to the last 90 days."""
    now = bank.clock.now_ms()
    if to is None:
        to = ms_to_date(now)
    if frm is None:
        frm = ms_to_date(now - 90 * 86_400_000)
    return frm, to
