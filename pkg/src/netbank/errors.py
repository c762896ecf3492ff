"""Stable error codes shared by the domain modules and the HTTP layer.

Every failure surfaced to a caller is a BankError carrying one code from
the closed set below. The HTTP layer maps codes to statuses with
ERROR_STATUS and renders the envelope {ok: false, error: {...}}.
"""

from __future__ import annotations

# Response texts rendered verbatim by clients. Do not reword.
INVALID_LOGIN_TEXT = "Alert Invalid Username and Password"
WELCOME_TEXT = (
    "welcome to the internet banking system "
    "please click on the left menu bar to choose your option!"
)
LOGOUT_TEXT = "You have been logged out successfully"
LOCKED_TEXT = (
    "Account locked after repeated failed log-on attempts. "
    "You must contact the Bank in order to be re-initialized."
)
VIEW_ACCOUNT_TEXT = "Please click on the respective account/card types for more details."
CONFIRM_TEXT = "Confirm"

# Closed code set. Adding a code here is an API change; handlers must not
# invent codes outside this table.
ERROR_STATUS: dict[str, int] = {
    # ledger
    "UNBALANCED": 422,
    "INSUFFICIENT_FUNDS": 409,
    "ACCOUNT_CLOSED": 409,
    "CURRENCY_MISMATCH": 422,
    "OVER_LIMIT": 409,
    "UNKNOWN_ACCOUNT": 404,
    "INVALID_RANGE": 422,
    "INVALID_CHANNEL": 422,
    # identity / sessions
    "INVALID_CREDENTIALS": 401,
    "LOCKED": 423,
    "CUSTOMER_CANCELLED": 403,
    "SESSION_EXPIRED": 440,
    "UNAUTHENTICATED": 401,
    "IC_MISMATCH": 403,
    "POLICY_VIOLATION": 422,
    "PASSWORD_CHANGE_REQUIRED": 403,
    "INVALID_FIELD": 422,
    "ALREADY_CANCELLED": 409,
    "NOT_ADMIN": 403,
    "UNKNOWN_USER": 404,
    "DUPLICATE_USERNAME": 409,
    "UNKNOWN_CUSTOMER": 404,
    # payments
    "LIMIT_EXCEEDED": 409,
    "DUPLICATE_BENEFICIARY": 409,
    "UNKNOWN_BENEFICIARY": 404,
    "INVALID_TAC": 403,
    "SAME_ACCOUNT": 422,
    "NON_POSITIVE_AMOUNT": 422,
    "PAST_DATE": 422,
    "NOT_OWNER": 403,
    "NOT_PENDING": 409,
    "UNKNOWN_TRANSFER": 404,
    "UNKNOWN_REGISTRATION": 404,
    "DUPLICATE_REGISTRATION": 409,
    "UNKNOWN_PAYMENT": 404,
    "DATE_REGRESSION": 409,
    # cheques
    "UNKNOWN_CHEQUE": 404,
    "ALREADY_PAID": 409,
    "ALREADY_TERMINAL": 409,
    "NOT_CURRENT_ACCOUNT": 422,
    "INVALID_LEAVES": 422,
    "CHEQUE_STOPPED": 409,
    # persistence
    "STORAGE_FAILURE": 503,
    "CORRUPT_JOURNAL": 500,
    "CORRUPT_SNAPSHOT": 500,
    "NO_BASE": 409,
    "TARGET_UNWRITABLE": 503,
    "VERIFY_FAILED": 500,
    # http plumbing
    "UNKNOWN_ROUTE": 404,
    "SCHEMA_VIOLATION": 422,
}

_DEFAULT_MESSAGES = {
    "INVALID_CREDENTIALS": INVALID_LOGIN_TEXT,
    "LOCKED": LOCKED_TEXT,
    "SESSION_EXPIRED": "Session expired. Please log on again.",
    "UNAUTHENTICATED": "A valid session token is required.",
}


class BankError(Exception):
    """Domain failure with a stable machine code.

    `details` carries structured context (offending field, account id,
    violated policy rules, ...) and is serialized into API error bodies.
    """

    def __init__(self, code: str, message: str | None = None, **details):
        if code not in ERROR_STATUS:
            raise ValueError(f"unknown error code: {code}")
        self.code = code
        self.message = message or _DEFAULT_MESSAGES.get(code, code.replace("_", " ").capitalize())
        self.http_status = ERROR_STATUS[code]
        self.details = details
        super().__init__(f"{code}: {self.message}")

    def to_dict(self) -> dict:
        body = {"code": self.code, "message": self.message, "http_status": self.http_status}
        if self.details:
            body["details"] = self.details
        return body
