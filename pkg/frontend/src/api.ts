/**
 * Typed client for the bank's JSON routes.
 *
 * Every response uses the envelope {ok, data} / {ok: false, error}.
 * Failures become ApiError with the server's stable code; transport
 * problems become code "NETWORK_FAILURE" so callers can offer a retry
 * without treating the session as lost.
 */

export interface Money {
  amount_minor: number;
  currency: string;
}

export interface SessionMeta {
  remaining_s: number;
  warn: boolean;
}

export interface LoginResult {
  token: string;
  message: string;
  must_change: boolean;
  customer_id: string | null;
  is_admin: boolean;
  idle_timeout_s: number;
}

export interface AccountView {
  account_id: string;
  kind: string;
  status: string;
  currency: string;
  balance: Money;
  amount_owed?: Money;
  credit_limit?: Money;
}

export interface Beneficiary {
  beneficiary_id: number;
  account_no: string;
  nickname: string;
}

export interface BillerRegistration {
  registration_id: number;
  corporation: string;
  bill_account_no: string;
  holder_name: string;
}

export interface TransferView {
  transfer_id: number;
  status: string;
  effective_date: string;
  amount: Money;
  source_account: string;
  target_account: string;
}

export interface PaymentView {
  payment_id: number;
  status: string;
  corporation: string;
  effective_date: string;
  amount: Money;
}

export interface TransferRequest {
  source_account: string;
  amount: Money;
  effective_date: string;
  tac: string;
  target_account_id?: string;
  target_beneficiary_id?: number;
  notify_email?: string;
}

export interface OpenPaymentRequest {
  corporation: string;
  bill_account_no: string;
  payer_account: string;
  amount: Money;
  effective_date: string;
  holder_name?: string;
  bill_ref?: string;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public httpStatus: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  token: string | null = null;
  lastSession: SessionMeta | null = null;

  constructor(private base: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    opts: { auth?: boolean } = {},
  ): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (opts.auth !== false && this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    let response: Response;
    try {
      response = await fetch(this.base + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError("NETWORK_FAILURE", String(err), 0);
    }
    let payload: any;
    try {
      payload = await response.json();
    } catch {
      throw new ApiError("NETWORK_FAILURE", "response was not JSON", response.status);
    }
    if (payload && payload.session) {
      this.lastSession = payload.session as SessionMeta;
    }
    if (!response.ok || payload.ok === false) {
      const error = payload.error ?? { code: "HTTP_ERROR", message: response.statusText };
      throw new ApiError(error.code, error.message, response.status);
    }
    return payload.data as T;
  }

  // session
  login(username: string, password: string): Promise<LoginResult> {
    return this.request<LoginResult>("POST", "/login", { username, password }, { auth: false });
  }
  heartbeat(): Promise<SessionMeta> {
    return this.request<SessionMeta>("GET", "/session/heartbeat");
  }
  continueSession(): Promise<SessionMeta> {
    return this.request<SessionMeta>("POST", "/session/continue");
  }
  logout(): Promise<{ message: string }> {
    return this.request<{ message: string }>("POST", "/logout");
  }
  changePassword(icPassportNo: string, newPassword: string): Promise<{ changed: boolean }> {
    return this.request("POST", "/password", {
      ic_passport_no: icPassportNo,
      new_password: newPassword,
    });
  }

  // accounts
  accounts(): Promise<{ message: string; accounts: AccountView[] }> {
    return this.request("GET", "/accounts");
  }
  history(accountId: string, from: string, to: string): Promise<{ entries: any[] }> {
    const query = `?from=${encodeURIComponent(from)}&to=${encodeURIComponent(to)}`;
    return this.request("GET", `/accounts/${encodeURIComponent(accountId)}/history${query}`);
  }
  requestStatement(accountId: string, channel: string): Promise<any> {
    return this.request("POST", "/statements", { account_id: accountId, channel });
  }

  // profile / utility
  updateProfile(fields: Record<string, string>): Promise<any> {
    return this.request("PUT", "/profile", fields);
  }
  cancelAtm(): Promise<{ atm_enabled: boolean }> {
    return this.request("DELETE", "/atm");
  }

  // beneficiaries
  beneficiaries(): Promise<{ beneficiaries: Beneficiary[] }> {
    return this.request("GET", "/beneficiaries");
  }
  saveBeneficiary(accountNo: string, nickname: string): Promise<Beneficiary> {
    return this.request("POST", "/beneficiaries", { account_no: accountNo, nickname });
  }
  deleteBeneficiary(id: number): Promise<any> {
    return this.request("DELETE", `/beneficiaries/${id}`);
  }

  // transfers
  issueTac(): Promise<{ code: string; ttl_s: number }> {
    return this.request("POST", "/tac");
  }
  createTransfer(body: TransferRequest): Promise<TransferView> {
    return this.request("POST", "/transfers", body);
  }
  pendingTransfers(): Promise<{ transfers: TransferView[] }> {
    return this.request("GET", "/transfers/pending");
  }
  cancelTransfer(id: number): Promise<TransferView> {
    return this.request("POST", `/transfers/${id}/cancel`);
  }
  transferHistory(): Promise<{ transfers: TransferView[] }> {
    return this.request("GET", "/transfers/history");
  }

  // bill payments
  billers(): Promise<{ registrations: BillerRegistration[] }> {
    return this.request("GET", "/billers");
  }
  registerBiller(corporation: string, billAccountNo: string, holderName: string): Promise<BillerRegistration> {
    return this.request("POST", "/billers", {
      corporation,
      bill_account_no: billAccountNo,
      holder_name: holderName,
    });
  }
  deregisterBillers(ids: number[]): Promise<{ removed: number[] }> {
    return this.request("POST", "/billers/deregister", { registration_ids: ids });
  }
  payRegistered(registrationId: number, payerAccount: string, amount: Money,
                effectiveDate: string, billRef?: string): Promise<{ message: string; payment: PaymentView }> {
    return this.request("POST", "/payments/registered", {
      registration_id: registrationId,
      payer_account: payerAccount,
      amount,
      effective_date: effectiveDate,
      bill_ref: billRef,
    });
  }
  openPayment(body: OpenPaymentRequest): Promise<{ message: string; payment: PaymentView }> {
    return this.request("POST", "/payments/open", body);
  }
  pendingPayments(): Promise<{ payments: PaymentView[] }> {
    return this.request("GET", "/payments/pending");
  }
  cancelPayment(id: number): Promise<PaymentView> {
    return this.request("POST", `/payments/${id}/cancel`);
  }
  paymentHistory(): Promise<{ payments: PaymentView[] }> {
    return this.request("GET", "/payments/history");
  }
  topTenPayees(): Promise<{ payees: string[] }> {
    return this.request("GET", "/payees/top-ten", undefined, { auth: false });
  }

  // cheques
  chequeStatus(chequeNo: string, accountId: string): Promise<any> {
    return this.request("GET", `/cheques/${encodeURIComponent(chequeNo)}?account_id=${encodeURIComponent(accountId)}`);
  }
  stopCheque(chequeNo: string, accountId: string): Promise<any> {
    return this.request("POST", `/cheques/${encodeURIComponent(chequeNo)}/stop`, { account_id: accountId });
  }
  requestChequeBook(accountId: string, leaves: number): Promise<any> {
    return this.request("POST", "/cheque-books", { account_id: accountId, leaves });
  }
}
