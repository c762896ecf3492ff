/**
 * Client-side form validation.
 *
 * Strictly weaker-or-equal to the server: anything accepted here
 * serializes into a body the server's schema accepts (the server may
 * still refuse for business reasons such as insufficient funds, which
 * the forms surface inline). Amounts are entered in major units without
 * a currency symbol and converted to integer minor units.
 */

import type { Money, OpenPaymentRequest, TransferRequest } from "./api.js";

export interface TransferFormInput {
  source_account: string;
  target_kind: "own" | "beneficiary";
  target_account_id?: string;
  target_beneficiary_id?: string; // raw select value
  amount: string; // major units, e.g. "125.50"
  effective_date: string;
  tac: string;
  notify_email?: string;
}

export interface OpenPaymentFormInput {
  corporation: string;
  bill_account_no: string;
  holder_name?: string;
  payer_account: string;
  amount: string;
  effective_date: string;
  bill_ref?: string;
}

export type FieldErrors = Record<string, string>;

const DATE_RE = /^\d{4}-\d{2}-\d{2}$/;
const TAC_RE = /^\d{6}$/;

export function parseAmountMinor(text: string): number | null {
  const trimmed = text.trim();
  if (!/^\d+(\.\d{1,2})?$/.test(trimmed)) return null;
  const [units, cents = ""] = trimmed.split(".");
  const minor = Number(units) * 100 + Number(cents.padEnd(2, "0") || "0");
  if (!Number.isSafeInteger(minor)) return null;
  return minor;
}

export function isIsoDate(text: string): boolean {
  if (!DATE_RE.test(text)) return false;
  const parsed = new Date(`${text}T00:00:00Z`);
  return !Number.isNaN(parsed.getTime()) && parsed.toISOString().slice(0, 10) === text;
}

function checkCommonMoneyAndDate(
  amount: string,
  effectiveDate: string,
  today: string,
  errors: FieldErrors,
): number | null {
  const minor = parseAmountMinor(amount);
  if (minor === null) {
    errors.amount = "Enter the amount in ringgit, e.g. 125.50 (without RM)";
  } else if (minor <= 0) {
    errors.amount = "Amount must be greater than zero";
  }
  if (!isIsoDate(effectiveDate)) {
    errors.effective_date = "Enter the date as YYYY-MM-DD";
  } else if (effectiveDate < today) {
    errors.effective_date = "Effective date cannot be in the past";
  }
  return minor;
}

export function validateTransferForm(
  input: TransferFormInput,
  context: { ownAccounts: string[]; beneficiaryIds: number[]; today: string },
): { errors: FieldErrors; body: TransferRequest | null } {
  const errors: FieldErrors = {};
  if (!context.ownAccounts.includes(input.source_account)) {
    errors.source_account = "Choose one of your own accounts";
  }
  let targetAccountId: string | undefined;
  let targetBeneficiaryId: number | undefined;
  if (input.target_kind === "own") {
    if (!input.target_account_id || !context.ownAccounts.includes(input.target_account_id)) {
      errors.target = "Choose one of your own accounts as the target";
    } else if (input.target_account_id === input.source_account) {
      errors.target = "Source and target must differ";
    } else {
      targetAccountId = input.target_account_id;
    }
  } else {
    const id = Number(input.target_beneficiary_id);
    if (!Number.isInteger(id) || !context.beneficiaryIds.includes(id)) {
      errors.target = "Choose a saved beneficiary";
    } else {
      targetBeneficiaryId = id;
    }
  }
  const minor = checkCommonMoneyAndDate(input.amount, input.effective_date, context.today, errors);
  if (!TAC_RE.test(input.tac.trim())) {
    errors.tac = "The TAC is the 6-digit code you requested";
  }
  const email = input.notify_email?.trim();
  if (email && !email.includes("@")) {
    errors.notify_email = "Enter a valid e-mail address or leave it empty";
  }
  if (Object.keys(errors).length > 0 || minor === null) {
    return { errors, body: null };
  }
  const amount: Money = { amount_minor: minor, currency: "MYR" };
  const body: TransferRequest = {
    source_account: input.source_account,
    amount,
    effective_date: input.effective_date,
    tac: input.tac.trim(),
  };
  if (targetAccountId !== undefined) body.target_account_id = targetAccountId;
  if (targetBeneficiaryId !== undefined) body.target_beneficiary_id = targetBeneficiaryId;
  if (email) body.notify_email = email;
  return { errors, body };
}

export function validateOpenPaymentForm(
  input: OpenPaymentFormInput,
  context: { ownAccounts: string[]; today: string },
): { errors: FieldErrors; body: OpenPaymentRequest | null } {
  const errors: FieldErrors = {};
  if (!input.corporation.trim()) {
    errors.corporation = "Select a corporation from the list or write the payee name";
  }
  if (!input.bill_account_no.trim()) {
    errors.bill_account_no = "Enter your bill account number";
  }
  if (!context.ownAccounts.includes(input.payer_account)) {
    errors.payer_account = "Choose the account to debit";
  }
  const minor = checkCommonMoneyAndDate(input.amount, input.effective_date, context.today, errors);
  if (Object.keys(errors).length > 0 || minor === null) {
    return { errors, body: null };
  }
  const body: OpenPaymentRequest = {
    corporation: input.corporation.trim(),
    bill_account_no: input.bill_account_no.trim(),
    payer_account: input.payer_account,
    amount: { amount_minor: minor, currency: "MYR" },
    effective_date: input.effective_date,
  };
  const holder = input.holder_name?.trim();
  if (holder) body.holder_name = holder;
  const ref = input.bill_ref?.trim();
  if (ref) body.bill_ref = ref;
  return { errors, body };
}

export function validatePasswordForm(
  icPassportNo: string,
  newPassword: string,
  minLength = 8,
): FieldErrors {
  const errors: FieldErrors = {};
  if (!icPassportNo.trim()) errors.ic_passport_no = "Enter your IC/Passport number";
  if (newPassword.length < minLength) {
    errors.new_password = `Password must be at least ${minLength} characters`;
  }
  return errors;
}
