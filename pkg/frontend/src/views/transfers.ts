import { ApiClient, Beneficiary } from "../api.js";
import { clear, el, formatMoney, todayIso } from "../dom.js";
import { TransferFormInput, validateTransferForm } from "../validation.js";

/**
 * Transfer Funds: the transfer form (immediate or future-dated, TAC
 * protected), the beneficiary book (max 10), outstanding transfers and
 * transfer history.
 */
export function renderTransfers(root: HTMLElement, api: ApiClient): void {
  clear(root);
  const status = el("p", { class: "status-line" });
  const formBox = el("div", { class: "transfer-form" });
  const bookBox = el("div", { class: "beneficiary-book" });
  const pendingBox = el("div", { class: "pending-transfers" });
  const historyBox = el("div", { class: "transfer-history" });
  root.append(el("h2", {}, ["Transfer Funds"]), status, formBox, bookBox, pendingBox, historyBox);

  let ownAccounts: string[] = [];
  let beneficiaries: Beneficiary[] = [];

  Promise.all([api.accounts(), api.beneficiaries()])
    .then(([accountsView, book]) => {
      ownAccounts = accountsView.accounts.map((a) => a.account_id);
      beneficiaries = book.beneficiaries;
      drawForm();
      drawBook();
      drawPending();
      drawHistory();
    })
    .catch((err) => (status.textContent = err.message));

  function inlineError(name: string, text: string | undefined, form: HTMLElement): void {
    const slot = form.querySelector(`[data-error="${name}"]`) as HTMLElement | null;
    if (slot) slot.textContent = text ?? "";
  }

  function drawForm(): void {
    clear(formBox);
    const source = el("select", { name: "source_account" });
    const targetOwn = el("select", { name: "target_account_id" });
    for (const id of ownAccounts) {
      source.append(el("option", { value: id }, [id]));
      targetOwn.append(el("option", { value: id }, [id]));
    }
    const targetBeneficiary = el("select", { name: "target_beneficiary_id" });
    for (const b of beneficiaries) {
      targetBeneficiary.append(
        el("option", { value: String(b.beneficiary_id) }, [`${b.nickname} (${b.account_no})`]),
      );
    }
    const kindOwn = el("input", { type: "radio", name: "target_kind", value: "own", checked: "" });
    const kindBen = el("input", { type: "radio", name: "target_kind", value: "beneficiary" });
    const amount = el("input", { name: "amount", placeholder: "Amount (without RM)" });
    const date = el("input", { name: "effective_date", value: todayIso() });
    const email = el("input", { name: "notify_email", placeholder: "E-mail (optional)" });
    const tac = el("input", { name: "tac", placeholder: "6-digit TAC" });
    const requestTac = el("button", { type: "button" }, ["Request TAC"]);
    requestTac.addEventListener("click", () => {
      api
        .issueTac()
        .then(({ code }) => {
          // in-band issuance: shown to the user, who keys it back in
          status.textContent = `Your TAC is ${code}`;
        })
        .catch((err) => (status.textContent = err.message));
    });
    const submit = el("button", { type: "submit" }, ["Transfer"]);

    const form = el("form", { id: "transfer-form" }, [
      el("label", {}, ["From ", source, el("span", { "data-error": "source_account", class: "field-error" })]),
      el("label", {}, [kindOwn, " Own account ", targetOwn]),
      el("label", {}, [kindBen, " Beneficiary ", targetBeneficiary]),
      el("span", { "data-error": "target", class: "field-error" }),
      el("label", {}, ["Amount ", amount, el("span", { "data-error": "amount", class: "field-error" })]),
      el("label", {}, ["Effective date ", date, el("span", { "data-error": "effective_date", class: "field-error" })]),
      el("label", {}, ["Notify ", email, el("span", { "data-error": "notify_email", class: "field-error" })]),
      el("label", {}, ["TAC ", tac, requestTac, el("span", { "data-error": "tac", class: "field-error" })]),
      submit,
    ]);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const input: TransferFormInput = {
        source_account: source.value,
        target_kind: kindBen.checked ? "beneficiary" : "own",
        target_account_id: targetOwn.value,
        target_beneficiary_id: targetBeneficiary.value,
        amount: amount.value,
        effective_date: date.value,
        tac: tac.value,
        notify_email: email.value || undefined,
      };
      const { errors, body } = validateTransferForm(input, {
        ownAccounts,
        beneficiaryIds: beneficiaries.map((b) => b.beneficiary_id),
        today: todayIso(),
      });
      for (const field of ["source_account", "target", "amount", "effective_date", "notify_email", "tac"]) {
        inlineError(field, errors[field], form);
      }
      if (!body) return; // invalid: no request is sent
      submit.disabled = true; // no duplicate transfers from double-click
      api
        .createTransfer(body)
        .then((view) => {
          status.textContent =
            view.status === "executed"
              ? `Transfer ${view.transfer_id} executed: ${formatMoney(view.amount)} to ${view.target_account}`
              : `Transfer ${view.transfer_id} scheduled for ${view.effective_date}`;
          drawPending();
          drawHistory();
        })
        .catch((err) => (status.textContent = err.message))
        .finally(() => (submit.disabled = false));
    });
    formBox.append(el("h3", {}, ["Transfer Funds function"]), form);
  }

  function drawBook(): void {
    clear(bookBox);
    bookBox.append(el("h3", {}, [`Saved accounts (${beneficiaries.length}/10)`]));
    const list = el("ul", {});
    for (const b of beneficiaries) {
      const remove = el("button", {}, ["Delete"]);
      remove.addEventListener("click", () => {
        api
          .deleteBeneficiary(b.beneficiary_id)
          .then(() => refreshBook())
          .catch((err) => (status.textContent = err.message));
      });
      list.append(el("li", {}, [`${b.nickname} (${b.account_no}) `, remove]));
    }
    const accountNo = el("input", { placeholder: "Account number" });
    const nickname = el("input", { placeholder: "Nickname" });
    const save = el("button", {}, ["Save beneficiary"]);
    save.addEventListener("click", () => {
      api
        .saveBeneficiary(accountNo.value.trim(), nickname.value.trim())
        .then(() => refreshBook())
        .catch((err) => (status.textContent = err.message));
    });
    bookBox.append(list, el("div", {}, [accountNo, nickname, save]));
  }

  function refreshBook(): void {
    api.beneficiaries().then((book) => {
      beneficiaries = book.beneficiaries;
      drawForm();
      drawBook();
    });
  }

  function drawPending(): void {
    clear(pendingBox);
    pendingBox.append(el("h3", {}, ["Outstanding future transfers"]));
    const table = el("table", { class: "pending" });
    pendingBox.append(table);
    api.pendingTransfers().then(({ transfers }) => {
      for (const t of transfers) {
        const cancel = el("button", {}, ["Cancel"]);
        cancel.addEventListener("click", () => {
          api
            .cancelTransfer(t.transfer_id)
            .then(() => drawPending())
            .catch((err) => (status.textContent = err.message));
        });
        table.append(
          el("tr", {}, [
            el("td", {}, [t.effective_date]),
            el("td", {}, [`${t.source_account} -> ${t.target_account}`]),
            el("td", {}, [formatMoney(t.amount)]),
            el("td", {}, [cancel]),
          ]),
        );
      }
      if (transfers.length === 0) table.append(el("tr", {}, [el("td", {}, ["None"])]));
    });
  }

  function drawHistory(): void {
    clear(historyBox);
    historyBox.append(el("h3", {}, ["Transfer History function"]));
    const table = el("table", { class: "history" });
    historyBox.append(table);
    api.transferHistory().then(({ transfers }) => {
      for (const t of transfers) {
        table.append(
          el("tr", {}, [
            el("td", {}, [t.effective_date]),
            el("td", {}, [`${t.source_account} -> ${t.target_account}`]),
            el("td", {}, [formatMoney(t.amount)]),
            el("td", {}, [t.status]),
          ]),
        );
      }
    });
  }
}
