import { ApiClient } from "../api.js";
import { clear, el } from "../dom.js";

/** Cheque Services: status enquiry, stop payment, cheque book request. */
export function renderCheques(root: HTMLElement, api: ApiClient): void {
  clear(root);
  const status = el("p", { class: "status-line" });
  root.append(el("h2", {}, ["Cheque Services"]), status);

  const accountSelect = el("select", { name: "account_id" });
  api.accounts().then(({ accounts }) => {
    for (const account of accounts) {
      accountSelect.append(el("option", { value: account.account_id }, [account.account_id]));
    }
  });

  const chequeNo = el("input", { placeholder: "Cheque number" });
  const enquire = el("button", {}, ["Enquire status"]);
  enquire.addEventListener("click", () => {
    api
      .chequeStatus(chequeNo.value.trim(), accountSelect.value)
      .then((view) => {
        status.textContent = `Cheque ${view.cheque_no} is ${view.status}` +
          (view.paid_entry_id ? ` (entry ${view.paid_entry_id})` : "");
      })
      .catch((err) => (status.textContent = err.message));
  });

  const stop = el("button", {}, ["Stop cheque payment"]);
  stop.addEventListener("click", () => {
    api
      .stopCheque(chequeNo.value.trim(), accountSelect.value)
      .then((view) => (status.textContent = view.message))
      .catch((err) => (status.textContent = err.message));
  });

  const leaves = el("select", {}, [
    el("option", { value: "25" }, ["25 leaves"]),
    el("option", { value: "50" }, ["50 leaves"]),
  ]);
  const requestBook = el("button", {}, ["Request cheque book"]);
  requestBook.addEventListener("click", () => {
    api
      .requestChequeBook(accountSelect.value, Number(leaves.value))
      .then((view) => (status.textContent = `Cheque book request ${view.request_id} is ${view.status}`))
      .catch((err) => (status.textContent = err.message));
  });

  root.append(
    el("div", { class: "cheque-form" }, [
      el("label", {}, ["Account ", accountSelect]),
      el("label", {}, ["Cheque number ", chequeNo]),
      enquire,
      stop,
    ]),
    el("div", { class: "cheque-book" }, [el("label", {}, ["Book size ", leaves]), requestBook]),
  );
}
