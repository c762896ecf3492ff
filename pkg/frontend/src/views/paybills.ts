import { ApiClient } from "../api.js";
import { clear, el, formatMoney, todayIso } from "../dom.js";
import { OpenPaymentFormInput, validateOpenPaymentForm } from "../validation.js";

/**
 * Pay Bills: the four functions (Registered Payment, Open Payment,
 * Registration/Deregistration, Bill Payment History) plus future-payment
 * enquiry and cancellation.
 */
export function renderPayBills(root: HTMLElement, api: ApiClient): void {
  clear(root);
  const status = el("p", { class: "status-line" });
  const menu = el("nav", { class: "billpay-menu" });
  const pane = el("div", { class: "billpay-pane" });
  root.append(el("h2", {}, ["Pay Bills"]), status, menu, pane);

  const sections: [string, () => void][] = [
    ["Registered Payment", drawRegisteredPayment],
    ["Open Payment", drawOpenPayment],
    ["Registration / Deregistration", drawRegistration],
    ["Bill Payment History", drawHistory],
  ];
  for (const [label, draw] of sections) {
    const button = el("button", { class: "billpay-entry" }, [label]);
    button.addEventListener("click", draw);
    menu.append(button);
  }
  drawRegisteredPayment();

  let ownAccounts: string[] = [];
  const accountsReady = api.accounts().then(({ accounts }) => {
    ownAccounts = accounts.map((a) => a.account_id);
  });

  function accountSelect(): HTMLSelectElement {
    const select = el("select", { name: "payer_account" });
    void accountsReady.then(() => {
      for (const id of ownAccounts) select.append(el("option", { value: id }, [id]));
    });
    return select;
  }

  function drawRegisteredPayment(): void {
    clear(pane);
    pane.append(el("h3", {}, ["Registered Payment"]));
    const corporation = el("select", { name: "registration_id" });
    const payer = accountSelect();
    const amount = el("input", { name: "amount", placeholder: "Amount (without RM)" });
    const billRef = el("input", { name: "bill_ref", placeholder: "Bill reference (if required)" });
    const date = el("input", { name: "effective_date", value: todayIso() });
    const submit = el("button", { type: "submit" }, ["Pay"]);
    const form = el("form", { id: "registered-payment-form" }, [
      el("label", {}, ["Corporation ", corporation]),
      el("label", {}, ["From account ", payer]),
      el("label", {}, ["Amount ", amount]),
      el("label", {}, ["Reference ", billRef]),
      el("label", {}, ["Effective date ", date]),
      submit,
    ]);
    pane.append(form);

    api.billers().then(({ registrations }) => {
      for (const r of registrations) {
        corporation.append(
          el("option", { value: String(r.registration_id) }, [`${r.corporation} (${r.bill_account_no})`]),
        );
      }
      if (registrations.length === 0) {
        pane.append(el("p", {}, ["No registered billers yet; use Registration."]));
      }
    });

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const minorText = amount.value.trim();
      if (!/^\d+(\.\d{1,2})?$/.test(minorText)) {
        status.textContent = "Enter the amount in ringgit, e.g. 50.00";
        return;
      }
      const [units, cents = ""] = minorText.split(".");
      const minor = Number(units) * 100 + Number(cents.padEnd(2, "0") || "0");
      if (minor <= 0) {
        status.textContent = "Amount must be greater than zero";
        return;
      }
      submit.disabled = true;
      api
        .payRegistered(Number(corporation.value), payer.value,
                       { amount_minor: minor, currency: "MYR" }, date.value,
                       billRef.value.trim() || undefined)
        .then(({ message, payment }) => {
          status.textContent =
            `${message}: paid ${formatMoney(payment.amount)} to ${payment.corporation}, ` +
            `status ${payment.status}`;
        })
        .catch((err) => (status.textContent = err.message))
        .finally(() => (submit.disabled = false));
    });
  }

  function drawOpenPayment(): void {
    clear(pane);
    pane.append(el("h3", {}, ["Open Payment"]));
    const topTen = el("select", { name: "top_ten" }, [el("option", { value: "" }, ["(Top Ten Payees)"])]);
    api.topTenPayees().then(({ payees }) => {
      for (const name of payees) topTen.append(el("option", { value: name }, [name]));
    });
    const corporation = el("input", { name: "corporation", placeholder: "or write the payee name" });
    topTen.addEventListener("change", () => {
      if (topTen.value) corporation.value = topTen.value;
    });
    const billAccount = el("input", { name: "bill_account_no", placeholder: "Bill account number" });
    const holder = el("input", { name: "holder_name", placeholder: "Bill account holder name" });
    const payer = accountSelect();
    const amount = el("input", { name: "amount", placeholder: "Amount (without RM)" });
    const billRef = el("input", { name: "bill_ref", placeholder: "Bill reference (if required)" });
    const date = el("input", { name: "effective_date", value: todayIso() });
    const submit = el("button", { type: "submit" }, ["Pay"]);
    const errorSlot = el("p", { class: "field-error" });
    const form = el("form", { id: "open-payment-form" }, [
      el("label", {}, ["Top ten ", topTen]),
      el("label", {}, ["Corporation ", corporation]),
      el("label", {}, ["Bill account ", billAccount]),
      el("label", {}, ["Holder name ", holder]),
      el("label", {}, ["From account ", payer]),
      el("label", {}, ["Amount ", amount]),
      el("label", {}, ["Reference ", billRef]),
      el("label", {}, ["Effective date ", date]),
      errorSlot,
      submit,
    ]);
    pane.append(form);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const input: OpenPaymentFormInput = {
        corporation: corporation.value,
        bill_account_no: billAccount.value,
        holder_name: holder.value,
        payer_account: payer.value,
        amount: amount.value,
        effective_date: date.value,
        bill_ref: billRef.value || undefined,
      };
      const { errors, body } = validateOpenPaymentForm(input, { ownAccounts, today: todayIso() });
      errorSlot.textContent = Object.values(errors).join("; ");
      if (!body) return;
      submit.disabled = true;
      api
        .openPayment(body)
        .then(({ message, payment }) => {
          status.textContent =
            `${message}: ${formatMoney(payment.amount)} to ${payment.corporation}, status ${payment.status}`;
        })
        .catch((err) => (status.textContent = err.message))
        .finally(() => (submit.disabled = false));
    });
  }

  function drawRegistration(): void {
    clear(pane);
    pane.append(el("h3", {}, ["Pay Registration Bill"]));
    const corporation = el("input", { placeholder: "Corporation name" });
    const billAccount = el("input", { placeholder: "Bill Account Number" });
    const holder = el("input", { placeholder: "Bill Account Holder Name" });
    const register = el("button", {}, ["Register"]);
    register.addEventListener("click", () => {
      api
        .registerBiller(corporation.value.trim(), billAccount.value.trim(), holder.value.trim())
        .then((view) => {
          status.textContent = `Registered ${view.corporation} (${view.bill_account_no})`;
          drawRegistration();
        })
        .catch((err) => (status.textContent = err.message));
    });
    pane.append(el("div", {}, [corporation, billAccount, holder, register]));

    pane.append(el("h3", {}, ["Deregistration Bill"]));
    const list = el("form", { id: "deregistration-form" });
    const confirm = el("button", { type: "submit" }, ["Cancel selected"]);
    api.billers().then(({ registrations }) => {
      for (const r of registrations) {
        const box = el("input", { type: "checkbox", value: String(r.registration_id) });
        list.append(el("label", { class: "deregister-row" }, [box, ` ${r.corporation} (${r.bill_account_no})`]));
      }
      list.append(confirm);
    });
    list.addEventListener("submit", (event) => {
      event.preventDefault();
      const ticked = Array.from(list.querySelectorAll("input:checked")).map((box) =>
        Number((box as HTMLInputElement).value),
      );
      if (ticked.length === 0) return;
      api
        .deregisterBillers(ticked)
        .then(({ removed }) => {
          status.textContent = `Removed ${removed.length} payee(s)`;
          drawRegistration();
        })
        .catch((err) => (status.textContent = err.message));
    });
    pane.append(list);

    pane.append(el("h3", {}, ["Future payments"]));
    const future = el("table", { class: "future-payments" });
    pane.append(future);
    api.pendingPayments().then(({ payments }) => {
      for (const p of payments) {
        const cancel = el("button", {}, ["Cancel Future Payment"]);
        cancel.addEventListener("click", () => {
          api
            .cancelPayment(p.payment_id)
            .then(() => drawRegistration())
            .catch((err) => (status.textContent = err.message));
        });
        future.append(
          el("tr", {}, [
            el("td", {}, [p.effective_date]),
            el("td", {}, [p.corporation]),
            el("td", {}, [formatMoney(p.amount)]),
            el("td", {}, [cancel]),
          ]),
        );
      }
      if (payments.length === 0) {
        future.append(el("tr", {}, [el("td", {}, ["No scheduled future payments"])]));
      }
    });
  }

  function drawHistory(): void {
    clear(pane);
    pane.append(el("h3", {}, ["Bill Payment History"]));
    const table = el("table", { class: "history" });
    pane.append(table);
    api.paymentHistory().then(({ payments }) => {
      for (const p of payments) {
        table.append(
          el("tr", {}, [
            el("td", {}, [p.effective_date]),
            el("td", {}, [p.corporation]),
            el("td", {}, [formatMoney(p.amount)]),
            el("td", {}, [p.status]),
          ]),
        );
      }
      if (payments.length === 0) table.append(el("tr", {}, [el("td", {}, ["No payments yet"])]));
    });
  }
}
