import { ApiClient } from "../api.js";
import { clear, el, formatMoney, todayIso } from "../dom.js";

function daysAgoIso(days: number): string {
  return new Date(Date.now() - days * 86_400_000).toISOString().slice(0, 10);
}

/** View Account: balances, per-account detail with history, statements. */
export function renderAccounts(root: HTMLElement, api: ApiClient): void {
  clear(root);
  const message = el("p", { class: "pane-message" });
  const list = el("ul", { class: "account-list" });
  const detail = el("div", { class: "account-detail" });
  const status = el("p", { class: "status-line" });
  root.append(el("h2", {}, ["View Account"]), message, list, detail, status);

  api
    .accounts()
    .then(({ message: text, accounts }) => {
      message.textContent = text;
      for (const account of accounts) {
        const opener = el("button", { class: "account-open" }, [
          `${account.account_id} (${account.kind}) ${formatMoney(account.balance)}`,
        ]);
        const extras: string[] = [];
        if (account.amount_owed) extras.push(`owed ${formatMoney(account.amount_owed)}`);
        if (account.credit_limit) extras.push(`limit ${formatMoney(account.credit_limit)}`);
        opener.addEventListener("click", () => showDetail(account.account_id));
        list.append(el("li", {}, [opener, extras.length ? ` ${extras.join(", ")}` : ""]));
      }
    })
    .catch((err) => {
      status.textContent = String(err.message ?? err);
    });

  function showDetail(accountId: string): void {
    clear(detail);
    detail.append(el("h3", {}, [`Transaction history: ${accountId} (last 90 days)`]));
    const table = el("table", { class: "history" });
    detail.append(table);
    const channels = el("div", { class: "statement-request" });
    for (const channel of ["online", "email", "post"]) {
      const button = el("button", {}, [`Statement: ${channel}`]);
      button.addEventListener("click", () => {
        api
          .requestStatement(accountId, channel)
          .then((view) => {
            status.textContent = `Statement request ${view.request_id} is ${view.status}`;
          })
          .catch((err) => (status.textContent = err.message));
      });
      channels.append(button);
    }
    detail.append(channels);

    api
      .history(accountId, daysAgoIso(90), todayIso())
      .then(({ entries }) => {
        for (const entry of entries) {
          table.append(
            el("tr", {}, [
              el("td", {}, [entry.posted_at]),
              el("td", {}, [entry.description]),
              el("td", {}, [formatMoney(entry.amount)]),
            ]),
          );
        }
        if (entries.length === 0) {
          table.append(el("tr", {}, [el("td", {}, ["No transactions in the last 90 days"])]));
        }
      })
      .catch((err) => (status.textContent = err.message));
  }
}
