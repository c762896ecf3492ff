/**
 * Application shell: log-on screen, main page with the left menu bar,
 * the session watchdog, the sign-off button, and the forced
 * password-change screen when the server demands one.
 */

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { MENU_ENTRIES, MenuEntry } from "./menu.js";
import { SessionStore } from "./state.js";
import { SessionWatchdog } from "./watchdog.js";
import { renderAccounts } from "./views/accounts.js";
import { renderCheques } from "./views/cheques.js";
import { renderLogin } from "./views/login.js";
import { renderPayBills } from "./views/paybills.js";
import { renderTransfers } from "./views/transfers.js";
import { renderUtility } from "./views/utility.js";

export interface AppHandles {
  api: ApiClient;
  store: SessionStore;
  watchdog: SessionWatchdog;
  navigate: (entry: MenuEntry) => void;
}

export function createApp(root: HTMLElement, apiBase = ""): AppHandles {
  const api = new ApiClient(apiBase);
  const store = new SessionStore();
  const watchdog = new SessionWatchdog({
    api,
    pollIntervalS: 10,
    onExpired: () => {
      api.token = null;
      store.clear();
      showLogin("Your session has ended. Please log on again.");
    },
  });

  let contentPane: HTMLElement | null = null;

  function showLogin(notice = ""): void {
    watchdog.stop();
    contentPane = null;
    renderLogin(root, api, (result) => {
      store.set({
        token: result.token,
        must_change: result.must_change,
        customer_name: result.customer_id ?? "",
      });
      if (result.must_change) {
        showForcedPasswordChange(result.message);
      } else {
        showMain(result.message);
      }
    }, notice);
  }

  function showForcedPasswordChange(welcome: string): void {
    clear(root);
    const pane = el("section", { id: "forced-password-change" }, [
      el("h1", {}, ["Internet Banking"]),
      el("p", {}, [welcome]),
      el("p", { class: "notice" }, ["You must change your password before continuing."]),
    ]);
    const formHost = el("div", {});
    pane.append(formHost);
    root.append(pane);
    renderUtility(formHost, api, () => {
      store.set({ must_change: false });
      showMain(welcome);
    });
    watchdog.start();
  }

  function showMain(welcome: string): void {
    clear(root);
    const banner = el("p", { id: "welcome-banner" }, [welcome]);
    const menu = el("nav", { id: "menu-bar", "aria-label": "left menu bar" });
    contentPane = el("main", { id: "content" });
    for (const entry of MENU_ENTRIES) {
      const button = el("button", { class: "menu-entry" }, [entry]);
      button.addEventListener("click", () => navigate(entry));
      menu.append(button);
    }
    const signOff = el("button", { id: "sign-off" }, ["Sign-off"]);
    signOff.addEventListener("click", () => void signOffFlow());
    root.append(
      el("header", {}, [banner, signOff]),
      el("div", { id: "layout" }, [menu, contentPane]),
    );
    watchdog.start();
    navigate("View Account");
  }

  async function signOffFlow(): Promise<void> {
    try {
      await api.logout();
      showLogin("You have been logged out successfully");
    } catch {
      // even on failure the local token is cleared
      showLogin("You have been signed off.");
    } finally {
      api.token = null;
      store.clear();
      watchdog.stop();
    }
  }

  function navigate(entry: MenuEntry): void {
    const state = store.get();
    if (!state.token || !contentPane) {
      showLogin();
      return;
    }
    switch (entry) {
      case "View Account":
        renderAccounts(contentPane, api);
        break;
      case "Transfer Funds":
        renderTransfers(contentPane, api);
        break;
      case "Pay Bills":
        renderPayBills(contentPane, api);
        break;
      case "Cheque Services":
        renderCheques(contentPane, api);
        break;
      case "Utility":
        renderUtility(contentPane, api);
        break;
      case "Logout":
        void signOffFlow();
        break;
    }
  }

  showLogin();
  return { api, store, watchdog, navigate };
}

declare global {
  interface Window {
    BANK_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  createApp(document.getElementById("app") as HTMLElement, window.BANK_API_BASE ?? "");
}
