import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { createApp } from "../src/app.js";
import { errorEnvelope, flushAsync, mockRoutes, okEnvelope } from "./helpers.js";

const WELCOME =
  "welcome to the internet banking system please click on the left menu bar to choose your option!";

function loginRoutes(extra: Record<string, any> = {}) {
  return mockRoutes({
    "POST /login": () => ({
      status: 200,
      body: okEnvelope({
        token: "tok-1",
        message: WELCOME,
        must_change: false,
        customer_id: "C00001",
        is_admin: false,
        idle_timeout_s: 300,
      }),
    }),
    "GET /session/heartbeat": () => ({
      status: 200,
      body: okEnvelope({ remaining_s: 300, warn: false }),
    }),
    "GET /accounts": () => ({
      status: 200,
      body: okEnvelope({ message: "Please click on the respective account/card types for more details.", accounts: [] }),
    }),
    "POST /logout": () => ({
      status: 200,
      body: okEnvelope({ message: "You have been logged out successfully" }),
    }),
    ...extra,
  });
}

function fillAndSubmitLogin(root: HTMLElement): void {
  (root.querySelector("input[name=username]") as HTMLInputElement).value = "alice";
  (root.querySelector("input[name=password]") as HTMLInputElement).value = "pw";
  (root.querySelector("#login-form") as HTMLFormElement).dispatchEvent(
    new Event("submit", { bubbles: true, cancelable: true }),
  );
}

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="root"></div>';
  root = document.getElementById("root") as HTMLElement;
});

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("log-on flow", () => {
  it("starts on the log-on screen; nothing else is reachable without a token", () => {
    loginRoutes();
    createApp(root);
    expect(root.querySelector("#login-screen")).not.toBeNull();
    expect(root.querySelector("#menu-bar")).toBeNull();
  });

  it("successful log-on shows the welcome message and the left menu", async () => {
    loginRoutes();
    const app = createApp(root);
    fillAndSubmitLogin(root);
    await flushAsync();

    expect(root.querySelector("#welcome-banner")?.textContent).toBe(WELCOME);
    const entries = Array.from(root.querySelectorAll(".menu-entry")).map((b) => b.textContent);
    expect(entries).toEqual([
      "View Account",
      "Transfer Funds",
      "Pay Bills",
      "Cheque Services",
      "Utility",
      "Logout",
    ]);
    expect(app.store.get().token).toBe("tok-1");
    app.watchdog.stop();
  });

  it("failed log-on renders the alert text byte-exactly", async () => {
    mockRoutes({
      "POST /login": () => errorEnvelope("INVALID_CREDENTIALS", "Alert Invalid Username and Password", 401),
    });
    createApp(root);
    fillAndSubmitLogin(root);
    await flushAsync();
    expect(root.querySelector(".alert")?.textContent).toBe("Alert Invalid Username and Password");
    expect(root.querySelector("#menu-bar")).toBeNull();
  });

  it("a must-change log-on forces the password form before the menu", async () => {
    loginRoutes({
      "POST /login": () => ({
        status: 200,
        body: okEnvelope({
          token: "tok-1",
          message: WELCOME,
          must_change: true,
          customer_id: "C00001",
          is_admin: false,
          idle_timeout_s: 300,
        }),
      }),
    });
    const app = createApp(root);
    fillAndSubmitLogin(root);
    await flushAsync();
    expect(root.querySelector("#forced-password-change")).not.toBeNull();
    expect(root.querySelector("#password-form")).not.toBeNull();
    expect(root.querySelector("#menu-bar")).toBeNull();
    app.watchdog.stop();
  });
});

describe("sign-off", () => {
  it("returns to the log-on screen with the confirmation text", async () => {
    loginRoutes();
    const app = createApp(root);
    fillAndSubmitLogin(root);
    await flushAsync();
    (root.querySelector("#sign-off") as HTMLButtonElement).click();
    await flushAsync();
    expect(root.querySelector("#login-screen")).not.toBeNull();
    expect(root.querySelector(".notice")?.textContent).toBe("You have been logged out successfully");
    expect(app.store.get().token).toBeNull();
    expect(app.api.token).toBeNull();
  });

  it("clears the token even when the network fails", async () => {
    loginRoutes({
      "POST /logout": () => {
        throw new TypeError("network down");
      },
    });
    const app = createApp(root);
    fillAndSubmitLogin(root);
    await flushAsync();
    (root.querySelector("#sign-off") as HTMLButtonElement).click();
    await flushAsync();
    expect(root.querySelector("#login-screen")).not.toBeNull();
    expect(app.api.token).toBeNull();
  });
});

describe("session expiry", () => {
  it("an expired heartbeat navigates back to the log-on screen", async () => {
    const routes = loginRoutes();
    const app = createApp(root);
    fillAndSubmitLogin(root);
    await flushAsync();
    expect(root.querySelector("#menu-bar")).not.toBeNull();

    vi.unstubAllGlobals();
    mockRoutes({
      "GET /session/heartbeat": () => errorEnvelope("SESSION_EXPIRED", "Session expired", 440),
    });
    await app.watchdog.poll();
    expect(root.querySelector("#login-screen")).not.toBeNull();
    expect(app.store.get().token).toBeNull();
    expect(routes.length).toBeGreaterThan(0);
  });
});
