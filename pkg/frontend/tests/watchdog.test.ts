import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionWatchdog } from "../src/watchdog.js";
import { errorEnvelope, flushAsync, mockRoutes, okEnvelope } from "./helpers.js";

function makeWatchdog(onExpired = vi.fn()) {
  const api = new ApiClient("");
  api.token = "token-1";
  const watchdog = new SessionWatchdog({ api, onExpired, pollIntervalS: 10 });
  return { api, watchdog, onExpired };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

afterEach(() => {
  vi.unstubAllGlobals();
  vi.useRealTimers();
});

describe("session watchdog", () => {
  it("renders the blocking dialog with a Continue control when warned", async () => {
    mockRoutes({
      "GET /session/heartbeat": () => ({
        status: 200,
        body: okEnvelope({ remaining_s: 25, warn: true }),
      }),
    });
    const { watchdog } = makeWatchdog();
    await watchdog.poll();

    const dialog = document.querySelector(".timeout-dialog");
    expect(dialog).not.toBeNull();
    const button = dialog!.querySelector("button.timeout-continue") as HTMLButtonElement;
    expect(button).not.toBeNull();
    expect(button.textContent).toBe("Continue");
    expect(document.querySelector(".timeout-countdown")!.textContent).toContain("25");
    expect(watchdog.dialogVisible).toBe(true);
  });

  it("clicking Continue issues exactly one /session/continue call and closes the dialog", async () => {
    const calls = mockRoutes({
      "GET /session/heartbeat": () => ({
        status: 200,
        body: okEnvelope({ remaining_s: 25, warn: true }),
      }),
      "POST /session/continue": () => ({
        status: 200,
        body: okEnvelope({ remaining_s: 300, warn: false }),
      }),
    });
    const { watchdog } = makeWatchdog();
    await watchdog.poll();

    const button = document.querySelector("button.timeout-continue") as HTMLButtonElement;
    button.click();
    await flushAsync();

    expect(calls.filter((c) => c === "POST /session/continue")).toHaveLength(1);
    expect(document.querySelector(".timeout-dialog")).toBeNull();
    expect(watchdog.dialogVisible).toBe(false);
  });

  it("a SESSION_EXPIRED heartbeat clears the dialog and fires onExpired", async () => {
    mockRoutes({
      "GET /session/heartbeat": () => errorEnvelope("SESSION_EXPIRED", "Session expired", 440),
    });
    const { watchdog, onExpired } = makeWatchdog();
    await watchdog.poll();
    expect(onExpired).toHaveBeenCalledTimes(1);
    expect(document.querySelector(".timeout-dialog")).toBeNull();
  });

  it("network failure shows a retry notice and keeps the token", async () => {
    vi.stubGlobal("fetch", async () => {
      throw new TypeError("network down");
    });
    const { api, watchdog, onExpired } = makeWatchdog();
    await watchdog.poll();
    expect(onExpired).not.toHaveBeenCalled();
    expect(api.token).toBe("token-1");
    const message = document.querySelector(".timeout-message");
    expect(message?.textContent).toContain("Retrying");
  });

  it("polls on the configured interval with at most one in-flight heartbeat", async () => {
    vi.useFakeTimers();
    let calls = 0;
    vi.stubGlobal("fetch", async () => {
      calls += 1;
      return new Response(JSON.stringify(okEnvelope({ remaining_s: 200, warn: false })), {
        status: 200,
        headers: { "Content-Type": "application/json" },
      });
    });
    const { watchdog } = makeWatchdog();
    watchdog.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(calls).toBe(1);
    await vi.advanceTimersByTimeAsync(10_000);
    expect(calls).toBe(2);
    await vi.advanceTimersByTimeAsync(30_000);
    expect(calls).toBe(5);
    watchdog.stop();
  });

  it("hides the dialog again once the server stops warning", async () => {
    let warn = true;
    mockRoutes({
      "GET /session/heartbeat": () => ({
        status: 200,
        body: okEnvelope({ remaining_s: warn ? 20 : 290, warn }),
      }),
    });
    const { watchdog } = makeWatchdog();
    await watchdog.poll();
    expect(watchdog.dialogVisible).toBe(true);
    warn = false;
    await watchdog.poll();
    expect(watchdog.dialogVisible).toBe(false);
  });
});
