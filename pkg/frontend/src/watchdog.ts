/**
 * Session watchdog: polls the read-only heartbeat, raises the blocking
 * timeout dialog while the server says warn=true, and returns the user
 * to the log-on screen once the session has expired.
 *
 * At most one heartbeat is in flight. The countdown shown between polls
 * is client-interpolated; the server value is authoritative on each
 * poll. Network failures switch the dialog to a retry notice and never
 * discard the token.
 */

import { ApiClient, ApiError } from "./api.js";

export interface WatchdogOptions {
  api: ApiClient;
  onExpired: () => void;
  pollIntervalS?: number;
  mount?: HTMLElement;
}

export class SessionWatchdog {
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private tickTimer: ReturnType<typeof setInterval> | null = null;
  private dialog: HTMLElement | null = null;
  private countdownEl: HTMLElement | null = null;
  private inFlight = false;
  private remaining = 0;
  readonly pollIntervalS: number;

  constructor(private opts: WatchdogOptions) {
    this.pollIntervalS = opts.pollIntervalS ?? 10;
  }

  start(): void {
    this.stop();
    void this.poll();
    this.pollTimer = setInterval(() => void this.poll(), this.pollIntervalS * 1000);
  }

  stop(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
    this.pollTimer = null;
    this.hideDialog();
  }

  get dialogVisible(): boolean {
    return this.dialog !== null;
  }

  async poll(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      const meta = await this.opts.api.heartbeat();
      this.remaining = meta.remaining_s;
      if (meta.warn) {
        this.showDialog();
        this.updateCountdown();
      } else {
        this.hideDialog();
      }
    } catch (err) {
      if (err instanceof ApiError && err.code === "NETWORK_FAILURE") {
        this.showDialog(true); // retry notice; the token is still ours
      } else {
        this.expire();
      }
    } finally {
      this.inFlight = false;
    }
  }

  private expire(): void {
    this.stop();
    this.opts.onExpired();
  }

  async acknowledgeContinue(): Promise<void> {
    try {
      await this.opts.api.continueSession();
      this.hideDialog();
    } catch (err) {
      if (err instanceof ApiError && err.code === "NETWORK_FAILURE") {
        this.showDialog(true);
      } else {
        this.expire();
      }
    }
  }

  private mountPoint(): HTMLElement {
    return this.opts.mount ?? document.body;
  }

  private showDialog(retry = false): void {
    if (this.dialog === null) {
      const dialog = document.createElement("div");
      dialog.className = "timeout-dialog";
      dialog.setAttribute("role", "alertdialog");

      const text = document.createElement("p");
      text.className = "timeout-message";
      dialog.append(text);

      const countdown = document.createElement("p");
      countdown.className = "timeout-countdown";
      dialog.append(countdown);

      const button = document.createElement("button");
      button.className = "timeout-continue";
      button.textContent = "Continue";
      button.addEventListener("click", () => void this.acknowledgeContinue());
      dialog.append(button);

      const backdrop = document.createElement("div");
      backdrop.className = "timeout-backdrop";
      backdrop.append(dialog);
      this.mountPoint().append(backdrop);
      this.dialog = backdrop;
      this.countdownEl = countdown;

      this.tickTimer = setInterval(() => {
        if (this.remaining > 0) this.remaining -= 1;
        this.updateCountdown();
      }, 1000);
    }
    const message = this.dialog.querySelector(".timeout-message") as HTMLElement;
    message.textContent = retry
      ? "Connection problem while checking your session. Retrying..."
      : "Your session is about to time out. Click Continue to stay signed in.";
  }

  private updateCountdown(): void {
    if (this.countdownEl) {
      this.countdownEl.textContent = `Automatic sign-off in ${Math.max(this.remaining, 0)}s`;
    }
  }

  private hideDialog(): void {
    if (this.tickTimer !== null) clearInterval(this.tickTimer);
    this.tickTimer = null;
    if (this.dialog !== null) {
      this.dialog.remove();
      this.dialog = null;
      this.countdownEl = null;
    }
  }
}
