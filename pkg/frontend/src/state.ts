/**
 * Client session state. No token means only the log-on screen is
 * reachable; the router enforces that invariant.
 */

export interface UiSessionState {
  token: string | null;
  remaining_s: number;
  warn: boolean;
  customer_name: string;
  must_change: boolean;
}

type Listener = (state: UiSessionState) => void;

const initial: UiSessionState = {
  token: null,
  remaining_s: 0,
  warn: false,
  customer_name: "",
  must_change: false,
};

export class SessionStore {
  private state: UiSessionState = { ...initial };
  private listeners: Listener[] = [];

  get(): UiSessionState {
    return this.state;
  }

  set(patch: Partial<UiSessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  clear(): void {
    this.set({ ...initial });
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
