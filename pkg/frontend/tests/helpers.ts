import { vi } from "vitest";

export type RouteHandler = (init?: RequestInit) => { status: number; body: unknown };

/** Install a fetch mock keyed by "METHOD path"; returns the call log. */
export function mockRoutes(routes: Record<string, RouteHandler>): string[] {
  const calls: string[] = [];
  vi.stubGlobal("fetch", async (url: string | URL, init?: RequestInit) => {
    const path = String(url).replace(/^https?:\/\/[^/]+/, "");
    const key = `${init?.method ?? "GET"} ${path.split("?")[0]}`;
    calls.push(key);
    const handler = routes[key];
    if (!handler) {
      return new Response(
        JSON.stringify({ ok: false, error: { code: "UNKNOWN_ROUTE", message: `no handler: ${key}` } }),
        { status: 404, headers: { "Content-Type": "application/json" } },
      );
    }
    const { status, body } = handler(init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  });
  return calls;
}

export function okEnvelope(data: unknown, session?: { remaining_s: number; warn: boolean }) {
  return { ok: true, data, ...(session ? { session } : {}) };
}

export function errorEnvelope(code: string, message: string, status: number) {
  return { status, body: { ok: false, error: { code, message, http_status: status } } };
}

export async function flushAsync(): Promise<void> {
  // settle chained fetch/json promises: microtasks plus two macrotask turns
  for (let i = 0; i < 8; i += 1) await Promise.resolve();
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}
