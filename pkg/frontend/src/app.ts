import { ApiError, ConsoleApi } from "./api.js";
import {
  buildSessionView,
  renderFixturePicker,
  renderNetworkError,
  renderNotFound,
  renderSession,
  reviseBlocked,
} from "./view.js";

/** Browser bootstrap: one root element, one session at a time, at most
 * one in-flight decision request (the UI waits for the server rather
 * than updating optimistically). */
export function startConsole(root: HTMLElement, api?: ConsoleApi): void {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "";
  const client = api ?? new ConsoleApi(base);
  let sessionId: string | null = params.get("session");
  let busy = false;
  let lastOp: (() => Promise<void>) | null = null;

  async function run(op: () => Promise<void>): Promise<void> {
    if (busy) return;
    busy = true;
    lastOp = op;
    try {
      await op();
    } catch (err) {
      if (err instanceof ApiError && err.status === 404 && sessionId) {
        root.innerHTML = renderNotFound(sessionId);
        sessionId = null;
      } else if (err instanceof ApiError && err.status === 0) {
        root.innerHTML = renderNetworkError(err.message);
      } else if (err instanceof ApiError && err.status === 409) {
        // stale state: someone else finished the session; refresh
        await refresh();
      } else {
        root.innerHTML = renderNetworkError(String(err));
      }
    } finally {
      busy = false;
    }
  }

  async function showPicker(): Promise<void> {
    const { fixtures } = await client.listFixtures();
    root.innerHTML = renderFixturePicker(fixtures);
  }

  async function refresh(): Promise<void> {
    if (!sessionId) {
      await showPicker();
      return;
    }
    const session = await client.getSession(sessionId);
    root.innerHTML = renderSession(buildSessionView(session));
  }

  function inlineError(message: string): void {
    const slot = root.querySelector<HTMLElement>('[data-role="inline-error"]');
    if (slot) slot.textContent = message;
  }

  root.addEventListener("click", (ev) => {
    const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!el) return;
    const action = el.dataset.action;
    if (action === "open-fixture") {
      const fixture = el.dataset.fixture!;
      void run(async () => {
        const created = await client.createSession({ fixture });
        sessionId = created.id;
        await refresh();
      });
    } else if (action === "satisfied") {
      void run(async () => {
        try {
          await client.submitDecision(sessionId!, { verdict: "satisfied" });
        } catch (err) {
          if (err instanceof ApiError && err.status === 400) {
            inlineError(err.message);
            return;
          }
          throw err;
        }
        await refresh();
      });
    } else if (action === "revise") {
      const targets = Array.from(
        root.querySelectorAll<HTMLInputElement>('[data-role="target"]:checked'),
      ).map((box) => Number(box.value));
      const blocked = reviseBlocked(targets);
      if (blocked) {
        inlineError(blocked);
        return;
      }
      void run(async () => {
        try {
          await client.submitDecision(sessionId!, { verdict: "revise", targets });
        } catch (err) {
          if (err instanceof ApiError && err.status === 400) {
            inlineError(err.message);
            return;
          }
          throw err;
        }
        await refresh();
      });
    } else if (action === "retry") {
      if (lastOp) void run(lastOp);
      else void run(refresh);
    } else if (action === "back-to-picker") {
      sessionId = null;
      void run(showPicker);
    }
  });

  void run(refresh);
}

declare global {
  interface Window {
    it2fgpConsole?: typeof startConsole;
  }
}

if (typeof window !== "undefined") {
  window.it2fgpConsole = startConsole;
  const root = document.getElementById("console-root");
  if (root) startConsole(root);
}
