// Entry point: wires URL parameters to the API and the board.
//
//   index.html?session=<id>&assessor=<id>[&api=<base-url>]

import { ApiClient, ApiError } from "./api.js";
import { Board, showErrorBanner, type BoardOptions } from "./board.js";
import { CanvasState } from "./state.js";

export interface AppHandles {
  board: Board;
  state: CanvasState;
}

export async function bootstrap(
  root: HTMLElement,
  location: { search: string },
  options: BoardOptions = {},
): Promise<AppHandles | null> {
  const params = new URLSearchParams(location.search);
  const sessionId = params.get("session");
  const assessorId = params.get("assessor");
  const api = new ApiClient(params.get("api") ?? "");
  if (!sessionId || !assessorId) {
    showErrorBanner(root, "missing ?session= and ?assessor= URL parameters");
    return null;
  }
  let meta;
  try {
    meta = await api.getSession(sessionId);
  } catch (err) {
    const detail =
      err instanceof ApiError && err.status === 404
        ? `unknown session ${sessionId}`
        : err instanceof Error
          ? err.message
          : String(err);
    showErrorBanner(root, detail);
    return null;
  }
  const state = new CanvasState(meta, assessorId);
  const board = new Board(root, state, api, options);
  return { board, state };
}

// In the browser, start immediately; under test, bootstrap() is called directly.
declare const process: unknown;
if (typeof document !== "undefined" && typeof process === "undefined") {
  const root = document.getElementById("app");
  if (root) {
    void bootstrap(root, window.location);
  }
}
