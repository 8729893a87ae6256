import { WebSocket } from "ws";

import { SocketFactory, SocketLike } from "../src/connection.js";

/** Adapt `ws` to the browser-shaped SocketLike the panel consumes. */
export const nodeSocketFactory: SocketFactory = (url) => {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onopen: null,
    onmessage: null,
    onclose: null,
    onerror: null,
  };
  ws.on("open", () => like.onopen?.());
  ws.on("message", (data) => like.onmessage?.({ data: data.toString() }));
  ws.on("close", () => like.onclose?.());
  ws.on("error", () => like.onerror?.());
  return like;
};

export async function waitFor(
  cond: () => boolean,
  timeoutMs = 5000,
  what = "condition",
): Promise<void> {
  const t0 = Date.now();
  while (!cond()) {
    if (Date.now() - t0 > timeoutMs) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((r) => setTimeout(r, 10));
  }
}
