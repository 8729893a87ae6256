/**
 * WebSocket session against the engine control endpoint with automatic
 * reconnect. Every (re)open sends get_state so the displayed parameters
 * are resynchronized from the engine, never assumed.
 *
 * The socket is injected through a factory so tests (and the Node headless
 * client) can supply `ws` while the browser uses the native WebSocket.
 */

import {
  ParamName,
  bypassMessage,
  getStateMessage,
  parseServerMessage,
  setParamMessage,
} from "./protocol.js";
import { UiState } from "./state.js";

/** The subset of the WebSocket API the panel needs (browser and `ws` both
 *  satisfy it). */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectionOptions {
  reconnectDelayMs?: number;
  /** Injected clock for tests. */
  now?: () => number;
  onChange?: () => void;
}

export class Connection {
  private socket: SocketLike | null = null;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;
  private readonly reconnectDelayMs: number;
  private readonly now: () => number;
  private readonly onChange: () => void;

  constructor(
    readonly url: string,
    readonly state: UiState,
    private readonly factory: SocketFactory,
    opts: ConnectionOptions = {},
  ) {
    this.reconnectDelayMs = opts.reconnectDelayMs ?? 1000;
    this.now = opts.now ?? (() => Date.now());
    this.onChange = opts.onChange ?? (() => {});
  }

  connect(): void {
    this.closed = false;
    this.open();
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.socket = null;
    this.state.onDisconnected();
    this.onChange();
  }

  /** Drop the live socket without disabling reconnect (for tests). */
  dropSocket(): void {
    this.socket?.close();
  }

  setParam(name: ParamName, value: number): void {
    if (this.state.status !== "connected" || this.socket === null) return;
    this.state.markPending(name, value);
    this.socket.send(setParamMessage(name, value));
    this.onChange();
  }

  setBypass(on: boolean): void {
    if (this.state.status !== "connected" || this.socket === null) return;
    this.socket.send(bypassMessage(on));
  }

  requestState(): void {
    this.socket?.send(getStateMessage());
  }

  private open(): void {
    this.state.status = "connecting";
    this.onChange();
    let sock: SocketLike;
    try {
      sock = this.factory(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = sock;

    sock.onopen = () => {
      this.state.status = "connected";
      // resync from the engine: displayed params come from this reply,
      // not from anything remembered across the drop
      sock.send(getStateMessage());
      this.onChange();
    };

    sock.onmessage = (ev) => {
      const text = typeof ev.data === "string" ? ev.data : String(ev.data);
      const msg = parseServerMessage(text);
      if (msg === null) {
        this.state.noteMalformed();
      } else {
        this.state.applyServer(msg, this.now());
      }
      this.onChange();
    };

    sock.onclose = () => {
      if (this.socket === sock) this.socket = null;
      this.state.onDisconnected();
      this.onChange();
      this.scheduleReconnect();
    };

    sock.onerror = () => {
      // onclose fires afterwards and owns the cleanup
    };
  }

  private scheduleReconnect(): void {
    if (this.closed || this.reconnectTimer !== null) return;
    this.state.status = "disconnected";
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      if (!this.closed) this.open();
    }, this.reconnectDelayMs);
  }
}
