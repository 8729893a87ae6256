/**
 * Single source of truth for everything the panel displays.
 *
 * Displayed parameters always come from engine acks or state snapshots,
 * never from optimistic local writes: a slider move records a *pending*
 * value, and only the matching ack (or a full state message) promotes it
 * to the displayed params. On disconnect the params are cleared so a stale
 * value can never be shown; reconnecting resynchronizes via get_state.
 */

import {
  ParamName,
  Params,
  ServerMessage,
  TelemetryMessage,
} from "./protocol.js";

export const RING_CAPACITY = 300;
export const STALE_AFTER_MS = 2000;

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export class TelemetryRing {
  private buf: TelemetryMessage[] = [];
  private start = 0;

  constructor(readonly capacity: number = RING_CAPACITY) {}

  push(t: TelemetryMessage): void {
    if (this.buf.length < this.capacity) {
      this.buf.push(t);
    } else {
      this.buf[this.start] = t;
      this.start = (this.start + 1) % this.capacity;
    }
  }

  get length(): number {
    return this.buf.length;
  }

  /** Oldest-first snapshot; safe for rendering while messages keep arriving. */
  snapshot(): TelemetryMessage[] {
    return this.buf
      .slice(this.start)
      .concat(this.buf.slice(0, this.start));
  }

  latest(): TelemetryMessage | null {
    if (this.buf.length === 0) return null;
    const idx =
      (this.start + this.buf.length - 1) % Math.max(this.buf.length, 1);
    return this.buf.length < this.capacity
      ? this.buf[this.buf.length - 1] ?? null
      : this.buf[idx] ?? null;
  }
}

export class UiState {
  status: ConnectionStatus = "disconnected";
  /** null until the first engine state/ack arrives (nothing to display yet). */
  params: Params | null = null;
  bypass = false;
  readonly pending = new Map<ParamName, number>();
  readonly ring = new TelemetryRing();
  malformedCount = 0;
  lastTelemetryMs: number | null = null;
  lastError: string | null = null;

  applyServer(msg: ServerMessage, nowMs: number): void {
    switch (msg.type) {
      case "state":
        this.params = {
          S: msg.S,
          lambda: msg.lambda,
          mu: msg.mu,
          g_min: msg.g_min,
        };
        this.bypass = msg.bypass;
        this.pending.clear();
        break;
      case "ack":
        if (msg.name === "bypass") {
          this.bypass = msg.value as boolean;
        } else {
          if (this.params !== null) {
            this.params = { ...this.params, [msg.name]: msg.value as number };
          }
          this.pending.delete(msg.name);
        }
        break;
      case "telemetry":
        this.ring.push(msg);
        this.lastTelemetryMs = nowMs;
        break;
      case "error":
        // a rejected set_param never changes the display; drop the pending
        // value so the control snaps back to the last acknowledged one
        this.lastError = msg.msg;
        this.pending.clear();
        break;
    }
  }

  noteMalformed(): void {
    this.malformedCount += 1;
  }

  markPending(name: ParamName, value: number): void {
    this.pending.set(name, value);
  }

  onDisconnected(): void {
    this.status = "disconnected";
    this.params = null;
    this.pending.clear();
  }

  isStale(nowMs: number, thresholdMs: number = STALE_AFTER_MS): boolean {
    return (
      this.lastTelemetryMs === null ||
      nowMs - this.lastTelemetryMs > thresholdMs
    );
  }
}
