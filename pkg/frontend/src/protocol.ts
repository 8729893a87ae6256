/**
 * JSON message grammar spoken by the engine's WebSocket control endpoint.
 *
 * Client -> engine:
 *   {"type": "set_param", "name": "S"|"lambda"|"mu"|"g_min", "value": number}
 *   {"type": "bypass", "on": boolean}
 *   {"type": "get_state"}
 * Engine -> client:
 *   {"type": "ack", "name": ..., "value": ...}
 *   {"type": "state", "S", "lambda", "mu", "g_min", "bypass"}
 *   {"type": "telemetry", "frame", "band_cdr": number[16], "band_gain": number[16], "mean_coh"}
 *   {"type": "error", "msg": string}
 *
 * The UI must never emit anything outside this grammar; incoming messages
 * that do not parse are dropped (and counted) rather than crashing the UI.
 */

export type ParamName = "S" | "lambda" | "mu" | "g_min";

export const PARAM_NAMES: readonly ParamName[] = ["S", "lambda", "mu", "g_min"];

export interface Params {
  S: number;
  lambda: number;
  mu: number;
  g_min: number;
}

/** Inclusive-ish bounds mirrored from the engine (lower bound of mu and
 *  g_min is exclusive; the engine is the authority, this is a pre-check). */
export const PARAM_BOUNDS: Record<ParamName, readonly [number, number]> = {
  S: [0.01, 1000],
  lambda: [0, 0.999],
  mu: [0, 2],
  g_min: [0, 1],
};

export const N_BANDS = 16;

export interface AckMessage {
  type: "ack";
  name: ParamName | "bypass";
  value: number | boolean;
}

export interface StateMessage extends Params {
  type: "state";
  bypass: boolean;
}

export interface TelemetryMessage {
  type: "telemetry";
  frame: number;
  band_cdr: number[];
  band_gain: number[];
  mean_coh: number;
}

export interface ErrorMessage {
  type: "error";
  msg: string;
}

export type ServerMessage =
  | AckMessage
  | StateMessage
  | TelemetryMessage
  | ErrorMessage;

export function setParamMessage(name: ParamName, value: number): string {
  if (!PARAM_NAMES.includes(name)) {
    throw new Error(`unknown parameter: ${name}`);
  }
  if (!Number.isFinite(value)) {
    throw new Error("parameter value must be finite");
  }
  return JSON.stringify({ type: "set_param", name, value });
}

export function bypassMessage(on: boolean): string {
  return JSON.stringify({ type: "bypass", on });
}

export function getStateMessage(): string {
  return JSON.stringify({ type: "get_state" });
}

function isFiniteNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function isBandArray(x: unknown): x is number[] {
  return (
    Array.isArray(x) && x.length === N_BANDS && x.every(isFiniteNumber)
  );
}

/** Parse one engine frame; returns null for anything outside the grammar. */
export function parseServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    return null;
  }
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "ack": {
      const name = msg.name;
      if (name === "bypass" && typeof msg.value === "boolean") {
        return { type: "ack", name, value: msg.value };
      }
      if (
        typeof name === "string" &&
        PARAM_NAMES.includes(name as ParamName) &&
        isFiniteNumber(msg.value)
      ) {
        return { type: "ack", name: name as ParamName, value: msg.value };
      }
      return null;
    }
    case "state": {
      if (
        isFiniteNumber(msg.S) &&
        isFiniteNumber(msg.lambda) &&
        isFiniteNumber(msg.mu) &&
        isFiniteNumber(msg.g_min) &&
        typeof msg.bypass === "boolean"
      ) {
        return {
          type: "state",
          S: msg.S,
          lambda: msg.lambda,
          mu: msg.mu,
          g_min: msg.g_min,
          bypass: msg.bypass,
        };
      }
      return null;
    }
    case "telemetry": {
      if (
        isFiniteNumber(msg.frame) &&
        isBandArray(msg.band_cdr) &&
        isBandArray(msg.band_gain) &&
        isFiniteNumber(msg.mean_coh)
      ) {
        return {
          type: "telemetry",
          frame: msg.frame,
          band_cdr: msg.band_cdr,
          band_gain: msg.band_gain,
          mean_coh: msg.mean_coh,
        };
      }
      return null;
    }
    case "error": {
      if (typeof msg.msg === "string") {
        return { type: "error", msg: msg.msg };
      }
      return null;
    }
    default:
      return null;
  }
}
