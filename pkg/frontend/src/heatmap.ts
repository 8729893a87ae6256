/**
 * Pure pixel rendering for the scrolling 16-band CDR and gain heatmaps and
 * the mean-coherence sparkline. Everything here returns plain buffers or
 * coordinates so it is testable without a DOM; main.ts blits the result
 * into a canvas.
 */

import { N_BANDS, TelemetryMessage } from "./protocol.js";

export type Rgb = readonly [number, number, number];

/** Gain in [0, 1] -> dark blue (suppressed) .. bright yellow (pass). */
export function gainColor(g: number): Rgb {
  const t = Math.min(1, Math.max(0, g));
  return [
    Math.round(20 + 235 * t),
    Math.round(20 + 215 * t),
    Math.round(80 * (1 - t) + 40 * t),
  ];
}

/** CDR on a log scale: 0.01 .. cdr_max maps to 0 .. 1 before colouring. */
export function cdrColor(cdr: number, cdrMax = 1e4): Rgb {
  const lo = Math.log10(0.01);
  const hi = Math.log10(cdrMax);
  const v = Math.log10(Math.max(0.01, Math.min(cdr, cdrMax)));
  return gainColor((v - lo) / (hi - lo));
}

export type BandField = "band_gain" | "band_cdr";

/**
 * RGBA pixel buffer, one column per telemetry frame (newest on the right),
 * one row per band (band 0 / lowest frequency at the bottom). Frames beyond
 * `width` are dropped from the left; missing columns stay black.
 */
export function renderBands(
  frames: readonly TelemetryMessage[],
  field: BandField,
  width: number,
  cdrMax = 1e4,
): Uint8ClampedArray<ArrayBuffer> {
  const height = N_BANDS;
  const out = new Uint8ClampedArray(width * height * 4);
  const shown = frames.slice(Math.max(0, frames.length - width));
  const offset = width - shown.length;
  for (let i = 0; i < shown.length; i++) {
    const frame = shown[i];
    if (!frame) continue;
    const bands = frame[field];
    for (let b = 0; b < height; b++) {
      const value = bands[b] ?? 0;
      const [r, g, bl] =
        field === "band_gain" ? gainColor(value) : cdrColor(value, cdrMax);
      const row = height - 1 - b;
      const p = (row * width + offset + i) * 4;
      out[p] = r;
      out[p + 1] = g;
      out[p + 2] = bl;
      out[p + 3] = 255;
    }
  }
  return out;
}

/**
 * Polyline points for the mean-coherence sparkline, x in [0, width),
 * y in [0, height) with y = 0 at coherence 1.
 */
export function sparklinePoints(
  frames: readonly TelemetryMessage[],
  width: number,
  height: number,
): Array<readonly [number, number]> {
  const shown = frames.slice(Math.max(0, frames.length - width));
  const offset = width - shown.length;
  return shown.map((f, i) => {
    const c = Math.min(1, Math.max(0, f.mean_coh));
    return [offset + i, (1 - c) * (height - 1)] as const;
  });
}
