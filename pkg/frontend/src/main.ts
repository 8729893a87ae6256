/**
 * Browser entry point: wires UiState + Connection to the DOM.
 *
 * Served as static assets; the engine URL defaults to the page host on
 * port 8765 and can be overridden with ?engine=ws://host:port/ws.
 */

import { Connection } from "./connection.js";
import { renderBands, sparklinePoints } from "./heatmap.js";
import { N_BANDS, ParamName } from "./protocol.js";
import { UiState } from "./state.js";

const HEAT_WIDTH = 300;

// S is perceptually log-scaled; fine steps matter most below 20, which a
// log slider over 0.1..100 gives naturally.
const S_LO = Math.log(0.1);
const S_HI = Math.log(100);

function sliderToS(t: number): number {
  return Math.exp(S_LO + (S_HI - S_LO) * t);
}

function sToSlider(s: number): number {
  return (Math.log(s) - S_LO) / (S_HI - S_LO);
}

interface LinearSlider {
  name: ParamName;
  min: number;
  max: number;
}

const LINEAR_SLIDERS: LinearSlider[] = [
  { name: "lambda", min: 0, max: 0.999 },
  { name: "mu", min: 0.01, max: 2 },
  { name: "g_min", min: 0.01, max: 1 },
];

function engineUrl(): string {
  const q = new URLSearchParams(window.location.search).get("engine");
  if (q) return q;
  const host = window.location.hostname || "127.0.0.1";
  return `ws://${host}:8765/ws`;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function start(): void {
  const state = new UiState();
  const status = el<HTMLSpanElement>("status");
  const stale = el<HTMLSpanElement>("stale");
  const toast = el<HTMLDivElement>("toast");
  const bypassBox = el<HTMLInputElement>("bypass");
  const sliders = new Map<ParamName, HTMLInputElement>();
  const readouts = new Map<ParamName, HTMLSpanElement>();
  for (const name of ["S", "lambda", "mu", "g_min"] as ParamName[]) {
    sliders.set(name, el<HTMLInputElement>(`slider-${name}`));
    readouts.set(name, el<HTMLSpanElement>(`value-${name}`));
  }
  const gainCanvas = el<HTMLCanvasElement>("heat-gain");
  const cdrCanvas = el<HTMLCanvasElement>("heat-cdr");
  const sparkCanvas = el<HTMLCanvasElement>("spark");

  const conn = new Connection(
    engineUrl(),
    state,
    (url) => new WebSocket(url) as never,
    { onChange: syncControls },
  );

  function syncControls(): void {
    status.textContent = state.status;
    status.className = state.status;
    const connected = state.status === "connected" && state.params !== null;
    for (const [name, slider] of sliders) {
      slider.disabled = !connected;
      const readout = readouts.get(name)!;
      if (state.params === null) {
        readout.textContent = "—";
        continue;
      }
      // ack-then-display: controls show only engine-acknowledged values
      const value = state.params[name];
      readout.textContent = value.toPrecision(3);
      if (!state.pending.has(name)) {
        slider.value = String(
          name === "S"
            ? sToSlider(value)
            : value,
        );
      }
    }
    bypassBox.disabled = !connected;
    bypassBox.checked = state.bypass;
    if (state.lastError) {
      toast.textContent = state.lastError;
      toast.style.display = "block";
      state.lastError = null;
      setTimeout(() => (toast.style.display = "none"), 3000);
    }
  }

  const sSlider = sliders.get("S")!;
  sSlider.min = "0";
  sSlider.max = "1";
  sSlider.step = "0.001";
  sSlider.addEventListener("change", () =>
    conn.setParam("S", sliderToS(Number(sSlider.value))),
  );
  for (const { name, min, max } of LINEAR_SLIDERS) {
    const s = sliders.get(name)!;
    s.min = String(min);
    s.max = String(max);
    s.step = "0.001";
    s.addEventListener("change", () => conn.setParam(name, Number(s.value)));
  }
  bypassBox.addEventListener("change", () => conn.setBypass(bypassBox.checked));

  function draw(): void {
    const frames = state.ring.snapshot();
    for (const [canvas, field] of [
      [gainCanvas, "band_gain"],
      [cdrCanvas, "band_cdr"],
    ] as const) {
      const ctx = canvas.getContext("2d");
      if (!ctx) continue;
      const pixels = renderBands(frames, field, HEAT_WIDTH);
      ctx.putImageData(new ImageData(pixels, HEAT_WIDTH, N_BANDS), 0, 0);
    }
    const sctx = sparkCanvas.getContext("2d");
    if (sctx) {
      sctx.clearRect(0, 0, sparkCanvas.width, sparkCanvas.height);
      sctx.strokeStyle = "#4cf";
      sctx.beginPath();
      for (const [x, y] of sparklinePoints(
        frames,
        sparkCanvas.width,
        sparkCanvas.height,
      )) {
        sctx.lineTo(x, y);
      }
      sctx.stroke();
    }
    stale.style.display = state.isStale(Date.now()) ? "inline" : "none";
    // render at display rate from the latest snapshot; telemetry arriving
    // faster than the refresh simply overwrites the ring (frames drop,
    // the UI never lags behind)
    requestAnimationFrame(draw);
  }

  conn.connect();
  syncControls();
  requestAnimationFrame(draw);
}

if (typeof document !== "undefined" && document.getElementById("status")) {
  start();
}
