"""Pipeline orchestration: STFT -> coherence -> CDR -> gain -> WOLA.

Offline file processing and hop-by-hop streaming share one frame
processor. Parameter changes arrive through a single-producer mailbox
drained once per frame, so every frame runs under one immutable
parameter snapshot. Telemetry is pushed to a bounded queue and dropped,
never blocked on, when the consumer falls behind.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass, field

import numpy as np

from .cdr import EnhancerParams, cdr_frame
from .coherence import PsdState, coherence as spatial_coherence, update_psd
from .gain import apply_gain, compute_gain
from .stft import Analyzer, ConfigError, FrameSpectra, StftConfig, Synthesizer

N_BANDS = 16
BAND_LO_HZ = 100.0

PARAM_BOUNDS = {
    "S": (0.01, 1000.0),
    "lambda": (0.0, 0.999),
    "mu": (1e-9, 2.0),
    "g_min": (1e-9, 1.0),
}


@dataclass(frozen=True)
class PipelineConfig:
    stft: StftConfig = field(default_factory=StftConfig.offline_default)
    params: EnhancerParams = field(default_factory=EnhancerParams)
    estimator: str = "new"
    gain_rule: str = "squared_wiener"
    telemetry_stride: int = 8

    def __post_init__(self):
        if self.estimator not in ("new", "p3"):
            raise ConfigError(f"unknown estimator: {self.estimator}")
        if self.telemetry_stride < 1:
            raise ConfigError("telemetry_stride must be >= 1")


@dataclass
class Telemetry:
    frame: int
    band_cdr: list[float]
    band_gain: list[float]
    mean_coh: float

    def to_json(self) -> str:
        return json.dumps({"frame": self.frame,
                           "band_cdr": self.band_cdr,
                           "band_gain": self.band_gain,
                           "mean_coh": self.mean_coh})


def band_edges_hz(sample_rate_hz: int, n_bands: int = N_BANDS) -> np.ndarray:
    return np.geomspace(BAND_LO_HZ, sample_rate_hz / 2.0, n_bands + 1)


def band_average(values: np.ndarray, bin_freqs: np.ndarray,
                 edges: np.ndarray) -> np.ndarray:
    """Mean of per-bin values in each band; empty bands repeat the global mean."""
    out = np.empty(len(edges) - 1)
    fallback = float(np.mean(values))
    for i in range(len(edges) - 1):
        mask = (bin_freqs >= edges[i]) & (bin_freqs < edges[i + 1])
        if i == len(edges) - 2:
            mask |= bin_freqs == edges[-1]
        out[i] = float(np.mean(values[mask])) if mask.any() else fallback
    return out


class ParamMailbox:
    """Single-producer mailbox for live parameter and bypass updates."""

    def __init__(self, params: EnhancerParams, bypass: bool = False):
        self._lock = threading.Lock()
        self._params = params
        self._bypass = bypass
        self._dirty = False

    def set_param(self, name: str, value: float) -> EnhancerParams:
        if name not in PARAM_BOUNDS:
            raise KeyError(f"unknown parameter: {name}")
        lo, hi = PARAM_BOUNDS[name]
        value = float(value)
        if not np.isfinite(value) or not lo <= value <= hi:
            raise ValueError(f"{name} out of range [{lo}, {hi}]: {value}")
        attr = {"S": "s", "lambda": "smoothing", "mu": "mu", "g_min": "g_min"}[name]
        with self._lock:
            self._params = self._params.replace(**{attr: value})
            self._dirty = True
            return self._params

    def set_bypass(self, on: bool) -> None:
        with self._lock:
            self._bypass = bool(on)
            self._dirty = True

    def snapshot(self) -> tuple[EnhancerParams, bool]:
        with self._lock:
            self._dirty = False
            return self._params, self._bypass

    def peek(self) -> tuple[EnhancerParams, bool]:
        with self._lock:
            return self._params, self._bypass


class FrameProcessor:
    """Processes hop-sized stereo blocks under a per-frame parameter snapshot."""

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.analyzer = Analyzer(cfg.stft)
        self.synthesizer = Synthesizer(cfg.stft)
        self.psd = PsdState(cfg.stft.n_bins, cfg.params.smoothing)
        self._bin_freqs = cfg.stft.bin_freqs_hz
        self._edges = band_edges_hz(cfg.stft.sample_rate_hz)
        self._frames = 0

    def process_block(self, block: np.ndarray, params: EnhancerParams,
                      bypass: bool = False) -> tuple[np.ndarray, Telemetry]:
        frame = self.analyzer.push(block)
        self.psd.smoothing = params.smoothing
        update_psd(self.psd, frame)
        gamma = spatial_coherence(self.psd)
        cdr = cdr_frame(gamma, params, self.cfg.estimator, self._bin_freqs)
        if bypass:
            gains = np.ones_like(cdr)
        else:
            gains = compute_gain(cdr, params.mu, params.g_min, self.cfg.gain_rule)
        out = self.synthesizer.push(apply_gain(frame, gains))
        telemetry = Telemetry(
            frame=frame.frame_index,
            band_cdr=band_average(cdr, self._bin_freqs, self._edges).tolist(),
            band_gain=band_average(gains, self._bin_freqs, self._edges).tolist(),
            mean_coh=float(np.mean(np.abs(gamma))),
        )
        self._frames += 1
        return out, telemetry


def process_file(samples: np.ndarray, cfg: PipelineConfig,
                 collect_telemetry: bool = False,
                 ) -> tuple[np.ndarray, list[Telemetry]]:
    """Enhance a whole two-channel signal; output matches the input length.

    The fixed analysis/synthesis delay (window_len - hop samples) is
    compensated by trimming, so outputs align with inputs sample-for-sample.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ConfigError("two channels required")
    stft = cfg.stft
    n = samples.shape[0]
    delay = stft.window_len - stft.hop
    padded = np.concatenate(
        [samples, np.zeros((delay + (-n - delay) % stft.hop + stft.hop, 2))])
    proc = FrameProcessor(cfg)
    blocks = []
    telem: list[Telemetry] = []
    for i in range(0, padded.shape[0], stft.hop):
        out, t = proc.process_block(padded[i:i + stft.hop], cfg.params)
        blocks.append(out)
        if collect_telemetry and t.frame % cfg.telemetry_stride == 0:
            telem.append(t)
    y = np.concatenate(blocks, axis=0)[delay:delay + n]
    return y, telem


class StreamProcessor:
    """Hop-by-hop processing loop with live parameter control and telemetry.

    Drives FrameProcessor over an iterable of hop-sized blocks; the mailbox
    is drained exactly once per frame and telemetry is offered (never
    pushed blockingly) to a bounded queue every ``telemetry_stride`` frames.
    """

    def __init__(self, cfg: PipelineConfig, mailbox: ParamMailbox | None = None,
                 telemetry_maxsize: int = 64):
        if cfg.stft.mode != "streaming":
            raise ConfigError("StreamProcessor requires a streaming StftConfig")
        self.cfg = cfg
        self.mailbox = mailbox if mailbox is not None else ParamMailbox(cfg.params)
        self.telemetry = queue.Queue(maxsize=telemetry_maxsize)
        self.processor = FrameProcessor(cfg)
        self.dropped_telemetry = 0
        self._stop = threading.Event()

    def stop(self) -> None:
        self._stop.set()

    def process_block(self, block: np.ndarray) -> np.ndarray:
        params, bypass = self.mailbox.snapshot()
        out, telem = self.processor.process_block(block, params, bypass)
        if telem.frame % self.cfg.telemetry_stride == 0:
            try:
                self.telemetry.put_nowait(telem)
            except queue.Full:
                self.dropped_telemetry += 1
        return out

    def run(self, blocks, sink=None, pace_seconds: float = 0.0) -> None:
        import time
        for block in blocks:
            if self._stop.is_set():
                break
            out = self.process_block(block)
            if sink is not None:
                sink(out)
            if pace_seconds > 0.0:
                time.sleep(pace_seconds)


def looped_blocks(samples: np.ndarray, hop: int, loop: bool = False):
    """Yield hop-sized blocks from a signal, optionally looping forever."""
    n = (samples.shape[0] // hop) * hop
    if n == 0:
        return
    while True:
        for i in range(0, n, hop):
            yield samples[i:i + hop]
        if not loop:
            return
