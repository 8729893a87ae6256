"""Short-time analysis/synthesis with weighted overlap-add reconstruction.

Both the offline and the streaming pipeline share the same analysis and
synthesis path; streaming merely feeds hop-sized blocks as they arrive.
The algorithmic input-to-output delay of the chain is ``window_len - hop``
samples (256 samples = 8 ms for the 512/256 streaming setup at 32 kHz).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import get_window


class ConfigError(ValueError):
    """Raised for invalid framing configurations or block sizes."""


@dataclass(frozen=True)
class StftConfig:
    sample_rate_hz: int = 16000
    window_len: int = 1024
    fft_len: int = 1024
    hop: int = 128
    window_kind: str = "hann"
    mode: str = "offline"

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ConfigError("sample_rate_hz must be positive")
        if self.window_len <= 0 or self.hop <= 0:
            raise ConfigError("window_len and hop must be positive")
        if self.fft_len < self.window_len:
            raise ConfigError("fft_len must be >= window_len (zero-padding only)")
        if self.hop > self.window_len or self.window_len % self.hop != 0:
            raise ConfigError("hop must divide window_len")
        if self.window_kind != "hann":
            raise ConfigError(f"unsupported window: {self.window_kind}")
        if self.mode not in ("offline", "streaming"):
            raise ConfigError(f"unknown mode: {self.mode}")

    @property
    def n_bins(self) -> int:
        return self.fft_len // 2 + 1

    @property
    def bin_freqs_hz(self) -> np.ndarray:
        return np.fft.rfftfreq(self.fft_len, d=1.0 / self.sample_rate_hz)

    @classmethod
    def offline_default(cls) -> "StftConfig":
        return cls(16000, 1024, 1024, 128, "hann", "offline")

    @classmethod
    def streaming_default(cls) -> "StftConfig":
        return cls(32000, 512, 1024, 256, "hann", "streaming")


@dataclass
class FrameSpectra:
    frame_index: int
    left: np.ndarray   # complex, fft_len//2 + 1 bins
    right: np.ndarray

    def copy(self) -> "FrameSpectra":
        return FrameSpectra(self.frame_index, self.left.copy(), self.right.copy())


def analysis_window(cfg: StftConfig) -> np.ndarray:
    # periodic Hann; COLA holds for every hop dividing window_len/2
    return get_window("hann", cfg.window_len, fftbins=True)


def synthesis_window(cfg: StftConfig) -> np.ndarray:
    """Canonical dual of the analysis window for the configured hop.

    Built so that sum_i w(n + i*hop) * s(n + i*hop) == 1 exactly in the
    steady state, for any hop dividing window_len.
    """
    w = analysis_window(cfg)
    norm = np.zeros(cfg.hop)
    for j in range(0, cfg.window_len, cfg.hop):
        norm += w[j:j + cfg.hop] ** 2
    return w / np.tile(norm, cfg.window_len // cfg.hop)


def streaming_output_schedule(cfg: StftConfig) -> int:
    """Algorithmic input-to-output delay in samples for the streaming chain.

    The output block emitted on arrival of a hop-sized input block covers
    samples ``window_len - hop`` behind the newest input sample: at 50%
    overlap the buffer holds the second half of the previous segment plus
    the first half of the current one, halving the latency relative to a
    whole-window wait.
    """
    if cfg.mode != "streaming":
        raise ConfigError("output schedule is defined for streaming mode only")
    return cfg.window_len - cfg.hop


class Analyzer:
    """Stateful hop-in, frame-out analysis for one two-channel stream."""

    def __init__(self, cfg: StftConfig, window: np.ndarray | None = None):
        self.cfg = cfg
        self.window = analysis_window(cfg) if window is None else np.asarray(window, dtype=float)
        self._tail = np.zeros((cfg.window_len - cfg.hop, 2))
        self._frame = 0

    def push(self, block: np.ndarray) -> FrameSpectra:
        block = np.asarray(block, dtype=float)
        if block.ndim != 2 or block.shape != (self.cfg.hop, 2):
            raise ConfigError(
                f"input block must be ({self.cfg.hop}, 2), got {block.shape}")
        seg = np.concatenate([self._tail, block], axis=0)
        self._tail = seg[self.cfg.hop:].copy()
        windowed = seg * self.window[:, None]
        spec = np.fft.rfft(windowed, n=self.cfg.fft_len, axis=0)
        out = FrameSpectra(self._frame, spec[:, 0], spec[:, 1])
        self._frame += 1
        return out


class Synthesizer:
    """Weighted overlap-add reconstruction; emits hop samples per frame."""

    def __init__(self, cfg: StftConfig):
        self.cfg = cfg
        self.window = synthesis_window(cfg)
        self._ola = np.zeros((cfg.window_len, 2))

    def push(self, spectra: FrameSpectra) -> np.ndarray:
        cfg = self.cfg
        spec = np.stack([spectra.left, spectra.right], axis=1)
        if spec.shape[0] != cfg.n_bins:
            raise ConfigError(f"expected {cfg.n_bins} bins, got {spec.shape[0]}")
        seg = np.fft.irfft(spec, n=cfg.fft_len, axis=0)[:cfg.window_len]
        self._ola += seg * self.window[:, None]
        out = self._ola[:cfg.hop].copy()
        self._ola[:-cfg.hop] = self._ola[cfg.hop:]
        self._ola[-cfg.hop:] = 0.0
        return out
