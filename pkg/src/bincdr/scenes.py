"""Synthetic binaural scenes with known direct/diffuse composition.

Replaces room simulation for desk-scale testing: a broadside or lateral
direct component (fractional-delay ITD), a diffuse component synthesized
by per-frequency 2x2 mixing of independent noises so its coherence
follows the spherically isotropic sinc model, and an optional low-passed
noise floor. Ground-truth per-band direct-to-diffuse ratios come out
alongside the signal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sps

from .cdr import diffuse_coherence

SINC_TAPS = 64  # windowed-sinc fractional delay length
DIRECT_ONLY = float("inf")
DIFFUSE_ONLY = 0.0


@dataclass(frozen=True)
class SceneSpec:
    sample_rate: int = 32000
    duration_s: float = 10.0
    seed: int = 0
    direct_kind: str = "speech_noise"   # speech_noise | tone | white
    direct_level_db: float | None = 0.0  # None disables the component
    azimuth_deg: float = 0.0
    tone_hz: float = 1000.0
    diffuse_level_db: float | None = 0.0
    lowpass_level_db: float | None = None
    lowpass_cutoff_hz: float = 400.0
    d_mic: float = 0.17
    c: float = 343.0

    def __post_init__(self):
        if not -90.0 <= self.azimuth_deg <= 90.0:
            raise ValueError("azimuth must be in [-90, 90] degrees")
        if self.duration_s <= 0:
            raise ValueError("duration must be positive")

    @classmethod
    def from_json(cls, text: str) -> "SceneSpec":
        return cls(**json.loads(text))


def fractional_delay(x: np.ndarray, delay_samples: float) -> np.ndarray:
    """Delay a signal by a (possibly fractional) number of samples."""
    if delay_samples < 0:
        raise ValueError("delay must be nonnegative")
    n_int = int(np.floor(delay_samples))
    frac = delay_samples - n_int
    half = SINC_TAPS // 2
    t = np.arange(-half, half) - frac
    kernel = np.sinc(t) * np.hamming(SINC_TAPS)
    kernel /= kernel.sum()
    y = np.convolve(x, kernel)[half:half + len(x)]
    out = np.zeros_like(x)
    out[n_int:] = y[:len(x) - n_int]
    return out


def synth_direct(signal: np.ndarray, azimuth_deg: float, d_mic: float = 0.17,
                 c: float = 343.0, sample_rate: int = 32000) -> np.ndarray:
    """Directional two-channel image of a mono source.

    Broadside duplicates the signal; a lateral source lags on the far ear
    by tau = d_mic * sin(azimuth) / c. Positive azimuth is toward the
    right ear, so the left channel carries the delay.
    """
    if not -90.0 <= azimuth_deg <= 90.0:
        raise ValueError("azimuth must be in [-90, 90] degrees")
    signal = np.asarray(signal, dtype=float)
    tau = d_mic * np.sin(np.deg2rad(abs(azimuth_deg))) / c
    if tau == 0.0:
        return np.stack([signal, signal], axis=1)
    delayed = fractional_delay(signal, tau * sample_rate)
    if azimuth_deg > 0:
        return np.stack([delayed, signal], axis=1)
    return np.stack([signal, delayed], axis=1)


def synth_diffuse(duration_s: float, sample_rate: int = 32000,
                  d_mic: float = 0.17, c: float = 343.0,
                  seed: int = 0) -> np.ndarray:
    """Two-channel noise whose coherence follows the sinc diffuse model.

    Independent white noises are mixed per STFT bin by the Cholesky factor
    of [[1, g], [g, 1]] with g the model coherence at the bin frequency.
    """
    if duration_s < 1.0:
        raise ValueError("need at least 1 s for statistical validity")
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate))
    noises = rng.standard_normal((2, n))
    nperseg = 1024
    f, t, spec = sps.stft(noises, fs=sample_rate, nperseg=nperseg, axis=-1)
    g = np.clip(diffuse_coherence(f, d_mic, c), -0.999, 0.999)
    # Cholesky of [[1, g], [g, 1]] applied per frequency row
    mixed = np.empty_like(spec)
    mixed[0] = spec[0]
    mixed[1] = g[:, None] * spec[0] + np.sqrt(1.0 - g[:, None] ** 2) * spec[1]
    _, y = sps.istft(mixed, fs=sample_rate, nperseg=nperseg)
    y = y[:, :n]
    return y.T * (1.0 / np.std(y))


def speech_shaped_noise(duration_s: float, sample_rate: int,
                        seed: int = 0) -> np.ndarray:
    """Stationary noise with a speech-like spectral tilt and syllabic
    amplitude modulation, giving active frames and pauses."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate))
    white = rng.standard_normal(n)
    b, a = sps.butter(2, 800.0 / (sample_rate / 2.0), btype="low")
    shaped = sps.lfilter(b, a, white)
    t = np.arange(n) / sample_rate
    envelope = 0.55 + 0.45 * np.cos(2.0 * np.pi * 3.0 * t + rng.uniform(0, 2 * np.pi))
    x = shaped * envelope
    return x / np.std(x)


def _direct_source(spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    n = int(round(spec.duration_s * spec.sample_rate))
    if spec.direct_kind == "speech_noise":
        return speech_shaped_noise(spec.duration_s, spec.sample_rate, spec.seed + 1)
    if spec.direct_kind == "tone":
        t = np.arange(n) / spec.sample_rate
        return np.sqrt(2.0) * np.sin(2.0 * np.pi * spec.tone_hz * t)
    if spec.direct_kind == "white":
        x = rng.standard_normal(n)
        return x / np.std(x)
    raise ValueError(f"unknown direct source kind: {spec.direct_kind}")


def _band_powers(x: np.ndarray, sample_rate: int,
                 edges: np.ndarray) -> np.ndarray:
    if x.ndim == 2:
        f, pxx = sps.welch(x, fs=sample_rate, nperseg=2048, axis=0)
        pxx = pxx.mean(axis=1)
    else:
        f, pxx = sps.welch(x, fs=sample_rate, nperseg=2048)
    out = np.empty(len(edges) - 1)
    for i in range(len(edges) - 1):
        m = (f >= edges[i]) & (f < edges[i + 1])
        out[i] = float(np.trapezoid(pxx[m], f[m])) if m.sum() > 1 else 0.0
    return out


def octave_band_edges(sample_rate: int) -> np.ndarray:
    edges = [125.0]
    while edges[-1] * 2.0 < sample_rate / 2.0:
        edges.append(edges[-1] * 2.0)
    edges.append(sample_rate / 2.0)
    return np.asarray(edges)


def mix_scene(spec: SceneSpec) -> tuple[np.ndarray, dict]:
    """Level-calibrated scene plus ground-truth per-band direct/diffuse ratio.

    Returns (signal (n, 2), info) where info carries the octave-band DRR
    proxy in dB (inf for direct-only, 0-ratio sentinel for diffuse-only)
    and any normalization applied to avoid clipping.
    """
    rng = np.random.default_rng(spec.seed)
    n = int(round(spec.duration_s * spec.sample_rate))
    total = np.zeros((n, 2))
    direct = None
    diffuse = None

    if spec.direct_level_db is not None:
        src = _direct_source(spec, rng)
        direct = synth_direct(src, spec.azimuth_deg, spec.d_mic, spec.c,
                              spec.sample_rate)
        direct = direct * 10.0 ** (spec.direct_level_db / 20.0)
        total += direct
    if spec.diffuse_level_db is not None:
        diffuse = synth_diffuse(spec.duration_s, spec.sample_rate, spec.d_mic,
                                spec.c, spec.seed + 7)
        diffuse = diffuse * 10.0 ** (spec.diffuse_level_db / 20.0)
        total += diffuse
    if spec.lowpass_level_db is not None:
        white = rng.standard_normal((n, 2))
        b, a = sps.butter(4, spec.lowpass_cutoff_hz / (spec.sample_rate / 2.0),
                          btype="low")
        lp = sps.lfilter(b, a, white, axis=0)
        lp = lp / np.std(lp) * 10.0 ** (spec.lowpass_level_db / 20.0)
        total += lp

    scale = 1.0
    peak = float(np.max(np.abs(total), initial=0.0))
    if peak > 0.99:
        scale = 0.99 / peak
        total = total * scale
        direct = direct * scale if direct is not None else None
        diffuse = diffuse * scale if diffuse is not None else None

    edges = octave_band_edges(spec.sample_rate)
    if direct is not None and diffuse is not None:
        pd = _band_powers(direct, spec.sample_rate, edges)
        pv = _band_powers(diffuse, spec.sample_rate, edges)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pv > 0, pd / pv, np.inf)
        band_ratio = ratio.tolist()
    elif direct is not None:
        band_ratio = [DIRECT_ONLY] * (len(edges) - 1)
    else:
        band_ratio = [DIFFUSE_ONLY] * (len(edges) - 1)

    info = {
        "band_edges_hz": edges.tolist(),
        "band_direct_to_diffuse": band_ratio,
        "normalization_scale": scale,
        "components": {
            "direct": direct,
            "diffuse": diffuse,
        },
    }
    return total, info
