"""CDR-to-gain mapping and identical bilateral application."""

from __future__ import annotations

import numpy as np

from .stft import FrameSpectra

GAIN_RULES = ("squared_wiener", "magnitude_subtraction")


def compute_gain(cdr, mu: float = 1.0, g_min: float = 0.1,
                 rule: str = "squared_wiener"):
    """Spectral gain from CDR; result lies in [g_min, 1].

    squared_wiener: max(g_min, (1 - mu/(CDR+1))^2) with the pre-square term
    clamped at 0 so mu > 1 cannot re-inflate heavily noisy bins.
    magnitude_subtraction: max(g_min, 1 - mu/sqrt(CDR+1)), the rule the
    baseline estimators are conventionally paired with.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    if not 0.0 < g_min <= 1.0:
        raise ValueError("g_min must be in (0, 1]")
    cdr = np.asarray(cdr, dtype=float)
    if rule == "squared_wiener":
        g = np.maximum(0.0, 1.0 - mu / (cdr + 1.0)) ** 2
    elif rule == "magnitude_subtraction":
        g = 1.0 - mu / np.sqrt(cdr + 1.0)
    else:
        raise ValueError(f"unknown gain rule: {rule}")
    out = np.clip(np.maximum(g, g_min), g_min, 1.0)
    return float(out) if out.ndim == 0 else out


def apply_gain(frame: FrameSpectra, gain: np.ndarray) -> FrameSpectra:
    """Scale both channels by the identical real gain, bin-wise.

    Interaural phase and level ratios are untouched because the same real
    factor multiplies each ear.
    """
    gain = np.asarray(gain, dtype=float)
    if gain.shape != frame.left.shape:
        raise ValueError(f"gain shape {gain.shape} != spectra shape {frame.left.shape}")
    return FrameSpectra(frame.frame_index, frame.left * gain, frame.right * gain)
