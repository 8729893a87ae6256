"""Coherence-to-diffuse ratio estimators.

Two estimators are provided: the parameterized directional estimator
driven only by the complex coherence and a tunable directivity factor S,
and the DOA-independent baseline that compares the observed coherence
against the spherically isotropic (sinc) diffuse-field model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coherence import MAG_EPS

DENOM_EPS = 1e-12        # |sqrt argument| below this counts as the coherent pole
COHERENT_PHASE_EPS = 1e-6  # |arg gamma| below this at full magnitude -> cap


@dataclass(frozen=True)
class EnhancerParams:
    """Tunable state of the enhancer; hot-swappable as one snapshot."""

    s: float = 1.0
    mu: float = 1.0
    g_min: float = 0.1
    cdr_max: float = 1e4
    d_mic: float = 0.17
    c: float = 343.0
    smoothing: float = 0.72

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("S must be positive")
        if not 0.0 < self.g_min <= 1.0:
            raise ValueError("g_min must be in (0, 1]")
        if self.cdr_max < 1.0:
            raise ValueError("cdr_max must be >= 1")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.d_mic <= 0 or self.c <= 0:
            raise ValueError("d_mic and c must be positive")
        if not 0.0 <= self.smoothing < 1.0:
            raise ValueError("smoothing factor must be in [0, 1)")

    def replace(self, **kw) -> "EnhancerParams":
        from dataclasses import replace
        return replace(self, **kw)


def new_cdr(gamma, s: float, cdr_max: float = 1e4):
    """Directional CDR from the complex coherence, scalar or array.

    Evaluated with principal branches of complex log and sqrt (phase in
    (-pi, pi]); negative real parts clamp to 0 and the result is capped at
    cdr_max. A vanishing sqrt argument (the fully coherent pole at
    gamma = 1) yields cdr_max, as does a clamped gamma sitting on the
    positive real axis at full magnitude, which is the same pole seen
    through the magnitude clamp.
    """
    if s <= 0:
        raise ValueError("S must be positive")
    gamma = np.asarray(gamma, dtype=complex)
    if not np.all(np.isfinite(gamma)):
        raise ValueError("non-finite coherence value")
    mag = np.abs(gamma)
    if np.any(mag > 1.0 + 1e-12) or np.any(mag < MAG_EPS - 1e-18):
        raise ValueError("coherence magnitude outside [1e-6, 1]")
    theta = np.angle(gamma)

    # cos(theta + pi) written as -cos(theta) so conjugation is bit-exact
    num = np.exp(gamma + np.cos((1.0 - np.pi / 2.0) * theta))
    inner = gamma + s * np.log(gamma) - np.cos(theta)
    den = np.sqrt(inner)

    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.real(num / den)
    pole = np.abs(inner) < DENOM_EPS
    coherent = (mag >= 1.0 - MAG_EPS - 1e-12) & (np.abs(theta) < COHERENT_PHASE_EPS)
    val = np.where(pole | coherent, cdr_max, val)
    out = np.clip(val, 0.0, cdr_max)
    return float(out) if out.ndim == 0 else out


def diffuse_coherence(f, d_mic: float, c: float = 343.0):
    """Spherically isotropic two-point coherence sin(x)/x, x = 2 pi f d / c."""
    if d_mic <= 0 or c <= 0:
        raise ValueError("d_mic and c must be positive")
    # numpy's sinc is the normalized sin(pi x)/(pi x)
    out = np.sinc(2.0 * np.asarray(f, dtype=float) * d_mic / c)
    return float(out) if out.ndim == 0 else out


def baseline_cdr_p3(gamma, gamma_n, cdr_max: float = 1e4):
    """DOA-independent baseline CDR from coherence vs the diffuse model."""
    gamma = np.asarray(gamma, dtype=complex)
    gamma_n = np.asarray(gamma_n, dtype=float)
    re = np.real(gamma)
    mag2 = np.abs(gamma) ** 2
    rad = (gamma_n ** 2 * re ** 2 - gamma_n ** 2 * mag2
           + gamma_n ** 2 - 2.0 * gamma_n * re + mag2)
    num = gamma_n * re - mag2 - np.sqrt(np.maximum(rad, 0.0))
    den = mag2 - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / den
    val = np.where(np.abs(den) < DENOM_EPS, cdr_max, val)
    out = np.clip(np.nan_to_num(val, nan=0.0, posinf=cdr_max, neginf=0.0),
                  0.0, cdr_max)
    return float(out) if out.ndim == 0 else out


def cdr_frame(gamma: np.ndarray, params: EnhancerParams, estimator: str,
              bin_freqs_hz: np.ndarray | None = None) -> np.ndarray:
    """Per-bin CDR for one frame with the selected estimator."""
    if estimator == "new":
        return new_cdr(gamma, params.s, params.cdr_max)
    if estimator == "p3":
        if bin_freqs_hz is None:
            raise ValueError("p3 estimator needs bin center frequencies")
        gamma_n = diffuse_coherence(bin_freqs_hz, params.d_mic, params.c)
        return baseline_cdr_p3(gamma, gamma_n, params.cdr_max)
    raise ValueError(f"unknown estimator: {estimator}")
