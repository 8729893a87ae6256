"""Recursive cross-/auto-power estimation and complex spatial coherence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .stft import FrameSpectra

MAG_EPS = 1e-6          # coherence magnitude clamp: [MAG_EPS, 1 - MAG_EPS]
DENOM_FLOOR_REL = 1e-12  # denominator floor relative to the running maximum


class NonFiniteFrameError(ValueError):
    """Input frame contained NaN or infinity; state was left unchanged."""


@dataclass
class PsdState:
    """Recursively smoothed auto/cross power spectra for one stream.

    phi(m,k) = lambda * phi(m-1,k) + (1 - lambda) * X_x(m,k) X_y*(m,k);
    the first frame initializes phi to the instantaneous periodogram to
    avoid an undefined-coherence transient.
    """

    n_bins: int
    smoothing: float = 0.72
    phi_ll: np.ndarray = field(init=False)
    phi_rr: np.ndarray = field(init=False)
    phi_lr: np.ndarray = field(init=False)
    initialized: bool = field(init=False, default=False)
    _denom_max: float = field(init=False, default=0.0)

    def __post_init__(self):
        if not 0.0 <= self.smoothing < 1.0:
            raise ValueError("smoothing factor must be in [0, 1)")
        self.phi_ll = np.zeros(self.n_bins)
        self.phi_rr = np.zeros(self.n_bins)
        self.phi_lr = np.zeros(self.n_bins, dtype=complex)


def update_psd(state: PsdState, frame: FrameSpectra) -> PsdState:
    """Advance the PSD recursion by one frame, in place."""
    left, right = frame.left, frame.right
    if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
        raise NonFiniteFrameError(f"non-finite spectra in frame {frame.frame_index}")
    p_ll = np.abs(left) ** 2
    p_rr = np.abs(right) ** 2
    p_lr = left * np.conj(right)
    if not state.initialized:
        state.phi_ll = p_ll
        state.phi_rr = p_rr
        state.phi_lr = p_lr
        state.initialized = True
    else:
        lam = state.smoothing
        state.phi_ll = lam * state.phi_ll + (1.0 - lam) * p_ll
        state.phi_rr = lam * state.phi_rr + (1.0 - lam) * p_rr
        state.phi_lr = lam * state.phi_lr + (1.0 - lam) * p_lr
    denom = np.sqrt(state.phi_ll * state.phi_rr)
    m = float(denom.max(initial=0.0))
    if m > state._denom_max:
        state._denom_max = m
    return state


def coherence(state: PsdState, floor: float | None = None) -> np.ndarray:
    """Complex coherence per bin, magnitude clamped to [MAG_EPS, 1 - MAG_EPS].

    The denominator is floored at ``DENOM_FLOOR_REL`` times the running
    maximum of sqrt(phi_ll * phi_rr) so silence maps to zero coherence
    instead of 0/0.
    """
    if not state.initialized:
        raise ValueError("PSD state has no frames yet")
    denom = np.sqrt(state.phi_ll * state.phi_rr)
    if floor is None:
        floor = DENOM_FLOOR_REL * state._denom_max
    floor = max(floor, np.finfo(float).tiny)
    gamma = state.phi_lr / np.maximum(denom, floor)
    return clamp_magnitude(gamma)


def clamp_magnitude(gamma: np.ndarray) -> np.ndarray:
    """Clamp |gamma| into [MAG_EPS, 1 - MAG_EPS], preserving phase."""
    gamma = np.asarray(gamma, dtype=complex)
    mag = np.abs(gamma)
    out = gamma.copy()
    hi = mag > 1.0 - MAG_EPS
    out[hi] = gamma[hi] * ((1.0 - MAG_EPS) / mag[hi])
    lo = mag < MAG_EPS
    # zero coherence has no phase; pin it to the positive real axis
    out[lo] = np.where(mag[lo] > 0.0,
                       gamma[lo] * (MAG_EPS / np.maximum(mag[lo], np.finfo(float).tiny)),
                       MAG_EPS + 0.0j)
    return out
