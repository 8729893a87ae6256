"""WAV file helpers: 16-bit PCM and float32, two channels, 16/32 kHz."""

from __future__ import annotations

import numpy as np
from scipy.io import wavfile

ACCEPTED_RATES = (16000, 32000)


class AudioFormatError(ValueError):
    pass


def read_wav(path, expected_rate: int | None = None) -> tuple[int, np.ndarray]:
    """Read a stereo WAV as float64 in [-1, 1), shape (n, 2)."""
    rate, data = wavfile.read(path)
    if data.ndim != 2 or data.shape[1] != 2:
        raise AudioFormatError("two channels required")
    if rate not in ACCEPTED_RATES:
        raise AudioFormatError(f"unsupported sample rate {rate}; accepted: {ACCEPTED_RATES}")
    if expected_rate is not None and rate != expected_rate:
        raise AudioFormatError(f"sample rate {rate} does not match config {expected_rate}")
    if data.dtype == np.int16:
        x = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32 or data.dtype == np.float64:
        x = data.astype(np.float64)
    elif data.dtype == np.int32:
        x = data.astype(np.float64) / 2147483648.0
    else:
        raise AudioFormatError(f"unsupported sample format {data.dtype}")
    return rate, x


def write_wav(path, rate: int, data: np.ndarray, dtype: str = "float32") -> None:
    data = np.asarray(data)
    if dtype == "float32":
        wavfile.write(path, rate, data.astype(np.float32))
    elif dtype == "int16":
        clipped = np.clip(data, -1.0, 32767.0 / 32768.0)
        wavfile.write(path, rate, np.round(clipped * 32768.0).astype(np.int16))
    else:
        raise AudioFormatError(f"unsupported output format {dtype}")
