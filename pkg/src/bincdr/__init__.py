"""Binaural coherence-to-diffuse ratio speech enhancement toolkit."""

from .cdr import EnhancerParams, baseline_cdr_p3, diffuse_coherence, new_cdr
from .coherence import PsdState, coherence, update_psd
from .engine import (FrameProcessor, ParamMailbox, PipelineConfig,
                     StreamProcessor, Telemetry, process_file)
from .gain import apply_gain, compute_gain
from .stft import (Analyzer, FrameSpectra, StftConfig, Synthesizer,
                   streaming_output_schedule)

__all__ = [
    "Analyzer", "EnhancerParams", "FrameProcessor", "FrameSpectra",
    "ParamMailbox", "PipelineConfig", "PsdState", "StftConfig",
    "StreamProcessor", "Synthesizer", "Telemetry", "apply_gain",
    "baseline_cdr_p3", "coherence", "compute_gain", "diffuse_coherence",
    "new_cdr", "process_file", "streaming_output_schedule", "update_psd",
]

__version__ = "0.1.0"
