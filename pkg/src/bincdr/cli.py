"""Command-line entry point: enhance, stream, locus, scatter, synth, eval."""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import audio_io, control, metrics, scenes
from .cdr import EnhancerParams, new_cdr
from .coherence import PsdState, coherence as coherence_of, update_psd
from .engine import (FrameProcessor, ParamMailbox, PipelineConfig,
                     StreamProcessor, looped_blocks, process_file)
from .gain import compute_gain
from .stft import Analyzer, StftConfig


def _parse_float_list(text: str) -> list[float]:
    """Comma list of floats; 'a..b' and 'a..b:n' expand to linear ranges."""
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            body, _, count = part.partition(":")
            lo, hi = body.split("..")
            n = int(count) if count else 10
            out.extend(np.linspace(float(lo), float(hi), n).tolist())
        elif part:
            out.append(float(part))
    return out


def _apply_config_file(args: argparse.Namespace) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    with open(path) as fh:
        cfg = json.load(fh)
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def _fill_defaults(args: argparse.Namespace, defaults: dict) -> None:
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _pipeline_config(args, stft: StftConfig) -> PipelineConfig:
    if args.S <= 0:
        raise SystemExit("error: S must be positive")
    params = EnhancerParams(s=args.S, mu=args.mu, g_min=args.gmin,
                            smoothing=args.lambda_)
    return PipelineConfig(stft=stft, params=params, estimator=args.estimator,
                          gain_rule=args.gain)


PARAM_DEFAULTS = dict(S=1.0, lambda_=0.72, mu=1.0, gmin=0.1,
                      estimator="new", gain="squared_wiener")


def cmd_enhance(args) -> int:
    _fill_defaults(args, PARAM_DEFAULTS)
    rate, x = audio_io.read_wav(args.infile)
    base = StftConfig.offline_default()
    stft = StftConfig(rate, base.window_len, base.fft_len, base.hop,
                      mode="offline")
    cfg = _pipeline_config(args, stft)
    y, telem = process_file(x, cfg, collect_telemetry=args.telemetry is not None)
    audio_io.write_wav(args.out, rate, y)
    if args.telemetry:
        with open(args.telemetry, "w") as fh:
            for t in telem:
                fh.write(t.to_json() + "\n")
    return 0


def cmd_stream(args) -> int:
    import threading
    _fill_defaults(args, PARAM_DEFAULTS)
    rate, x = audio_io.read_wav(args.infile)
    base = StftConfig.streaming_default()
    stft = StftConfig(rate, base.window_len, base.fft_len, base.hop,
                      mode="streaming")
    cfg = _pipeline_config(args, stft)
    cfg = PipelineConfig(stft=stft, params=cfg.params, estimator=cfg.estimator,
                         gain_rule=cfg.gain_rule,
                         telemetry_stride=args.telemetry_stride)
    sp = StreamProcessor(cfg)
    out_blocks: list[np.ndarray] = []
    sink = out_blocks.append if args.out else None
    pace = stft.hop / rate if args.pace == "real" else 0.0

    def audio_loop():
        sp.run(looped_blocks(x, stft.hop, loop=args.loop), sink=sink,
               pace_seconds=pace)

    if args.control_port:
        t = threading.Thread(target=audio_loop, daemon=True)
        t.start()
        try:
            control.serve(sp.mailbox, sp.telemetry, args.host, args.control_port)
        except KeyboardInterrupt:
            pass
        sp.stop()
        t.join(timeout=5.0)
    else:
        audio_loop()
    if args.out and out_blocks:
        audio_io.write_wav(args.out, rate, np.concatenate(out_blocks, axis=0))
    return 0


def cmd_locus(args) -> int:
    _fill_defaults(args, dict(mu=1.0, gmin=0.1))
    s_values = _parse_float_list(args.S)
    a_values = _parse_float_list(args.A)
    if not s_values or not a_values:
        raise SystemExit("error: --S and --A lists must be non-empty")
    if args.theta_steps < 8:
        raise SystemExit("error: --theta-steps must be >= 8")
    thetas = np.linspace(0.0, 2.0 * np.pi, args.theta_steps)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["A", "theta", "S", "cdr", "gain"])
        for a in a_values:
            for theta in thetas:
                # map to the principal phase range used by the estimator
                gamma = a * np.exp(1j * np.angle(np.exp(1j * theta)))
                for s in s_values:
                    c = new_cdr(gamma, s)
                    g = compute_gain(c, args.mu, args.gmin)
                    writer.writerow([a, theta, s, c, g])
    return 0


def cmd_scatter(args) -> int:
    _fill_defaults(args, PARAM_DEFAULTS)
    rate, x = audio_io.read_wav(args.infile)
    base = StftConfig.offline_default()
    stft = StftConfig(rate, base.window_len, base.fft_len, base.hop,
                      mode="offline")
    cfg = _pipeline_config(args, stft)
    from .cdr import cdr_frame
    analyzer = Analyzer(stft)
    psd = PsdState(stft.n_bins, cfg.params.smoothing)
    freqs = stft.bin_freqs_hz
    n = (x.shape[0] // stft.hop) * stft.hop
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "bin", "freq", "re_gamma", "im_gamma", "cdr"])
        for i in range(0, n, stft.hop):
            frame = analyzer.push(x[i:i + stft.hop])
            update_psd(psd, frame)
            gamma = coherence_of(psd)
            cdr = cdr_frame(gamma, cfg.params, cfg.estimator, freqs)
            for k in range(stft.n_bins):
                writer.writerow([frame.frame_index, k, freqs[k],
                                 gamma[k].real, gamma[k].imag, cdr[k]])
    return 0


def cmd_synth(args) -> int:
    with open(args.spec) as fh:
        spec = scenes.SceneSpec.from_json(fh.read())
    signal, info = scenes.mix_scene(spec)
    audio_io.write_wav(args.out, spec.sample_rate, signal)
    sidecar = {
        "band_edges_hz": info["band_edges_hz"],
        "band_direct_to_diffuse": [
            v if np.isfinite(v) else None for v in info["band_direct_to_diffuse"]],
        "normalization_scale": info["normalization_scale"],
    }
    with open(str(args.out) + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
    return 0


def cmd_eval(args) -> int:
    ref_rate, ref = audio_io.read_wav(args.ref)
    proc_rate, proc = audio_io.read_wav(args.proc)
    if ref_rate != proc_rate or ref.shape != proc.shape:
        raise SystemExit("error: reference and processed files are misaligned")
    report = metrics.evaluate_scene(ref, proc, ref_rate)
    with open(args.report, "w") as fh:
        fh.write(report.to_json() + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bincdr",
        description="Binaural coherence-to-diffuse ratio speech enhancement")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_params(p):
        p.add_argument("--estimator", choices=["new", "p3"], default=None,
                       help="CDR estimator (default: new)")
        p.add_argument("--S", type=float, default=None,
                       help="directivity/suppression parameter (default: 1)")
        p.add_argument("--lambda", dest="lambda_", type=float, default=None,
                       help="PSD smoothing factor (default: 0.72)")
        p.add_argument("--mu", type=float, default=None,
                       help="over-subtraction factor (default: 1)")
        p.add_argument("--gmin", type=float, default=None,
                       help="gain floor (default: 0.1)")
        p.add_argument("--gain", choices=["squared_wiener", "magnitude_subtraction"],
                       default=None, help="gain rule (default: squared_wiener)")
        p.add_argument("--config", default=None,
                       help="JSON file supplying any flag; flags override")

    p = sub.add_parser("enhance", help="process a stereo WAV offline")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--telemetry", default=None,
                   help="write newline-delimited JSON telemetry here")
    add_params(p)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("stream", help="low-latency streaming over a file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--loop", action="store_true")
    p.add_argument("--pace", choices=["real", "none"], default="real")
    p.add_argument("--control-port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--telemetry-stride", type=int, default=8)
    add_params(p)
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("locus", help="CDR/gain vs coherence phase, CSV grid")
    p.add_argument("--S", required=True, help="comma list, e.g. 0.1,1,3,10")
    p.add_argument("--A", required=True, help="comma list or a..b[:n] range")
    p.add_argument("--theta-steps", type=int, default=361)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--gmin", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_locus)

    p = sub.add_parser("scatter", help="per-(frame,bin) coherence/CDR CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    add_params(p)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("synth", help="render a synthetic scene from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="intrusive metrics between two WAVs")
    p.add_argument("--ref", required=True)
    p.add_argument("--proc", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        return args.func(args)
    except (audio_io.AudioFormatError, metrics.SilentReferenceError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
