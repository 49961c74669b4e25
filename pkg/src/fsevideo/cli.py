"""Command-line entry point.

Exit codes: 0 success, 2 usage or invalid parameter, 3 missing input,
4 unreadable or malformed file, 5 dimension mismatch.
"""
from __future__ import annotations

import argparse
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import SweepResult, gain_sweep, psnr
from .fse import FseParams
from .io import (FormatError, read_config, read_mask, read_sequence, write_csv,
                 write_manifest, write_mask, write_mv_csv, write_sequence)
from .mask import DimensionError, SampledFrame, generate_mask, simulate_sensor
from .motion import MotionParams
from .multiframe import RunReport, reconstruct_video_mf, reconstruct_video_sf
from .synth import SequenceSpec, synthesize

logger = logging.getLogger("fsevideo")

EXIT_USAGE, EXIT_MISSING, EXIT_FORMAT, EXIT_DIMENSION = 2, 3, 4, 5

# long Table 1 style names accepted in config files
CONFIG_ALIASES = {
    "fft_size": "dft_size",
    "decay_factor": "decay_rho",
    "orthogonality_deficiency_compensation": "odc_gamma",
    "weighting_of_already_reconstructed_areas": "recon_weight_delta",
}
INT_KEYS = {"block_size", "border_width", "dft_size", "iterations", "window_size",
            "search_range", "margin", "seed", "n_support", "threads", "frames", "height",
            "width"}
FLOAT_KEYS = {"decay_rho", "odc_gamma", "recon_weight_delta", "smoothness"}
DEFAULTS = {**FseParams().to_dict(), "window_size": 9, "search_range": 16, "margin": 4,
            "threads": 1}


class UsageError(Exception):
    pass


def _add_fse_args(p):
    g = p.add_argument_group("FSE parameters")
    g.add_argument("--block-size", type=int)
    g.add_argument("--border-width", type=int)
    g.add_argument("--dft-size", type=int)
    g.add_argument("--iterations", type=int)
    g.add_argument("--decay-rho", type=float)
    g.add_argument("--odc-gamma", type=float)
    g.add_argument("--recon-weight-delta", type=float)


def _add_motion_args(p):
    g = p.add_argument_group("motion estimation")
    g.add_argument("--window-size", type=int)
    g.add_argument("--search-range", type=int)


def _add_common(p):
    p.add_argument("--config", type=Path, help="key = value file; flags override it")
    p.add_argument("--threads", type=int, help="worker threads (output is identical for any value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsevideo",
                                     description="Non-regular sampling video reconstruction")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="render a synthetic ground-truth sequence")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--kind", choices=["translate", "zoom", "rotate"])
    p.add_argument("--rate", help="dm,dn for translate; scale step or degrees otherwise")
    p.add_argument("--frames", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--smoothness", type=float)
    _add_common(p)

    p = sub.add_parser("simulate", help="capture a sequence through a random mask")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--mask", type=Path, help="reuse an existing mask file instead of drawing one")
    _add_common(p)

    for name, helptext in (("reconstruct-sf", "single-frame FSE"),
                           ("reconstruct-mf", "multi-frame FSE-MF_N")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--input", type=Path, required=True, help="sampled sequence directory")
        p.add_argument("--mask", type=Path, help="mask file (default: INPUT/mask.bin)")
        p.add_argument("--out", type=Path, required=True)
        _add_fse_args(p)
        if name == "reconstruct-mf":
            p.add_argument("--n-support", type=int)
            p.add_argument("--report", type=Path, help="run report CSV (default: OUT/report.csv)")
            p.add_argument("--dump-mv", type=Path, help="write refined motion vectors as CSV")
            _add_motion_args(p)
        _add_common(p)

    p = sub.add_parser("evaluate", help="PSNR of a reconstruction against ground truth")
    p.add_argument("--reference", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="per-frame CSV")
    p.add_argument("--margin", type=int)
    _add_common(p)

    p = sub.add_parser("sweep", help="PSNR gain of FSE-MF_N over FSE-SF for several N")
    p.add_argument("--reference", type=Path, required=True)
    p.add_argument("--sampled", type=Path, help="sampled sequence (default: simulate with --seed)")
    p.add_argument("--mask", type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", required=True, help="e.g. 1..8 or 0,1,2")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--margin", type=int)
    p.add_argument("--plot-data", type=Path, help="directory for two-column series files")
    _add_fse_args(p)
    _add_motion_args(p)
    _add_common(p)
    return parser


def parse_n_values(text: str) -> list[int]:
    """``"1..4"`` -> [1, 2, 3, 4]; ``"0,2,5"`` -> [0, 2, 5]."""
    values = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = (int(v) for v in part.split(".."))
                values.extend(range(lo, hi + 1))
            elif part:
                values.append(int(part))
        except ValueError:
            raise UsageError(f"bad --n value {text!r}") from None
    if not values or min(values) < 0:
        raise UsageError(f"bad --n value {text!r}")
    return values


def resolve_settings(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    settings = dict(DEFAULTS)
    if getattr(args, "config", None) is not None:
        if not args.config.is_file():
            raise FileNotFoundError(f"config file not found: {args.config}")
        for key, value in read_config(args.config).items():
            key = CONFIG_ALIASES.get(key, key)
            try:
                if key in INT_KEYS:
                    settings[key] = int(value)
                elif key in FLOAT_KEYS:
                    settings[key] = float(value)
                else:
                    settings[key] = value
            except ValueError:
                raise FormatError(f"{args.config}: bad value for {key}: {value!r}") from None
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command", "verbose", "func"):
            settings[key] = value
    if settings["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    return settings


def _fse_params(s) -> FseParams:
    return FseParams.from_mapping(s)


def _motion_params(s) -> MotionParams:
    return MotionParams(int(s["window_size"]), int(s["search_range"]))


def _manifest(out_path: Path, command: str, settings: dict) -> None:
    entries = {"command": command}
    for key in sorted(settings):
        if key == "threads":
            continue
        value = settings[key]
        entries[key] = str(value) if isinstance(value, Path) else value
    entries["fsevideo_version"] = __version__
    entries["numpy_version"] = np.__version__
    entries["python_version"] = platform.python_version()
    write_manifest(out_path, entries)


def _load_sampled(directory: Path, mask_path: Path | None):
    mask_path = mask_path or directory / "mask.bin"
    if not mask_path.is_file():
        raise FileNotFoundError(f"mask file not found: {mask_path}")
    mask = read_mask(mask_path)
    frames = read_sequence(directory)
    if frames[0].shape != mask.shape:
        raise DimensionError(f"frames {frames[0].shape} do not match mask {mask.shape}")
    sampled = [SampledFrame(np.where(mask.open, f, 0), mask.open.copy(), mask) for f in frames]
    return sampled, mask


def cmd_synthesize(args, s):
    kind = s.get("kind") or "translate"
    rate_text = s.get("rate") or ("1,0" if kind == "translate" else "0.01" if kind == "zoom" else "1")
    try:
        rate = tuple(float(v) for v in str(rate_text).split(","))
        if kind == "translate":
            rate = tuple(int(v) if v == int(v) else v for v in rate)
        spec = SequenceSpec(kind, rate, int(s.get("frames", 20)), int(s.get("height", 128)),
                            int(s.get("width", 128)), int(s.get("seed", 0)),
                            float(s.get("smoothness", 1.5)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_sequence(args.out, synthesize(spec))
    s.update(kind=spec.kind, rate=list(spec.rate), frames=spec.frames, height=spec.height,
             width=spec.width, seed=spec.seed, smoothness=spec.smoothness)
    _manifest(args.out / "manifest.txt", "synthesize", s)


def cmd_simulate(args, s):
    frames = read_sequence(args.input)
    H, W = frames[0].shape
    if s.get("mask"):
        if not Path(s["mask"]).is_file():
            raise FileNotFoundError(f"mask file not found: {s['mask']}")
        mask = read_mask(s["mask"])
    else:
        if H % 2 or W % 2:
            raise DimensionError(f"frame dimensions must be even, got {H}x{W}")
        mask = generate_mask(W // 2, H // 2, int(s.get("seed", 0)))
    sampled = simulate_sensor(frames, mask)
    write_sequence(args.out, [f.values for f in sampled])
    write_mask(args.out / "mask.bin", mask)
    s["seed"] = mask.seed
    _manifest(args.out / "manifest.txt", "simulate", s)


def cmd_reconstruct_sf(args, s):
    sampled, _ = _load_sampled(args.input, args.mask)
    frames = reconstruct_video_sf(sampled, _fse_params(s), s["threads"])
    write_sequence(args.out, frames)
    _manifest(args.out / "manifest.txt", "reconstruct-sf", s)


def cmd_reconstruct_mf(args, s):
    sampled, mask = _load_sampled(args.input, args.mask)
    n_support = int(s.get("n_support", 2))
    if n_support < 0:
        raise UsageError("--n-support must be >= 0")
    sink = [] if args.dump_mv else None
    frames, report = reconstruct_video_mf(sampled, mask, n_support, _fse_params(s),
                                          _motion_params(s), threads=s["threads"], mv_sink=sink)
    write_sequence(args.out, frames)
    write_csv(args.report or args.out / "report.csv", RunReport.COLUMNS, report.rows)
    if sink is not None:
        write_mv_csv(args.dump_mv, sink)
    for msg in report.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    s["n_support"] = n_support
    _manifest(args.out / "manifest.txt", "reconstruct-mf", s)


def cmd_evaluate(args, s):
    ref = read_sequence(args.reference)
    test = read_sequence(args.test)
    if len(ref) != len(test):
        raise DimensionError(f"{len(ref)} reference frames vs {len(test)} test frames")
    margin = int(s["margin"])
    rows = []
    for t, (a, b) in enumerate(zip(ref, test)):
        res = psnr(a, b, margin)
        rows.append({"t": t, "psnr": res.value, "mse": res.mse})
    write_csv(args.out, ("t", "psnr", "mse"), rows)
    mean = float(np.mean([r["psnr"] for r in rows]))
    print(f"mean PSNR: {mean:.4f} dB over {len(rows)} frames")
    _manifest(args.out.with_name(args.out.name + ".manifest"), "evaluate", s)


def write_plot_data(directory: Path, result: SweepResult) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    lines = [f"{row['n']} {row['mean_gain']!r}" for row in result.summary]
    (directory / "gain_vs_n.dat").write_text("\n".join(lines) + "\n")
    for row in result.summary:
        n = row["n"]
        frame_lines = [f"{r['t']} {r['gain']!r}" for r in result.per_frame if r["n"] == n]
        (directory / f"gain_per_frame_n{n}.dat").write_text("\n".join(frame_lines) + "\n")


def cmd_sweep(args, s):
    n_values = parse_n_values(args.n)
    reference = read_sequence(args.reference)
    if args.sampled is not None:
        sampled, mask = _load_sampled(args.sampled, args.mask)
        if len(sampled) != len(reference):
            raise DimensionError("reference and sampled sequences differ in length")
    else:
        H, W = reference[0].shape
        if args.mask is not None:
            if not args.mask.is_file():
                raise FileNotFoundError(f"mask file not found: {args.mask}")
            mask = read_mask(args.mask)
        else:
            if H % 2 or W % 2:
                raise DimensionError(f"frame dimensions must be even, got {H}x{W}")
            mask = generate_mask(W // 2, H // 2, int(s.get("seed", 0)))
        sampled = simulate_sensor(reference, mask)
    result = gain_sweep(reference, sampled, mask, n_values, _fse_params(s), _motion_params(s),
                        margin=int(s["margin"]), threads=s["threads"])
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / "summary.csv", SweepResult.SUMMARY_COLUMNS, result.summary)
    write_csv(args.out / "per_frame.csv", SweepResult.FRAME_COLUMNS, result.per_frame)
    if args.plot_data is not None:
        write_plot_data(args.plot_data, result)
    for row in result.summary:
        print(f"N={row['n']}: SF {row['mean_psnr_sf']:.3f} dB, MF {row['mean_psnr_mf']:.3f} dB, "
              f"gain {row['mean_gain']:+.3f} dB")
    s["seed"] = mask.seed
    _manifest(args.out / "manifest.txt", "sweep", s)


COMMANDS = {
    "synthesize": cmd_synthesize,
    "simulate": cmd_simulate,
    "reconstruct-sf": cmd_reconstruct_sf,
    "reconstruct-mf": cmd_reconstruct_mf,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = resolve_settings(args)
        COMMANDS[args.command](args, settings)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
