"""File formats: PGM frame sequences, mask files, key-value configs, CSV reports."""
from __future__ import annotations

import csv
import math
import re
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from PIL import Image

from .mask import DimensionError, SamplingMask

MASK_MAGIC = "FSEMASK"
FRAME_PATTERN = "frame_{:04d}.pgm"


class FormatError(ValueError):
    """A file exists but cannot be parsed."""


def read_pgm(path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise FormatError(f"{path}: expected 8-bit grayscale PGM, got mode {img.mode}")
            return np.array(img, dtype=np.uint8)
    except (OSError, SyntaxError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_pgm(path, frame: np.ndarray) -> None:
    frame = np.asarray(frame)
    if frame.dtype != np.uint8 or frame.ndim != 2:
        raise ValueError("PGM frames must be 2-D uint8 arrays")
    Image.fromarray(frame, mode="L").save(path, format="PPM")


def _frame_number(path: Path) -> int:
    digits = re.findall(r"\d+", path.stem)
    return int(digits[-1]) if digits else -1


def list_frames(directory) -> list[Path]:
    """PGM files of a sequence directory ordered by their numeric suffix."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"sequence directory not found: {directory}")
    files = [p for p in directory.iterdir() if p.suffix.lower() == ".pgm"]
    return sorted(files, key=lambda p: (_frame_number(p), p.name))


def read_sequence(directory) -> list[np.ndarray]:
    files = list_frames(directory)
    if not files:
        raise FileNotFoundError(f"no .pgm frames in {directory}")
    frames = [read_pgm(p) for p in files]
    shape = frames[0].shape
    for p, f in zip(files, frames):
        if f.shape != shape:
            raise DimensionError(f"{p}: shape {f.shape} differs from first frame {shape}")
    return frames


def write_sequence(directory, frames: Sequence[np.ndarray]) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, frame in enumerate(frames):
        path = directory / FRAME_PATTERN.format(k)
        write_pgm(path, frame)
        paths.append(path)
    return paths


def write_mask(path, mask: SamplingMask) -> None:
    """Text header ``FSEMASK width height seed`` then one 0/1 byte per position, row-major."""
    seed = "none" if mask.seed is None else str(mask.seed)
    header = f"{MASK_MAGIC}\n{mask.width_hr} {mask.height_hr}\n{seed}\n".encode("ascii")
    Path(path).write_bytes(header + mask.open.astype(np.uint8).tobytes())


def read_mask(path) -> SamplingMask:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0].decode("ascii", "replace") != MASK_MAGIC:
        raise FormatError(f"{path}: not a mask file")
    try:
        width, height = (int(v) for v in parts[1].split())
        seed = None if parts[2] == b"none" else int(parts[2])
    except ValueError as exc:
        raise FormatError(f"{path}: bad mask header") from exc
    body = np.frombuffer(parts[3], dtype=np.uint8)
    if body.size != width * height or body.max(initial=0) > 1:
        raise FormatError(f"{path}: mask body does not match {width}x{height} header")
    return SamplingMask(body.reshape(height, width).astype(bool), seed=seed)


def read_config(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment. Keys are normalised to snake case."""
    config = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        config[key.replace("-", "_").lower()] = value
    return config


def write_manifest(path, entries: Mapping[str, object]) -> None:
    lines = [f"{k} = {_fmt(v)}" for k, v in entries.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def write_csv(path, columns: Sequence[str], rows: Iterable[Mapping]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_mv_csv(path, fields: Iterable) -> None:
    """Rows ``frame_pair, m, n, dm, dn, cost``; ``fields`` yields (support, current, field)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["frame_pair", "m", "n", "dm", "dn", "cost"])
        for s, t, mvf in fields:
            for (m, n), (dm, dn), cost in zip(mvf.sources.tolist(), mvf.vectors.tolist(),
                                              mvf.costs.tolist()):
                writer.writerow([f"{s}-{t}", m, n, dm, dn, cost])
