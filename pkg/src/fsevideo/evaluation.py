"""PSNR with border margin and single- vs multi-frame gain sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fse import FseParams
from .mask import DimensionError, SampledFrame, SamplingMask
from .motion import MotionParams
from .multiframe import reconstruct_video_mf, reconstruct_video_sf

PEAK = 255


@dataclass(frozen=True)
class PsnrResult:
    value: float
    mse: float
    pixels_counted: int
    margin: int


def psnr(reference: np.ndarray, test: np.ndarray, margin: int = 4) -> PsnrResult:
    """PSNR over the interior left after dropping ``margin`` pixels per side.

    Identical interiors give ``math.inf``.
    """
    reference = np.asarray(reference)
    test = np.asarray(test)
    if reference.shape != test.shape:
        raise DimensionError(f"shape mismatch: {reference.shape} vs {test.shape}")
    if margin < 0 or 2 * margin >= min(reference.shape):
        raise ValueError(f"margin {margin} too large for shape {reference.shape}")
    H, W = reference.shape
    a = reference[margin:H - margin, margin:W - margin].astype(np.int64)
    b = test[margin:H - margin, margin:W - margin].astype(np.int64)
    sse = int(np.sum((a - b) ** 2))
    count = a.size
    mse = sse / count
    value = math.inf if sse == 0 else 10.0 * math.log10(PEAK ** 2 * count / sse)
    return PsnrResult(value, mse, count, margin)


@dataclass
class SweepResult:
    summary: list = field(default_factory=list)
    per_frame: list = field(default_factory=list)

    SUMMARY_COLUMNS = ("n", "mean_psnr_sf", "mean_psnr_mf", "mean_gain")
    FRAME_COLUMNS = ("n", "t", "n_support_used", "psnr_sf", "psnr_mf", "gain")

    def mean_gain(self, n: int) -> float:
        return next(row["mean_gain"] for row in self.summary if row["n"] == n)


def _gain(mf: float, sf: float) -> float:
    if mf == sf:
        return 0.0
    return mf - sf


def gain_sweep(reference: Sequence[np.ndarray], sampled: Sequence[SampledFrame],
               mask: SamplingMask, n_values: Sequence[int],
               fse_params: FseParams | None = None, motion_params: MotionParams | None = None,
               margin: int = 4, threads: int = 1) -> SweepResult:
    """Mean and per-frame PSNR gain of FSE-MF_N over FSE-SF for every N.

    The single-frame pass and motion fields are computed once and shared.
    """
    if len(n_values) == 0:
        raise ValueError("n_values must not be empty")
    if len(reference) != len(sampled):
        raise DimensionError("reference and sampled sequences differ in length")
    fse_params = fse_params or FseParams()
    sf = reconstruct_video_sf(sampled, fse_params, threads)
    psnr_sf = [psnr(r, f, margin).value for r, f in zip(reference, sf)]
    cache = {}
    result = SweepResult()
    for n in n_values:
        mf, report = reconstruct_video_mf(sampled, mask, n, fse_params, motion_params,
                                          initial=sf, threads=threads, motion_cache=cache)
        psnr_mf = [psnr(r, f, margin).value for r, f in zip(reference, mf)]
        gains = [_gain(b, a) for a, b in zip(psnr_sf, psnr_mf)]
        for row, a, b, g in zip(report.rows, psnr_sf, psnr_mf, gains):
            result.per_frame.append({"n": n, "t": row["t"], "n_support_used": row["n_support_used"],
                                     "psnr_sf": a, "psnr_mf": b, "gain": g})
        result.summary.append({"n": n, "mean_psnr_sf": float(np.mean(psnr_sf)),
                               "mean_psnr_mf": float(np.mean(psnr_mf)),
                               "mean_gain": float(np.mean(gains))})
    return result
