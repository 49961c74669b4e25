"""Multi-frame FSE: densify each frame with motion-compensated samples of its neighbours."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .fse import FseParams, reconstruct_frame
from .mask import DimensionError, SampledFrame, SamplingMask
from .motion import MotionParams, MotionVectorField, block_match, consistency_check

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportSchedule:
    current_index: int
    support_indices: tuple[int, ...]


def build_schedule(t: int, n_support: int, first: int, last: int) -> SupportSchedule:
    """The first ``n_support`` of t-1, t+1, t-2, t+2, ... that lie inside ``[first, last]``.

    Neighbours beyond the sequence are dropped rather than replaced, so
    frames near either end use fewer supports.
    """
    if not first <= t <= last:
        raise ValueError(f"frame index {t} outside [{first}, {last}]")
    if n_support < 0:
        raise ValueError("n_support must be >= 0")
    candidates = [t + sign * (i // 2 + 1) for i, sign in zip(range(n_support), [-1, 1] * n_support)]
    return SupportSchedule(t, tuple(s for s in candidates if first <= s <= last))


@dataclass
class DensifiedFrame:
    frame: SampledFrame
    projected: np.ndarray
    # target (m, n) -> (support index, source (m, n), match cost)
    provenance: dict = field(default_factory=dict)

    @property
    def pixels_projected(self) -> int:
        return int(self.projected.sum())


def project_samples(current: SampledFrame,
                    supports: Sequence[tuple[SampledFrame, MotionVectorField]],
                    support_indices: Sequence[int] | None = None) -> DensifiedFrame:
    """Copy original support samples onto missing positions of ``current``.

    Earlier supports win. Within one support the lower match cost wins,
    then the row-major source position.
    """
    if support_indices is None:
        support_indices = range(len(supports))
    values = current.values.copy()
    filled = current.filled.copy()
    projected = np.zeros_like(filled)
    provenance = {}
    for s_idx, (support, mvf) in zip(support_indices, supports):
        if len(mvf) == 0:
            continue
        src = mvf.sources
        order = np.lexsort((src[:, 1], src[:, 0], mvf.costs))
        for i in order.tolist():
            pm, pn = src[i].tolist()
            qm = pm + int(mvf.vectors[i, 0])
            qn = pn + int(mvf.vectors[i, 1])
            if filled[qm, qn] or not support.original[pm, pn]:
                continue
            values[qm, qn] = support.values[pm, pn]
            filled[qm, qn] = True
            projected[qm, qn] = True
            provenance[(qm, qn)] = (s_idx, (pm, pn), int(mvf.costs[i]))
    frame = SampledFrame(values, filled, current.mask, current.original.copy())
    return DensifiedFrame(frame, projected, provenance)


@dataclass
class RunReport:
    rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    COLUMNS = ("t", "n_support_used", "mv_raw", "mv_kept", "pixels_projected", "fill_fraction")


def parallel_map(fn: Callable, items: Iterable, threads: int = 1) -> list:
    """Ordered map; results never depend on ``threads``."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def reconstruct_video_sf(sampled: Sequence[SampledFrame], fse_params: FseParams | None = None,
                         threads: int = 1) -> list[np.ndarray]:
    fse_params = fse_params or FseParams()
    return parallel_map(lambda f: reconstruct_frame(f, fse_params), sampled, threads)


def reconstruct_video_mf(sampled: Sequence[SampledFrame], mask: SamplingMask, n_support: int,
                         fse_params: FseParams | None = None,
                         motion_params: MotionParams | None = None, *,
                         initial: Sequence[np.ndarray] | None = None, threads: int = 1,
                         motion_cache: dict | None = None,
                         mv_sink: list | None = None) -> tuple[list[np.ndarray], RunReport]:
    """FSE-MF_N over a whole sequence captured through one mask.

    ``initial`` may carry the single-frame reconstruction under the same
    ``fse_params``. ``motion_cache`` maps ``(support, current)`` to
    ``(raw count, refined field)`` and is shared across calls with different
    ``n_support`` on the same sequence. When
    ``mv_sink`` is a list, ``(support, current, field)`` tuples of refined
    fields are appended to it in frame order.
    """
    fse_params = fse_params or FseParams()
    motion_params = motion_params or MotionParams()
    report = RunReport()
    T = len(sampled)
    if T == 0:
        raise ValueError("empty sequence")
    for f in sampled:
        if f.shape != mask.shape:
            raise DimensionError(f"frame shape {f.shape} does not match mask {mask.shape}")

    start = time.perf_counter()
    if initial is None:
        initial = reconstruct_video_sf(sampled, fse_params, threads)
    report.timings["initial_sf"] = time.perf_counter() - start
    if T == 1 and n_support >= 1:
        msg = "single-frame input: no support frames available, result equals FSE-SF"
        logger.warning(msg)
        report.warnings.append(msg)
    cache = motion_cache if motion_cache is not None else {}

    def refine(pair):
        s, t = pair
        raw = block_match(initial[s], initial[t], mask, motion_params)
        return len(raw), consistency_check(raw, mask, mask)

    def stage(t):
        schedule = build_schedule(t, n_support, 0, T - 1)
        fields_ = [cache[(s, t)] for s in schedule.support_indices]
        dense = project_samples(sampled[t], [(sampled[s], mvf) for s, (_, mvf) in
                                             zip(schedule.support_indices, fields_)],
                                schedule.support_indices)
        if dense.pixels_projected == 0:
            # nothing new to extrapolate from: FSE would repeat the initial pass
            out = np.array(initial[t], dtype=np.uint8, copy=True)
        else:
            out = reconstruct_frame(dense.frame, fse_params)
        row = {
            "t": t,
            "n_support_used": len(schedule.support_indices),
            "mv_raw": sum(n for n, _ in fields_),
            "mv_kept": sum(len(mvf) for _, mvf in fields_),
            "pixels_projected": dense.pixels_projected,
            "fill_fraction": dense.frame.fill_fraction(),
        }
        return out, row, [(s, t, mvf) for s, (_, mvf) in zip(schedule.support_indices, fields_)]

    start = time.perf_counter()
    # fill the cache up front so the per-frame stage only reads it
    pairs = [(s, t) for t in range(T) for s in build_schedule(t, n_support, 0, T - 1).support_indices]
    missing_pairs = [p for p in pairs if p not in cache]
    for p, res in zip(missing_pairs, parallel_map(refine, missing_pairs, threads)):
        cache[p] = res
    report.timings["motion"] = time.perf_counter() - start

    start = time.perf_counter()
    results = parallel_map(stage, range(T), threads)
    report.timings["final_fse"] = time.perf_counter() - start
    frames = [r[0] for r in results]
    report.rows = [r[1] for r in results]
    if mv_sink is not None:
        for r in results:
            mv_sink.extend(r[2])
    return frames, report
