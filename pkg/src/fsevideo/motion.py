"""Sample-anchored block matching and the motion-vector consistency check.

Vectors point from an original sample ``p`` of a support frame to its
landing position ``p + v`` in the current frame. Displacements are integer
``(dm, dn)`` pairs in HR pixels, ``dm`` along rows.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .mask import DimensionError, SamplingMask


@dataclass(frozen=True)
class MotionParams:
    window_size: int = 9
    search_range: int = 16

    def __post_init__(self):
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ValueError("window_size must be odd and >= 3")
        if self.search_range < 1:
            raise ValueError("search_range must be >= 1")


@dataclass
class MotionVectorField:
    """Sparse field; row ``i`` maps ``sources[i]`` to ``sources[i] + vectors[i]``."""

    sources: np.ndarray
    vectors: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        self.sources = np.asarray(self.sources, dtype=np.int64).reshape(-1, 2)
        self.vectors = np.asarray(self.vectors, dtype=np.int64).reshape(-1, 2)
        self.costs = np.asarray(self.costs, dtype=np.int64).reshape(-1)
        if not len(self.sources) == len(self.vectors) == len(self.costs):
            raise ValueError("sources, vectors and costs must have equal length")

    @classmethod
    def empty(cls) -> "MotionVectorField":
        return cls(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros(0))

    def __len__(self) -> int:
        return len(self.costs)

    @property
    def landings(self) -> np.ndarray:
        return self.sources + self.vectors

    def select(self, keep: np.ndarray) -> "MotionVectorField":
        keep = np.asarray(keep, dtype=bool)
        return MotionVectorField(self.sources[keep], self.vectors[keep], self.costs[keep])

    def as_dict(self) -> dict:
        return {tuple(p): (tuple(v), int(c))
                for p, v, c in zip(self.sources.tolist(), self.vectors.tolist(), self.costs)}


def search_displacements(search_range: int) -> list[tuple[int, int]]:
    """All displacements in the square search range, in SAD tie-break order."""
    S = search_range
    disps = [(dm, dn) for dm in range(-S, S + 1) for dn in range(-S, S + 1)]
    return sorted(disps, key=lambda d: (d[0] ** 2 + d[1] ** 2, d[0], d[1]))


def block_match(support_recon: np.ndarray, current_recon: np.ndarray,
                support_mask: SamplingMask, params: MotionParams | None = None) -> MotionVectorField:
    """Exhaustive SAD search for a window around every original sample.

    Windows are taken from the reconstructed frames. Anchors whose window
    leaves the support frame, or with no candidate window inside the
    current frame, are omitted. Ties go to the shortest displacement, then
    to row-major ``(dm, dn)``.
    """
    params = params or MotionParams()
    support = np.asarray(support_recon, dtype=np.int64)
    current = np.asarray(current_recon, dtype=np.int64)
    if support.shape != current.shape or support.shape != support_mask.shape:
        raise DimensionError(
            f"shape mismatch: support {support.shape}, current {current.shape}, "
            f"mask {support_mask.shape}")
    H, W = support.shape
    h = params.window_size // 2
    inner = np.zeros((H, W), dtype=bool)
    inner[h:H - h, h:W - h] = True
    am, an = np.nonzero(support_mask.open & inner)
    if am.size == 0:
        return MotionVectorField.empty()

    best = np.full(am.size, np.iinfo(np.int64).max)
    best_d = np.zeros((am.size, 2), dtype=np.int64)
    diff = np.zeros((H, W), dtype=np.int64)
    integral = np.zeros((H + 1, W + 1), dtype=np.int64)
    for dm, dn in search_displacements(params.search_range):
        valid = ((am + dm >= h) & (am + dm < H - h) & (an + dn >= h) & (an + dn < W - h))
        if not valid.any():
            continue
        r0, r1 = max(0, -dm), min(H, H - dm)
        c0, c1 = max(0, -dn), min(W, W - dn)
        diff[:] = 0
        diff[r0:r1, c0:c1] = np.abs(support[r0:r1, c0:c1]
                                    - current[r0 + dm:r1 + dm, c0 + dn:c1 + dn])
        np.cumsum(diff, axis=0, out=integral[1:, 1:])
        np.cumsum(integral[1:, 1:], axis=1, out=integral[1:, 1:])
        top, bottom = am - h, am + h + 1
        left, right = an - h, an + h + 1
        sad = (integral[bottom, right] - integral[top, right]
               - integral[bottom, left] + integral[top, left])
        better = valid & (sad < best)
        best[better] = sad[better]
        best_d[better] = (dm, dn)

    found = best != np.iinfo(np.int64).max
    sources = np.stack([am[found], an[found]], axis=1)
    return MotionVectorField(sources, best_d[found], best[found])


def _lower_median(values: list[int]) -> int:
    values = sorted(values)
    return values[(len(values) - 1) // 2]


def consistency_check(field: MotionVectorField, support_mask: SamplingMask,
                      current_mask: SamplingMask) -> MotionVectorField:
    """Drop vectors that land on a measured sample or fail back-projection.

    The 3x3 median census around each landing position includes every raw
    entry, including those removed for landing on a sample.
    """
    if support_mask.shape != current_mask.shape:
        raise DimensionError("support and current masks differ in shape")
    if len(field) == 0:
        return field
    landings = field.landings
    census = defaultdict(list)
    for i, (qm, qn) in enumerate(landings.tolist()):
        census[(qm, qn)].append(i)

    vectors = field.vectors.tolist()
    sources = field.sources.tolist()
    keep = np.zeros(len(field), dtype=bool)
    for i, (qm, qn) in enumerate(landings.tolist()):
        if current_mask.open[qm, qn]:
            continue
        members = [j for a in (-1, 0, 1) for b in (-1, 0, 1)
                   for j in census.get((qm + a, qn + b), ())]
        med_m = _lower_median([vectors[j][0] for j in members])
        med_n = _lower_median([vectors[j][1] for j in members])
        keep[i] = (qm - med_m, qn - med_n) == tuple(sources[i])
    return field.select(keep)


def estimate_motion(current_recon: np.ndarray, support_recon: np.ndarray,
                    support_mask: SamplingMask, current_mask: SamplingMask,
                    params: MotionParams | None = None) -> MotionVectorField:
    raw = block_match(support_recon, current_recon, support_mask, params)
    return consistency_check(raw, support_mask, current_mask)
