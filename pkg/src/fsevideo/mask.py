"""Non-regular sampling masks and sensor capture simulation.

Arrays follow the numpy convention ``[m, n]`` = ``[row, column]``; a mask
of shape ``(2 * height_lr, 2 * width_lr)`` has one open quadrant in every
aligned 2x2 cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class DimensionError(ValueError):
    """Arrays that must share a shape do not."""


@dataclass(frozen=True, eq=False)
class SamplingMask:
    """Boolean HR grid, ``True`` where the sensor is light sensitive."""

    open: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.open, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
        if arr.shape[0] % 2 or arr.shape[1] % 2:
            raise ValueError(f"mask dimensions must be even, got {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "open", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.open.shape

    @property
    def height_hr(self) -> int:
        return self.open.shape[0]

    @property
    def width_hr(self) -> int:
        return self.open.shape[1]

    def __eq__(self, other):
        if not isinstance(other, SamplingMask):
            return NotImplemented
        return np.array_equal(self.open, other.open)

    def __hash__(self):
        return hash((self.shape, self.open.tobytes()))


@dataclass(eq=False)
class SampledFrame:
    """HR luminance grid where only ``filled`` positions carry values.

    ``original`` marks sensor samples; it equals the mask for plain
    captures and stays a subset of ``filled`` after projection.
    """

    values: np.ndarray
    filled: np.ndarray
    mask: SamplingMask | None = None
    original: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.uint8)
        self.filled = np.asarray(self.filled, dtype=bool)
        if self.values.shape != self.filled.shape:
            raise ValueError("values and filled must share a shape")
        if self.original is None:
            self.original = self.filled.copy()
        else:
            self.original = np.asarray(self.original, dtype=bool)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def fill_fraction(self) -> float:
        return float(self.filled.mean())

    def copy(self) -> "SampledFrame":
        return SampledFrame(self.values.copy(), self.filled.copy(), self.mask,
                            self.original.copy())


def generate_mask(width_lr: int, height_lr: int, seed: int) -> SamplingMask:
    """Pick one open quadrant per LR pixel, uniformly and independently.

    The result is a pure function of ``(width_lr, height_lr, seed)``.
    """
    if width_lr < 1 or height_lr < 1:
        raise ValueError(f"LR dimensions must be >= 1, got {width_lr}x{height_lr}")
    rng = np.random.default_rng(seed)
    quadrant = rng.integers(0, 4, size=(height_lr, width_lr))
    open_ = np.zeros((2 * height_lr, 2 * width_lr), dtype=bool)
    for q in range(4):
        dm, dn = divmod(q, 2)
        open_[dm::2, dn::2] = quadrant == q
    return SamplingMask(open_, seed=int(seed))


def apply_mask(frame: np.ndarray, mask: SamplingMask) -> SampledFrame:
    frame = np.asarray(frame)
    if frame.shape != mask.shape:
        raise DimensionError(f"frame shape {frame.shape} does not match mask {mask.shape}")
    values = np.where(mask.open, frame, 0).astype(np.uint8)
    return SampledFrame(values, mask.open.copy(), mask)


def simulate_sensor(video: Sequence[np.ndarray], mask: SamplingMask) -> list[SampledFrame]:
    """Capture every frame through the same mask."""
    if len(video) == 0:
        raise ValueError("cannot simulate an empty sequence")
    return [apply_mask(frame, mask) for frame in video]


def check_mask_law(mask: SamplingMask) -> bool:
    """True iff every aligned 2x2 cell holds exactly one open position."""
    o = mask.open.astype(np.int8)
    counts = o[0::2, 0::2] + o[0::2, 1::2] + o[1::2, 0::2] + o[1::2, 1::2]
    return bool(np.all(counts == 1))
