"""Deterministic synthetic test sequences with known global motion."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

KINDS = ("translate", "zoom", "rotate")


@dataclass(frozen=True)
class SequenceSpec:
    """``rate`` is (dm, dn) pixels/frame for translate, a scale step for
    zoom (0.01 = 1 % per frame) and degrees/frame for rotate."""

    kind: str = "translate"
    rate: tuple = (1, 0)
    frames: int = 20
    height: int = 128
    width: int = 128
    seed: int = 0
    smoothness: float = 1.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown motion kind {self.kind!r}; expected one of {KINDS}")
        if self.frames < 1 or self.height < 2 or self.width < 2:
            raise ValueError("frames >= 1 and height, width >= 2 required")
        if self.kind == "translate":
            if len(self.rate) != 2 or any(int(r) != r for r in self.rate):
                raise ValueError("translate rate must be two integers (dm, dn)")
        elif len(self.rate) != 1:
            raise ValueError(f"{self.kind} rate must be a single number")
        if self.smoothness <= 0:
            raise ValueError("smoothness must be positive")


def textured_image(height: int, width: int, seed: int, smoothness: float = 1.5) -> np.ndarray:
    """Band-limited noise texture in [16, 239], float64."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((height, width))
    fine = ndimage.gaussian_filter(noise, smoothness, mode="wrap")
    coarse = ndimage.gaussian_filter(noise, 4 * smoothness, mode="wrap")
    img = fine / fine.std() + 2.0 * coarse / coarse.std()
    img -= img.min()
    img *= 223.0 / img.max()
    return img + 16.0


def synthesize(spec: SequenceSpec) -> list[np.ndarray]:
    """Render ``spec.frames`` uint8 frames of the moving texture."""
    H, W, T = spec.height, spec.width, spec.frames
    if spec.kind == "translate":
        dm, dn = (int(r) for r in spec.rate)
        pad_m, pad_n = abs(dm) * (T - 1), abs(dn) * (T - 1)
        base = textured_image(H + pad_m, W + pad_n, spec.seed, spec.smoothness)
        base = np.floor(base + 0.5).astype(np.uint8)
        # frame k is frame 0 moved by k * (dm, dn): frame_k[m, n] = frame_0[m - k*dm, n - k*dn]
        m0 = pad_m if dm > 0 else 0
        n0 = pad_n if dn > 0 else 0
        return [base[m0 - k * dm:m0 - k * dm + H, n0 - k * dn:n0 - k * dn + W].copy()
                for k in range(T)]

    margin = max(H, W) // 2
    base = textured_image(H + 2 * margin, W + 2 * margin, spec.seed, spec.smoothness)
    center = np.array([(H - 1) / 2 + margin, (W - 1) / 2 + margin])
    out_center = np.array([(H - 1) / 2, (W - 1) / 2])
    frames = []
    for k in range(T):
        if spec.kind == "zoom":
            s = (1.0 + float(spec.rate[0])) ** k
            matrix = np.eye(2) / s
        else:
            a = np.deg2rad(float(spec.rate[0]) * k)
            matrix = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
        offset = center - matrix @ out_center
        img = ndimage.affine_transform(base, matrix, offset=offset, output_shape=(H, W),
                                       order=3, mode="reflect")
        frames.append(np.floor(np.clip(img, 0, 255) + 0.5).astype(np.uint8))
    return frames
