"""scikit-learn style transformers around the reconstruction pipeline.

Videos are arrays of shape ``(n_frames, height, width)``; a single 2-D frame
is accepted too. Unobserved pixels are ``NaN`` on input; reconstructions
come back as ``uint8`` arrays of the input shape.

>>> sensor = SensorSimulator(seed=3).fit(video)
>>> sampled = sensor.transform(video)
>>> restored = MultiFrameFSEReconstructor(n_support=2).fit_transform(sampled)
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .fse import FseParams
from .mask import DimensionError, SampledFrame, SamplingMask, generate_mask
from .motion import MotionParams
from .multiframe import reconstruct_video_mf, reconstruct_video_sf


def check_video(X, allow_nan: bool = False) -> tuple[np.ndarray, bool]:
    """Validate a video or frame; returns a float64 3-D array and whether input was 2-D."""
    X = check_array(X, dtype=np.float64, allow_nd=True,
                    ensure_all_finite="allow-nan" if allow_nan else True,
                    ensure_min_samples=1, ensure_min_features=1)
    single = X.ndim == 2
    if single:
        X = X[np.newaxis]
    if X.ndim != 3:
        raise ValueError(f"expected a (n_frames, height, width) array, got {X.ndim}-D")
    finite = X[np.isfinite(X)]
    if finite.size and (finite.min() < 0 or finite.max() > 255):
        raise ValueError("luminance values must lie in [0, 255]")
    return X, single


def _to_sampled(X: np.ndarray) -> list[SampledFrame]:
    frames = []
    for frame in X:
        filled = ~np.isnan(frame)
        values = np.floor(np.where(filled, frame, 0.0) + 0.5).astype(np.uint8)
        frames.append(SampledFrame(values, filled))
    return frames


def _restore_shape(frames, single):
    out = np.stack(frames)
    return out[0] if single else out


class SensorSimulator(TransformerMixin, BaseEstimator):
    """Capture frames through a random one-in-four sampling mask.

    ``fit`` draws ``mask_`` for the frame size; ``transform`` blanks the
    covered positions with ``NaN``. The same mask applies to every frame.
    """

    def __init__(self, seed=0):
        self.seed = seed

    def fit(self, X, y=None):
        X, _ = check_video(X)
        H, W = X.shape[1:]
        if H % 2 or W % 2:
            raise ValueError(f"frame dimensions must be even, got {H}x{W}")
        self.mask_ = generate_mask(W // 2, H // 2, self.seed)
        self.frame_shape_ = (H, W)
        return self

    def transform(self, X):
        check_is_fitted(self, "mask_")
        X, single = check_video(X)
        if X.shape[1:] != self.frame_shape_:
            raise DimensionError(f"fitted for frames {self.frame_shape_}, got {X.shape[1:]}")
        out = np.where(self.mask_.open, X, np.nan)
        return out[0] if single else out


class FSEReconstructor(TransformerMixin, BaseEstimator):
    """Single-frame FSE applied independently to each frame."""

    def __init__(self, block_size=4, border_width=14, dft_size=32, iterations=100,
                 decay_rho=0.7, odc_gamma=0.5, recon_weight_delta=0.5, n_jobs=1):
        self.block_size = block_size
        self.border_width = border_width
        self.dft_size = dft_size
        self.iterations = iterations
        self.decay_rho = decay_rho
        self.odc_gamma = odc_gamma
        self.recon_weight_delta = recon_weight_delta
        self.n_jobs = n_jobs

    def _fse_params(self) -> FseParams:
        return FseParams(self.block_size, self.border_width, self.dft_size, self.iterations,
                         self.decay_rho, self.odc_gamma, self.recon_weight_delta)

    def fit(self, X=None, y=None):
        self.fse_params_ = self._fse_params()
        return self

    def transform(self, X):
        check_is_fitted(self, "fse_params_")
        X, single = check_video(X, allow_nan=True)
        frames = reconstruct_video_sf(_to_sampled(X), self.fse_params_, self.n_jobs or 1)
        return _restore_shape(frames, single)


class MultiFrameFSEReconstructor(FSEReconstructor):
    """FSE-MF_N: single-frame FSE refined with motion-compensated samples of
    ``n_support`` neighbouring frames.

    Every frame must share one sampling pattern. ``report_`` holds the
    per-frame run statistics of the last ``transform``.
    """

    def __init__(self, n_support=2, window_size=9, search_range=16, block_size=4,
                 border_width=14, dft_size=32, iterations=100, decay_rho=0.7, odc_gamma=0.5,
                 recon_weight_delta=0.5, n_jobs=1):
        super().__init__(block_size, border_width, dft_size, iterations, decay_rho,
                         odc_gamma, recon_weight_delta, n_jobs)
        self.n_support = n_support
        self.window_size = window_size
        self.search_range = search_range

    def fit(self, X=None, y=None):
        super().fit(X, y)
        if self.n_support < 0:
            raise ValueError("n_support must be >= 0")
        self.motion_params_ = MotionParams(self.window_size, self.search_range)
        return self

    def transform(self, X):
        check_is_fitted(self, "motion_params_")
        X, single = check_video(X, allow_nan=True)
        sampled = _to_sampled(X)
        pattern = sampled[0].filled
        if any(not np.array_equal(f.filled, pattern) for f in sampled[1:]):
            raise ValueError("all frames must share the same sampling pattern")
        mask = SamplingMask(pattern)
        for f in sampled:
            f.mask = mask
        frames, self.report_ = reconstruct_video_mf(
            sampled, mask, self.n_support, self.fse_params_, self.motion_params_,
            threads=self.n_jobs or 1)
        return _restore_shape(frames, single)
