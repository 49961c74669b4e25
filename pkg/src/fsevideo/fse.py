"""Block-wise Frequency Selective Extrapolation (FSE).

Each block of the frame is surrounded by a border to form a square support
area. Over that area a sparse real-valued model made of 2-D Fourier basis
functions is built greedily, one conjugate pair per iteration, from a
distance-weighted residual. The model then fills the missing pixels of the
central block.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Mapping

import numba
import numpy as np

from .mask import SampledFrame

MISSING = 0
ORIGINAL = 1
RECONSTRUCTED = 2


class EmptySupportError(ValueError):
    """Raised when a support area carries no weighted sample at all."""


@dataclass(frozen=True)
class FseParams:
    block_size: int = 4
    border_width: int = 14
    dft_size: int = 32
    iterations: int = 100
    decay_rho: float = 0.7
    odc_gamma: float = 0.5
    recon_weight_delta: float = 0.5

    def __post_init__(self):
        if self.block_size < 1 or self.border_width < 0:
            raise ValueError("block_size must be >= 1 and border_width >= 0")
        if self.dft_size != self.block_size + 2 * self.border_width:
            raise ValueError(
                f"dft_size ({self.dft_size}) must equal block_size + 2*border_width "
                f"({self.block_size + 2 * self.border_width})")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 < self.decay_rho < 1:
            raise ValueError("decay_rho must lie in (0, 1)")
        if not 0 < self.odc_gamma <= 1:
            raise ValueError("odc_gamma must lie in (0, 1]")
        if not 0 <= self.recon_weight_delta <= 1:
            raise ValueError("recon_weight_delta must lie in [0, 1]")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "FseParams":
        """Build from a mapping, ignoring keys that are not FSE parameters."""
        kwargs = {}
        for f in fields(cls):
            if mapping.get(f.name) is not None:
                cast = int if f.type == "int" else float
                kwargs[f.name] = cast(mapping[f.name])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SupportArea:
    """Luminance and per-position status over one ``dft_size`` square."""

    values: np.ndarray
    status: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.status = np.asarray(self.status, dtype=np.int8)
        if self.values.shape != self.status.shape or self.values.ndim != 2:
            raise ValueError("values and status must be matching 2-D arrays")


@dataclass
class SparseModel:
    dft_size: int
    selected: set = field(default_factory=set)
    coefficients: dict = field(default_factory=dict)
    residual_energy: np.ndarray | None = None

    def coefficient_grid(self) -> np.ndarray:
        grid = np.zeros((self.dft_size, self.dft_size), dtype=np.complex128)
        for (k, l), c in self.coefficients.items():
            grid[k, l] = c
        return grid

    def evaluate(self, real: bool = True) -> np.ndarray:
        """Spatial model ``sum c_kl * exp(+2j*pi*(k*m + l*n)/M)`` over the area."""
        g = np.fft.ifft2(self.coefficient_grid()) * self.dft_size ** 2
        return g.real if real else g


def _decay_grid(params: FseParams) -> np.ndarray:
    M = params.dft_size
    c = M // 2
    m, n = np.mgrid[0:M, 0:M]
    return params.decay_rho ** np.hypot(m - c, n - c)


def compute_weights(area: SupportArea, params: FseParams) -> np.ndarray:
    """``rho**d`` on original samples, ``delta * rho**d`` on reconstructed ones.

    ``d`` is the Euclidean distance to position ``(M // 2, M // 2)``.
    """
    M = params.dft_size
    if area.status.shape != (M, M):
        raise ValueError(f"support area must be {M}x{M}, got {area.status.shape}")
    scale = np.array([0.0, 1.0, params.recon_weight_delta])
    return _decay_grid(params) * scale[area.status]


@numba.njit(cache=True, nogil=True)
def _fse_kernel(R, W, iterations, gamma, track, residual, weights):
    M = R.shape[0]
    C = np.zeros((M, M), dtype=np.complex128)
    touched = np.zeros((M, M), dtype=np.bool_)
    energy = np.empty(iterations + 1 if track else 0)
    w0 = W[0, 0].real
    # tiled copy so that W[(p - k) % M, (q - l) % M] == Wt[p - k + M, q - l + M]
    Wt = np.empty((2 * M, 2 * M), dtype=np.complex128)
    for a in range(2 * M):
        for b in range(2 * M):
            Wt[a, b] = W[a % M, b % M]
    # one candidate per conjugate pair: the member with the smaller row-major index
    cand = np.zeros((M, M), dtype=np.bool_)
    for k in range(M):
        for l in range(M):
            cand[k, l] = ((M - k) % M) * M + (M - l) % M >= k * M + l
    if track:
        energy[0] = np.sum(weights * residual * residual)
        phase = np.empty((M, M), dtype=np.complex128)
        for k in range(M):
            for m in range(M):
                phase[k, m] = np.exp(2j * np.pi * ((k * m) % M) / M)
    for it in range(iterations):
        best = -1.0
        bk = 0
        bl = 0
        for k in range(M):
            for l in range(M):
                if cand[k, l]:
                    r = R[k, l]
                    v = r.real * r.real + r.imag * r.imag
                    if v > best:
                        best = v
                        bk = k
                        bl = l
        pk = (M - bk) % M
        pl = (M - bl) % M
        selfconj = pk == bk and pl == bl
        dc = gamma * R[bk, bl] / w0
        if selfconj:
            dc = complex(dc.real, 0.0)
        if dc != 0:
            C[bk, bl] += dc
            touched[bk, bl] = True
            # DFT of w * phi_(k,l) is W shifted by (k, l)
            if selfconj:
                for p in range(M):
                    for q in range(M):
                        R[p, q] -= dc * Wt[p - bk + M, q - bl + M]
            else:
                C[pk, pl] += dc.conjugate()
                touched[pk, pl] = True
                dcc = dc.conjugate()
                for p in range(M):
                    for q in range(M):
                        R[p, q] -= dc * Wt[p - bk + M, q - bl + M] + dcc * Wt[p - pk + M, q - pl + M]
            if track:
                scale = 1.0 if selfconj else 2.0
                for m in range(M):
                    for n in range(M):
                        residual[m, n] -= scale * (dc * phase[bk, m] * phase[bl, n]).real
        if track:
            energy[it + 1] = np.sum(weights * residual * residual)
    return C, touched, energy


def _run_kernel(residual, weights, params, track=False):
    R = np.fft.fft2(weights * residual)
    W = np.fft.fft2(weights)
    return _fse_kernel(R, W, params.iterations, params.odc_gamma, track,
                       residual.copy(), weights)


def generate_model(area: SupportArea, params: FseParams, track_residual: bool = False,
                   weights: np.ndarray | None = None) -> SparseModel:
    """Greedy sparse Fourier model of the weighted area.

    Raises EmptySupportError if every weight is zero. With
    ``track_residual`` the weighted residual energy after each iteration is
    stored in ``residual_energy`` (index 0 is the initial energy).
    """
    if weights is None:
        weights = compute_weights(area, params)
    if not np.any(weights > 0):
        raise EmptySupportError("support area has no weighted samples")
    residual = np.where(area.status == MISSING, 0.0, area.values)
    C, touched, energy = _run_kernel(residual, weights, params, track_residual)
    ks, ls = np.nonzero(touched)
    model = SparseModel(params.dft_size)
    for k, l in zip(ks.tolist(), ls.tolist()):
        model.selected.add((k, l))
        model.coefficients[(k, l)] = complex(C[k, l])
    if track_residual:
        model.residual_energy = energy
    return model


def _block_starts(length: int, block: int) -> list[int]:
    starts = list(range(0, max(length - block, 0) + 1, block))
    if starts[-1] + block < length:
        starts.append(length - block)
    return starts


def block_grid(shape: tuple[int, int], params: FseParams) -> list[tuple[int, int]]:
    """Row-major block origins; a flush final row/column covers any remainder."""
    B = params.block_size
    return [(r, c) for r in _block_starts(shape[0], B) for c in _block_starts(shape[1], B)]


def processing_order(frame: SampledFrame, params: FseParams) -> list[tuple[int, int]]:
    """Blocks sorted by descending count of original samples in their support area.

    Ties keep row-major block order. The order is computed once and not
    updated as blocks fill.
    """
    bw = params.border_width
    M = params.dft_size
    B = params.block_size
    padded = np.pad(frame.filled.astype(np.int64), ((bw + 1, bw + B),) * 2)
    integral = padded.cumsum(0).cumsum(1)
    blocks = block_grid(frame.shape, params)
    counts = []
    for r, c in blocks:
        # area rows r-bw .. r-bw+M map to padded rows r+1 .. r+1+M
        r1, c1 = r, c
        r2, c2 = r + M, c + M
        counts.append(integral[r2, c2] - integral[r1, c2] - integral[r2, c1] + integral[r1, c1])
    idx = sorted(range(len(blocks)), key=lambda i: (-counts[i], i))
    return [blocks[i] for i in idx]


class _FrameState:
    """Padded working copy of a frame while blocks are being filled."""

    def __init__(self, frame: SampledFrame, params: FseParams):
        self.params = params
        self.shape = frame.shape
        bw = params.border_width
        pad = ((bw, bw + params.block_size),) * 2
        self.values = np.pad(frame.values.astype(np.float64), pad)
        status = np.where(frame.filled, ORIGINAL, MISSING).astype(np.int8)
        self.status = np.pad(status, pad, constant_values=MISSING)
        self.decay = _decay_grid(params)
        self.scale = np.array([0.0, 1.0, params.recon_weight_delta])

    def fill_block(self, r: int, c: int) -> bool:
        """Fill the missing pixels of one block; False if its support is empty."""
        p = self.params
        bw, B, M = p.border_width, p.block_size, p.dft_size
        h = min(B, self.shape[0] - r)
        w = min(B, self.shape[1] - c)
        block_status = self.status[r + bw:r + bw + h, c + bw:c + bw + w]
        missing = block_status == MISSING
        if not missing.any():
            return True
        status = self.status[r:r + M, c:c + M]
        weights = self.decay * self.scale[status]
        if not weights.any():
            return False
        # status MISSING positions carry weight 0, so raw values are harmless
        C, _, _ = _run_kernel(self.values[r:r + M, c:c + M], weights, p)
        g = (np.fft.ifft2(C) * M ** 2).real[bw:bw + h, bw:bw + w]
        self.write(r, c, h, w, missing, quantize(g))
        return True

    def write(self, r, c, h, w, missing, values):
        bw = self.params.border_width
        block_values = self.values[r + bw:r + bw + h, c + bw:c + bw + w]
        block_status = self.status[r + bw:r + bw + h, c + bw:c + bw + w]
        block_values[missing] = values[missing]
        block_status[missing] = RECONSTRUCTED

    def result(self) -> np.ndarray:
        bw = self.params.border_width
        H, W = self.shape
        return self.values[bw:bw + H, bw:bw + W].astype(np.uint8)


def quantize(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero."""
    return np.floor(np.clip(values, 0.0, 255.0) + 0.5)


def reconstruct_frame(frame: SampledFrame, params: FseParams | None = None) -> np.ndarray:
    """Fill every missing pixel of ``frame``; filled pixels pass through unchanged."""
    params = params or FseParams()
    state = _FrameState(frame, params)
    deferred = [(r, c) for r, c in processing_order(frame, params)
                if not state.fill_block(r, c)]
    B = params.block_size
    for r, c in deferred:
        if not state.fill_block(r, c):
            h = min(B, frame.shape[0] - r)
            w = min(B, frame.shape[1] - c)
            bw = params.border_width
            missing = state.status[r + bw:r + bw + h, c + bw:c + bw + w] == MISSING
            state.write(r, c, h, w, missing, np.full((h, w), 128.0))
    return state.result()
