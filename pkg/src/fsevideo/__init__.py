"""Reconstruction of video captured by a non-regular sampling sensor.

Single-frame Frequency Selective Extrapolation (FSE-SF) and the
motion-compensated multi-frame variant (FSE-MF_N), with PSNR tooling.
"""
from .evaluation import PsnrResult, SweepResult, gain_sweep, psnr
from .estimators import FSEReconstructor, MultiFrameFSEReconstructor, SensorSimulator
from .fse import (EmptySupportError, FseParams, SparseModel, SupportArea, compute_weights,
                  generate_model, processing_order, reconstruct_frame)
from .mask import (DimensionError, SampledFrame, SamplingMask, apply_mask, generate_mask,
                   simulate_sensor)
from .motion import (MotionParams, MotionVectorField, block_match, consistency_check,
                     estimate_motion)
from .multiframe import (DensifiedFrame, RunReport, SupportSchedule, build_schedule,
                         project_samples, reconstruct_video_mf, reconstruct_video_sf)

__version__ = "0.1.0"

__all__ = [
    "DensifiedFrame", "DimensionError", "EmptySupportError", "FSEReconstructor", "FseParams",
    "MotionParams", "MotionVectorField", "MultiFrameFSEReconstructor", "PsnrResult",
    "RunReport", "SampledFrame", "SamplingMask", "SensorSimulator", "SparseModel",
    "SupportArea", "SupportSchedule", "SweepResult", "apply_mask", "block_match",
    "build_schedule", "compute_weights", "consistency_check", "estimate_motion", "gain_sweep",
    "generate_mask", "generate_model", "processing_order", "project_samples", "psnr",
    "reconstruct_frame", "reconstruct_video_mf", "reconstruct_video_sf", "simulate_sensor",
]
