"""Pathloss rendering: free-space attenuation plus per-obstruction penalties.

The renderer intentionally trades ray-traced multipath for a model with
an exact, brute-forceable definition: per receiver cell, pathloss equals
the free-space term for the 3-D Tx-Rx distance plus a frequency-dependent
penalty for every building box the line of sight passes through.
"""

import math

import numpy as np

from ..errors import ContractViolationError
from .scene import CaptureConfig, SceneSpec, receiver_cell_centers

SPEED_OF_LIGHT_M_S = 299792458.0


def free_space_pathloss_db(d_m: float, frequency_hz: float) -> float:
    """Free-space pathloss 20*log10(4*pi*d*f/c) in dB.

    Strictly increasing in both distance and frequency.
    """
    if d_m <= 0:
        raise ContractViolationError(f"distance must be positive, got {d_m}")
    if frequency_hz <= 0:
        raise ContractViolationError(f"frequency must be positive, got {frequency_hz}")
    return 20.0 * math.log10(4.0 * math.pi * d_m * frequency_hz / SPEED_OF_LIGHT_M_S)


def obstruction_penalty_db(frequency_hz: float) -> float:
    """Per-blocked-building penalty, 10 + 5*log10(f / 1 GHz) dB.

    Non-decreasing in frequency so cell-wise pathloss ordering across
    bands is preserved under occlusion.
    """
    if frequency_hz <= 0:
        raise ContractViolationError(f"frequency must be positive, got {frequency_hz}")
    return 10.0 + 5.0 * math.log10(frequency_hz / 1e9)


def segment_intersects_box(p0, p1, box_min, box_max) -> bool:
    """True when the open segment p0->p1 passes through the box interior.

    Slab test on all three axes; touching a face without entering the
    interior does not count. Axis-parallel segments are handled
    explicitly instead of via division by zero.
    """
    t_near, t_far = 0.0, 1.0
    for axis in range(3):
        o, d = p0[axis], p1[axis] - p0[axis]
        lo, hi = box_min[axis], box_max[axis]
        if d == 0.0:
            if o <= lo or o >= hi:
                return False
            continue
        t0 = (lo - o) / d
        t1 = (hi - o) / d
        if t0 > t1:
            t0, t1 = t1, t0
        t_near = max(t_near, t0)
        t_far = min(t_far, t1)
        if t_near >= t_far:
            return False
    return t_near < t_far


def _blocked_counts(scene: SceneSpec, cfg: CaptureConfig) -> np.ndarray:
    """Number of building boxes blocking each Tx->cell segment, (grid_n, grid_n)."""
    xs, ys = receiver_cell_centers(cfg)
    gx, gy = np.meshgrid(xs, ys)  # row=y, col=x
    tx_x, tx_y, tx_z = cfg.tx_position

    counts = np.zeros((cfg.grid_n, cfg.grid_n), dtype=np.int64)
    # Vectorized slab test per box over the whole grid; identical arithmetic
    # to segment_intersects_box so scalar and vector paths agree bit-for-bit.
    dx = gx - tx_x
    dy = gy - tx_y
    dz = 0.0 - tx_z
    for b in scene.buildings:
        t_near = np.zeros_like(gx)
        t_far = np.ones_like(gx)
        for o, d, lo, hi in (
            (tx_x, dx, b.x_min, b.x_max),
            (tx_y, dy, b.y_min, b.y_max),
            (tx_z, dz, 0.0, b.height),
        ):
            d_arr = np.asarray(d, dtype=np.float64)
            if d_arr.ndim == 0:
                d_arr = np.full_like(gx, float(d_arr))
            o_arr = np.full_like(gx, float(o)) if np.ndim(o) == 0 else np.asarray(o)
            parallel = d_arr == 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                t0 = (lo - o_arr) / d_arr
                t1 = (hi - o_arr) / d_arr
            swap = t0 > t1
            t0s = np.where(swap, t1, t0)
            t1s = np.where(swap, t0, t1)
            inside_slab = (o_arr > lo) & (o_arr < hi)
            t0s = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), t0s)
            t1s = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), t1s)
            t_near = np.maximum(t_near, t0s)
            t_far = np.minimum(t_far, t1s)
        counts += (t_near < t_far).astype(np.int64)
    return counts


def render_pathloss_map(scene: SceneSpec, cfg: CaptureConfig) -> np.ndarray:
    """Pathloss in dB at every receiver cell, (grid_n, grid_n) float64.

    pathloss = free_space(3-D Tx-Rx distance, f) + n_blocked * penalty(f).
    Deterministic in (scene, cfg).
    """
    xs, ys = receiver_cell_centers(cfg)
    gx, gy = np.meshgrid(xs, ys)
    tx_x, tx_y, tx_z = cfg.tx_position
    dist = np.sqrt((gx - tx_x) ** 2 + (gy - tx_y) ** 2 + tx_z**2)
    fspl = 20.0 * np.log10(
        4.0 * math.pi * dist * cfg.frequency_hz / SPEED_OF_LIGHT_M_S
    )
    penalty = obstruction_penalty_db(cfg.frequency_hz)
    return fspl + _blocked_counts(scene, cfg) * penalty


def db_to_pixel(pl_db) -> np.ndarray:
    """Map dB values onto 8-bit intensities: round(clamp(x, 0, 255)).

    Clamping is the defined behaviour for out-of-range values; within
    [0, 255] the round trip loses at most 0.5 dB.
    """
    arr = np.clip(np.asarray(pl_db, dtype=np.float64), 0.0, 255.0)
    out = np.round(arr).astype(np.uint8)
    if out.ndim == 0:
        return out[()]
    return out


def pixel_to_db(v) -> np.ndarray:
    """Inverse of the pixel mapping: intensity v encodes v dB."""
    out = np.asarray(v, dtype=np.float64)
    if out.ndim == 0:
        return out[()]
    return out
