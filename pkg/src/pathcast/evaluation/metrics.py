"""Error metrics for predicted pathloss maps (dB domain)."""

import numpy as np

from ..errors import ContractViolationError

NMSE_MODES = ("pooled", "mean_of_ratios")


def _check_pair(pred_db, true_db):
    pred = np.asarray(pred_db, dtype=np.float64)
    true = np.asarray(true_db, dtype=np.float64)
    if pred.shape != true.shape:
        raise ContractViolationError(
            f"prediction shape {pred.shape} != truth shape {true.shape}"
        )
    if pred.ndim == 2:
        pred, true = pred[None], true[None]
    if pred.ndim != 3:
        raise ContractViolationError(
            f"expected map batches (N, G, G), got shape {pred.shape}"
        )
    if not (np.all(np.isfinite(pred)) and np.all(np.isfinite(true))):
        raise ContractViolationError("maps must be finite")
    return pred, true


def nmse(pred_db, true_db, mode: str = "pooled") -> float:
    """Normalised mean squared error between dB maps.

    "pooled" divides total squared error by total squared truth across the
    whole batch; "mean_of_ratios" averages the per-sample ratios.
    """
    if mode not in NMSE_MODES:
        raise ContractViolationError(f"mode must be one of {NMSE_MODES}, got {mode!r}")
    pred, true = _check_pair(pred_db, true_db)
    err = ((pred - true) ** 2).sum(axis=(1, 2))
    ref = (true**2).sum(axis=(1, 2))
    if mode == "pooled":
        total_ref = ref.sum()
        if total_ref == 0.0:
            raise ContractViolationError("truth maps are identically zero")
        return float(err.sum() / total_ref)
    if np.any(ref == 0.0):
        raise ContractViolationError("a truth map is identically zero")
    return float((err / ref).mean())


def nmse_db(pred_db, true_db, mode: str = "pooled") -> float:
    """NMSE expressed in decibels: 10 log10(nmse)."""
    value = nmse(pred_db, true_db, mode=mode)
    if value == 0.0:
        return float("-inf")
    return float(10.0 * np.log10(value))


def rmse(pred_db, true_db) -> float:
    """Root mean squared error in dB."""
    pred, true = _check_pair(pred_db, true_db)
    return float(np.sqrt(np.mean((pred - true) ** 2)))
