"""Input validation helpers used by the estimators and the CLI layer."""

import numpy as np

from .errors import ContractViolationError


def check_image_batch(X, channels: int, side: int | None = None) -> np.ndarray:
    """Validate a batch of 8-bit images shaped (N, H, W, C).

    Accepts a single image (H, W, C) and promotes it to a batch of one.
    Returns a contiguous uint8 array.
    """
    X = np.asarray(X)
    if X.ndim == 3:
        X = X[None]
    if X.ndim != 4:
        raise ContractViolationError(
            f"expected image batch of shape (N, H, W, {channels}), got shape {X.shape}"
        )
    if X.shape[3] != channels:
        raise ContractViolationError(
            f"expected {channels} channel(s), got {X.shape[3]} (shape {X.shape})"
        )
    if side is not None and (X.shape[1] != side or X.shape[2] != side):
        raise ContractViolationError(
            f"expected {side}x{side} images, got {X.shape[1]}x{X.shape[2]}"
        )
    if X.dtype != np.uint8:
        if np.issubdtype(X.dtype, np.floating) and (X.min() < 0 or X.max() > 255):
            raise ContractViolationError("image values must lie in [0, 255]")
        X = np.round(X).astype(np.uint8)
    return np.ascontiguousarray(X)


def check_token_batch(T, num_codes: int) -> np.ndarray:
    """Validate a batch of token grids shaped (N, h, w) with entries in [0, num_codes)."""
    T = np.asarray(T)
    if T.ndim == 2:
        T = T[None]
    if T.ndim != 3:
        raise ContractViolationError(
            f"expected token batch of shape (N, h, w), got shape {T.shape}"
        )
    if not np.issubdtype(T.dtype, np.integer):
        raise ContractViolationError(f"token grids must be integer, got dtype {T.dtype}")
    if T.size and (T.min() < 0 or T.max() >= num_codes):
        raise ContractViolationError(
            f"token indices must lie in [0, {num_codes}), got range "
            f"[{T.min()}, {T.max()}]"
        )
    return np.ascontiguousarray(T.astype(np.int64))


def check_frequencies(f_hz, n: int | None = None) -> np.ndarray:
    """Validate per-sample carrier frequencies in Hz (positive reals)."""
    f = np.atleast_1d(np.asarray(f_hz, dtype=np.float64))
    if f.ndim != 1:
        raise ContractViolationError("frequencies must be a 1-D array")
    if n is not None and len(f) == 1 and n > 1:
        f = np.full(n, f[0])
    if n is not None and len(f) != n:
        raise ContractViolationError(f"expected {n} frequencies, got {len(f)}")
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise ContractViolationError("frequencies must be finite and positive")
    return f


def check_positive(value, name: str):
    if not value > 0:
        raise ContractViolationError(f"{name} must be positive, got {value!r}")
    return value


def check_fitted(estimator, attribute: str):
    """Raise sklearn's NotFittedError if ``attribute`` is missing."""
    from sklearn.exceptions import NotFittedError

    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )
