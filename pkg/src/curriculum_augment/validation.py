"""Input validation helpers in the spirit of ``sklearn.utils.validation``.

Images are ``(height, width, 3)`` uint8 arrays; soft labels are 1-D float64
probability vectors.
"""

import numpy as np

from .exceptions import InvalidParameterError, ShapeError

SUM_TOLERANCE = 1e-9


def check_image(img, name="img"):
    """Return ``img`` as a ``(H, W, 3)`` uint8 array, raising on bad input.

    Integer arrays holding values in ``[0, 255]`` are cast; anything else that
    is not already uint8 is rejected rather than silently rescaled.
    """
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ShapeError(f"{name} must have shape (height, width, 3), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be at least 1x1, got {arr.shape[1]}x{arr.shape[0]}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise InvalidParameterError(f"{name} must hold 8-bit integers, got dtype {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise InvalidParameterError(f"{name} channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def check_images(X, name="X"):
    """Validate a batch of images: a 4-D array or a sequence of 3-D arrays."""
    if isinstance(X, np.ndarray) and X.ndim == 4:
        return [check_image(x, name=f"{name}[{i}]") for i, x in enumerate(X)]
    try:
        items = list(X)
    except TypeError:
        raise ShapeError(f"{name} must be a batch of images") from None
    if not items:
        raise ShapeError(f"{name} must contain at least one image")
    return [check_image(x, name=f"{name}[{i}]") for i, x in enumerate(items)]


def check_same_shape(img_a, img_b):
    if img_a.shape != img_b.shape:
        raise ShapeError(
            f"images must have identical dimensions, got {img_a.shape[1]}x{img_a.shape[0]}"
            f" and {img_b.shape[1]}x{img_b.shape[0]}"
        )


def check_soft_label(label, name="label"):
    """Return ``label`` as a float64 probability vector."""
    probs = np.asarray(label, dtype=np.float64)
    if probs.ndim != 1 or probs.size < 1:
        raise ShapeError(f"{name} must be a non-empty 1-D vector, got shape {probs.shape}")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise InvalidParameterError(f"{name} components must be finite and non-negative")
    if abs(probs.sum() - 1.0) > SUM_TOLERANCE:
        raise InvalidParameterError(f"{name} must sum to 1, got {probs.sum()!r}")
    return probs


def check_positive_int(value, name, minimum=1):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
