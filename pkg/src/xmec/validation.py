"""Input validation helpers shared by ingestion and the scoring engine."""

from __future__ import annotations

import numpy as np

from .exceptions import DimMismatch, IntegrityError

PROBABILITY_SUM_TOL = 1e-6


def as_vector(values, *, name: str = "vector", dim: int | None = None) -> np.ndarray:
    """Coerce *values* to an immutable 1-D float32 array and validate it.

    Rejects empty, non-finite, and zero-norm vectors; optionally enforces a
    dimensionality. Zero-norm vectors are a data error here because cosine
    similarity is undefined for them downstream.
    """
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim != 1:
        raise IntegrityError(f"{name}: expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise IntegrityError(f"{name}: empty vector")
    if not np.all(np.isfinite(arr)):
        raise IntegrityError(f"{name}: contains non-finite values")
    if not np.any(arr):
        raise IntegrityError(f"{name}: zero-norm vector")
    if dim is not None and arr.size != dim:
        raise DimMismatch(f"{name}: expected dim {dim}, got {arr.size}")
    arr.setflags(write=False)
    return arr


def check_probability_vector(
    values,
    *,
    size: int | None,
    name: str = "probabilities",
    tol: float = PROBABILITY_SUM_TOL,
) -> np.ndarray:
    """Validate a probability vector over a fixed vocabulary.

    All entries must be non-negative and finite, the length must equal
    *size* when given, and the sum must be 1 within *tol* (float32
    softmax outputs).
    """
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim != 1:
        raise IntegrityError(f"{name}: expected a 1-D vector, got {arr.shape}")
    if size is not None and arr.size != size:
        raise DimMismatch(f"{name}: expected {size} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise IntegrityError(f"{name}: contains non-finite values")
    if np.any(arr < 0):
        raise IntegrityError(f"{name}: negative entry")
    total = float(np.sum(arr, dtype=np.float64))
    if abs(total - 1.0) > tol:
        raise IntegrityError(f"{name}: sums to {total!r}, not 1 within {tol}")
    arr.setflags(write=False)
    return arr


def check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
