"""Cosine similarity and the per-entity aggregation operators.

Raw cosine in [-1, 1] is the reported similarity scale throughout;
the [0, 1] normalization exists only where a threshold is defined on
that scale (reference-gallery clustering).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimMismatch, EmptyInput


def cosine(a, b) -> float:
    """Cosine similarity of two equal-dimension, nonzero vectors.

    Computed as dot(a, b) / sqrt(dot(a, a) * dot(b, b)) so that
    cosine(v, v) is exactly 1.0, and clamped to [-1, 1] against rounding.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape or av.ndim != 1:
        raise DimMismatch(f"cosine: incompatible shapes {av.shape} vs {bv.shape}")
    aa = float(np.dot(av, av))
    bb = float(np.dot(bv, bv))
    if aa == 0.0 or bb == 0.0:
        raise ValueError("cosine undefined for a zero-norm vector")
    value = float(np.dot(av, bv)) / math.sqrt(aa * bb)
    return min(1.0, max(-1.0, value))


def normalized_cosine(a, b) -> float:
    """Cosine similarity rescaled to [0, 1]: (cosine + 1) / 2."""
    return (cosine(a, b) + 1.0) / 2.0


@dataclass(frozen=True)
class Aggregator:
    """Operator combining the per-reference similarities of one entity.

    ``kind`` is ``"max"`` or ``"quantile"``; quantiles use linear
    interpolation with inclusive endpoints, so ``quantile(1.0)``
    evaluates identically to ``max``.
    """

    kind: str
    q: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "max":
            if self.q is not None:
                raise ValueError("max aggregator takes no quantile level")
        elif self.kind == "quantile":
            if self.q is None or not 0.0 < self.q <= 1.0:
                raise ValueError(f"quantile level must be in (0, 1], got {self.q!r}")
        else:
            raise ValueError(f"unknown aggregator kind {self.kind!r}")

    @classmethod
    def maximum(cls) -> "Aggregator":
        return cls("max")

    @classmethod
    def quantile(cls, q: float) -> "Aggregator":
        return cls("quantile", float(q))

    def spec(self) -> str:
        """Canonical string form, e.g. ``"max"`` or ``"q90"``."""
        if self.kind == "max":
            return "max"
        assert self.q is not None
        pct = self.q * 100.0
        if pct == int(pct):
            return f"q{int(pct)}"
        return f"q{self.q!r}"

    def __call__(self, similarities) -> float:
        return aggregate(similarities, self)


def parse_aggregator(spec) -> Aggregator:
    """Parse an aggregator from ``"max"``, ``"q90"``-style strings, a float
    quantile level in (0, 1], or an existing :class:`Aggregator`."""
    if isinstance(spec, Aggregator):
        return spec
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return Aggregator.quantile(float(spec))
    if isinstance(spec, str):
        text = spec.strip().lower()
        if text == "max":
            return Aggregator.maximum()
        if text.startswith("q"):
            try:
                level = float(text[1:])
            except ValueError:
                raise ValueError(f"cannot parse aggregator {spec!r}") from None
            if level > 1.0:
                level /= 100.0
            return Aggregator.quantile(level)
    raise ValueError(f"cannot parse aggregator {spec!r}")


def aggregate(similarities, agg: Aggregator) -> float:
    """Reduce a non-empty list of similarities with the given operator."""
    arr = np.asarray(list(similarities), dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("aggregate: empty similarity list")
    if agg.kind == "max":
        return float(arr.max())
    return float(np.quantile(arr, agg.q))


def pairwise_normalized_cosine(vectors) -> np.ndarray:
    """Symmetric matrix of pairwise [0, 1] cosine similarities.

    Rows of the result index the input order; the diagonal is exactly 1.
    """
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim != 2:
        raise DimMismatch(f"expected a stack of vectors, got shape {arr.shape}")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero-norm vector in pairwise similarity input")
    unit = arr / norms[:, None]
    sims = np.clip(unit @ unit.T, -1.0, 1.0)
    np.fill_diagonal(sims, 1.0)
    return (sims + 1.0) / 2.0
