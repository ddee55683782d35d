"""Verification and retrieval metrics over clean/tampered score pairs.

All three metrics treat the clean variant as the positive class. AUC is
the Mann-Whitney pairwise-ordering statistic; computed via average
ranks, which reproduces brute-force pair counting bit for bit because
tied ranks average to half-integers (exact in binary floating point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import EmptyInput, InsufficientRelevant

VARIANTS = ("clean", "tampered")
DIRECTIONS = ("descending", "ascending")


def _checked_scores(values: Iterable[float], name: str) -> np.ndarray:
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def verification_accuracy(pairs: Iterable[tuple[float, float]]) -> float:
    """Fraction of (clean, tampered) pairs where clean is strictly
    higher; ties count as failures."""
    pair_list = list(pairs)
    if not pair_list:
        raise EmptyInput("pairs must not be empty")
    wins = 0
    for clean, tampered in pair_list:
        if not (math.isfinite(clean) and math.isfinite(tampered)):
            raise ValueError("scores must be finite")
        if clean > tampered:
            wins += 1
    return wins / len(pair_list)


def roc_auc(clean_scores: Iterable[float], tampered_scores: Iterable[float]) -> float:
    """P(clean > tampered) + 0.5 * P(clean = tampered) over all pairs."""
    clean = _checked_scores(clean_scores, "clean_scores")
    tampered = _checked_scores(tampered_scores, "tampered_scores")
    m, n = clean.size, tampered.size
    combined = np.concatenate([clean, tampered])
    order = np.argsort(combined, kind="stable")
    ordered = combined[order]
    ranks = np.empty(m + n, dtype=np.float64)
    i = 0
    while i < m + n:
        j = i
        while j + 1 < m + n and ordered[j + 1] == ordered[i]:
            j += 1
        # ranks i+1 .. j+1 share the half-integer average (i+j)/2 + 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    u = float(ranks[:m].sum()) - m * (m + 1) / 2
    return u / (m * n)


@dataclass(frozen=True)
class RankEntry:
    doc_id: str
    variant: str
    score: float

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


def _rank_key(entry: RankEntry, direction: str):
    score = -entry.score if direction == "descending" else entry.score
    return (score, entry.doc_id, entry.variant)


@dataclass(frozen=True)
class RankedCollection:
    """Clean and tampered variants of a collection, sorted by score.

    Ties are broken by doc_id and then by variant name; the tie rule is
    neutral with respect to the relevant class.
    """

    entries: tuple[RankEntry, ...]
    order_direction: str

    def __post_init__(self) -> None:
        if self.order_direction not in DIRECTIONS:
            raise ValueError(f"order_direction must be one of {DIRECTIONS}")
        keys = [_rank_key(e, self.order_direction) for e in self.entries]
        if keys != sorted(keys):
            raise ValueError("entries do not follow order_direction")

    @classmethod
    def build(
        cls, entries: Iterable[RankEntry], order_direction: str
    ) -> "RankedCollection":
        if order_direction not in DIRECTIONS:
            raise ValueError(f"order_direction must be one of {DIRECTIONS}")
        ordered = tuple(sorted(entries, key=lambda e: _rank_key(e, order_direction)))
        return cls(entries=ordered, order_direction=order_direction)

    def count(self, variant: str) -> int:
        return sum(1 for e in self.entries if e.variant == variant)


def ap_at_recall(
    ranking: RankedCollection,
    relevant: str,
    recall_level: float,
    *,
    literal: bool = False,
) -> float:
    """Average precision truncated where the ranking has retrieved a
    *recall_level* fraction of the relevant variant.

    The target count is ceil(recall_level * n_relevant). The default sums
    precision at relevant positions only (standard AP); ``literal=True``
    instead sums the precision term at every rank up to the cutoff,
    which can exceed 1 and is kept for comparison purposes.
    """
    if relevant not in VARIANTS:
        raise ValueError(f"relevant must be one of {VARIANTS}")
    if not 0 < recall_level <= 1:
        raise ValueError("recall_level must lie in (0, 1]")
    n_relevant = ranking.count(relevant)
    # round before ceil so fractions like 0.1 * 60 do not tip upward
    target = math.ceil(round(recall_level * n_relevant, 9))
    if target < 1 or target > n_relevant:
        raise InsufficientRelevant(
            f"need {target} relevant documents, ranking has {n_relevant}"
        )
    retrieved = 0
    total = 0.0
    for position, entry in enumerate(ranking.entries, start=1):
        hit = entry.variant == relevant
        if hit:
            retrieved += 1
        if hit or literal:
            total += retrieved / position
        if retrieved == target:
            break
    return total / target
