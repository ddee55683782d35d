"""Reference-gallery filtering by threshold agglomerative clustering.

Crawled example images for a person are noisy and may depict several
people. The gallery faces are clustered bottom-up under average linkage
on [0, 1] cosine similarity until no two clusters are at least ``tau_p``
similar; the mean of the largest surviving cluster is taken as the
person's visual reference vector.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimMismatch, EmptyInput
from .similarity import pairwise_normalized_cosine

DEFAULT_TAU_P = 0.65


def _check_tau(tau_p: float) -> None:
    if not 0.0 <= tau_p <= 1.0:
        raise ValueError(f"tau_p must lie in [0, 1], got {tau_p!r}")


def _stack(vectors) -> np.ndarray:
    if len(vectors) == 0:
        raise EmptyInput("no vectors to cluster")
    dims = {np.asarray(v).shape for v in vectors}
    if len(dims) != 1:
        raise DimMismatch(f"mixed vector shapes in gallery: {sorted(dims)}")
    return np.asarray([np.asarray(v, dtype=np.float64) for v in vectors])


def cluster_references(vectors, tau_p: float = DEFAULT_TAU_P) -> list[list[int]]:
    """Partition gallery vectors by greedy average-linkage merging.

    At each step the pair of clusters with the highest average pairwise
    [0, 1] cosine similarity is merged; merging stops when no pair reaches
    ``tau_p``. Ties are broken toward the pair with the smallest member
    indices, making the result deterministic.

    Returns clusters as sorted index lists, ordered by smallest member.
    """
    _check_tau(tau_p)
    arr = _stack(vectors)
    n = arr.shape[0]
    if n == 1:
        return [[0]]

    sims = pairwise_normalized_cosine(arr)
    clusters: list[list[int]] = [[i] for i in range(n)]
    # pair_sums[a, b] = sum of sims over all cross pairs of clusters a, b;
    # dividing by the size product gives the average linkage similarity.
    pair_sums = sims.copy()

    while len(clusters) > 1:
        k = len(clusters)
        sizes = np.array([len(c) for c in clusters], dtype=np.float64)
        averages = pair_sums[:k, :k] / np.outer(sizes, sizes)
        averages[np.tril_indices(k)] = -np.inf
        flat = int(np.argmax(averages))  # first max in row-major order: smallest (a, b)
        a, b = divmod(flat, k)
        if averages[a, b] < tau_p:
            break
        clusters[a] = sorted(clusters[a] + clusters[b])
        del clusters[b]
        merged_row = pair_sums[a, :k] + pair_sums[b, :k]
        pair_sums[a, :k] = merged_row
        pair_sums[:k, a] = merged_row
        keep = [i for i in range(k) if i != b]
        pair_sums = pair_sums[np.ix_(keep, keep)]

    return clusters


def _cohesion(cluster: list[int], sims: np.ndarray) -> float:
    """Mean pairwise similarity within a cluster; 1.0 for singletons."""
    if len(cluster) == 1:
        return 1.0
    total = 0.0
    count = 0
    for i, ci in enumerate(cluster):
        for cj in cluster[i + 1 :]:
            total += sims[ci, cj]
            count += 1
    return total / count


def person_reference_vector(vectors, tau_p: float = DEFAULT_TAU_P) -> np.ndarray:
    """Mean feature vector of the majority cluster of a face gallery.

    Ties on cluster size are broken by higher intra-cluster cohesion,
    then by smallest member index, so the result is deterministic.
    """
    arr = _stack(vectors)
    clusters = cluster_references(arr, tau_p)
    if len(clusters) == 1:
        best = clusters[0]
    else:
        sims = pairwise_normalized_cosine(arr)
        best = max(clusters, key=lambda c: (len(c), _cohesion(c, sims), -c[0]))
    return np.mean(arr[best], axis=0)
