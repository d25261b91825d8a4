"""Cluster validity indices.

Five indices with the usual conventions: silhouette (singleton points
score 0), Davies-Bouldin (mean member-to-centroid distance as the
compactness measure; coincident centroids push the index to +inf),
Calinski-Harabasz (+inf when the within-cluster scatter vanishes),
distortion (within-cluster sum of squared distances, the Lloyd
objective when centroids are the means), and the Rand / adjusted Rand
agreement scores computed exactly from the integer contingency table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rnkmeans import kernels
from rnkmeans.clustering import Partition, _cluster_means, _validate_x


def _check_partition(x, partition, require_complete=True):
    if not isinstance(partition, Partition):
        raise ValueError("partition must be a Partition")
    if partition.n != x.shape[0]:
        raise ValueError("partition length does not match x")
    if require_complete and not partition.is_complete():
        empty = int(np.argmin(partition.cluster_sizes()))
        raise ValueError(f"cluster {empty} is empty")


def silhouette(x, partition):
    """Mean silhouette score s(i) = (b(i) - a(i)) / max(a(i), b(i)).

    a(i) is the mean distance from point i to the other members of its
    cluster; b(i) is the smallest mean distance to any other cluster.
    Points in singleton clusters score 0, as do points where both means
    vanish.  Requires 2 <= k <= n-1 and no empty cluster.
    """
    x = _validate_x(x)
    n = x.shape[0]
    _check_partition(x, partition)
    k = partition.k
    if not 2 <= k <= n - 1:
        raise ValueError(f"silhouette needs 2 <= k <= n-1, got k={k}, n={n}")
    labels = partition.labels
    sizes = partition.cluster_sizes()
    d = kernels.pairwise_distances(x)
    totals = np.zeros((n, k))
    for j in range(k):
        totals[:, j] = d[:, labels == j].sum(axis=1)
    rows = np.arange(n)
    own_size = sizes[labels]
    a = totals[rows, labels] / np.maximum(own_size - 1, 1)
    means_other = totals / sizes[None, :]
    means_other[rows, labels] = np.inf
    b = means_other.min(axis=1)
    denom = np.maximum(a, b)
    safe = np.where(denom > 0.0, denom, 1.0)
    s = np.where((own_size == 1) | (denom == 0.0), 0.0, (b - a) / safe)
    return float(np.mean(s))


def davies_bouldin(x, partition):
    """Davies-Bouldin index (lower is better).

    Compactness of a cluster is the mean distance of its members to the
    cluster mean; the index averages, over clusters, the worst ratio of
    summed compactness to centroid separation.  Clusters whose means
    coincide make the index +inf.
    """
    x = _validate_x(x)
    _check_partition(x, partition)
    k = partition.k
    if k < 2:
        raise ValueError(f"davies_bouldin needs k >= 2, got {k}")
    labels = partition.labels
    means, sizes = _cluster_means(x, labels, k, np.zeros((k, x.shape[1])))
    member_d = np.sqrt(np.sum((x - means[labels]) ** 2, axis=1))
    lam = np.bincount(labels, weights=member_d, minlength=k) / sizes
    sep = kernels.pairwise_distances(means)
    off = ~np.eye(k, dtype=bool)
    if np.any(sep[off] == 0.0):
        return float("inf")
    ratio = (lam[:, None] + lam[None, :]) / np.where(off, sep, 1.0)
    ratio[~off] = -np.inf
    return float(np.mean(ratio.max(axis=1)))


def calinski_harabasz(x, partition):
    """Calinski-Harabasz ratio (SSB/(k-1)) / (SSW/(n-k)); higher is better.

    +inf when the within-cluster scatter is exactly zero (every cluster
    collapsed onto its mean).  Requires 2 <= k <= n-1 and no empty cluster.
    """
    x = _validate_x(x)
    n = x.shape[0]
    _check_partition(x, partition)
    k = partition.k
    if not 2 <= k <= n - 1:
        raise ValueError(f"calinski_harabasz needs 2 <= k <= n-1, "
                         f"got k={k}, n={n}")
    labels = partition.labels
    means, sizes = _cluster_means(x, labels, k, np.zeros((k, x.shape[1])))
    ssw = float(np.sum((x - means[labels]) ** 2))
    grand = x.mean(axis=0)
    ssb = float(np.sum(sizes[:, None] * (means - grand) ** 2))
    if ssw == 0.0:
        return float("inf")
    return (ssb / (k - 1)) / (ssw / (n - k))


def distortion(x, partition, centroids):
    """Within-cluster sum of squared distances to the given centroids.

    Equals the Lloyd objective when the centroids are the cluster means,
    which minimize it for any fixed partition.
    """
    x = _validate_x(x)
    _check_partition(x, partition, require_complete=False)
    centroids = _validate_x(centroids)
    if centroids.shape != (partition.k, x.shape[1]):
        raise ValueError(f"centroids must have shape "
                         f"{(partition.k, x.shape[1])}, got {centroids.shape}")
    return float(np.sum((x - centroids[partition.labels]) ** 2))


def _contingency(labels_a, labels_b):
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"label lengths differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < 2:
        raise ValueError("need at least 2 points")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def _comb2_sum(counts):
    # exact integer sum of C(m, 2) over the given counts
    counts = counts.astype(object)
    return int(np.sum(counts * (counts - 1) // 2))


def rand_index(labels_a, labels_b):
    """Rand index: the fraction of point pairs on which the two labelings
    agree (together in both, or separated in both).  Exact rational
    arithmetic up to the single final division."""
    table = _contingency(labels_a, labels_b)
    n = int(table.sum())
    total = n * (n - 1) // 2
    s = _comb2_sum(table.ravel())
    ra = _comb2_sum(table.sum(axis=1))
    rb = _comb2_sum(table.sum(axis=0))
    return (total + 2 * s - ra - rb) / total


def adjusted_rand_index(labels_a, labels_b):
    """Rand index adjusted for chance via the permutation-model closed
    form; 1.0 iff the partitions agree up to label renaming, about 0 for
    independent labelings.  The degenerate denominator (both labelings
    all-singletons or all-one-cluster) returns 1.0."""
    table = _contingency(labels_a, labels_b)
    n = int(table.sum())
    total = n * (n - 1) // 2
    s = _comb2_sum(table.ravel())
    ra = _comb2_sum(table.sum(axis=1))
    rb = _comb2_sum(table.sum(axis=0))
    num = 2 * (total * s - ra * rb)
    den = total * (ra + rb) - 2 * ra * rb
    if den == 0:
        return 1.0
    return num / den


@dataclass(frozen=True)
class ValidationReport:
    """All five indices for one clustering; ari is None (never
    zero-filled) when no ground truth was supplied, and flags name any
    index that degenerated to +inf."""

    silhouette: float
    davies_bouldin: float
    calinski_harabasz: float
    distortion: float
    ari: float | None
    flags: tuple[str, ...] = ()


def validation_report(x, partition, centroids=None, truth=None):
    """Bundle the five indices; centroids default to the cluster means."""
    x = _validate_x(x)
    _check_partition(x, partition)
    if centroids is None:
        centroids, _ = _cluster_means(x, partition.labels, partition.k,
                                      np.zeros((partition.k, x.shape[1])))
    db = davies_bouldin(x, partition)
    ch = calinski_harabasz(x, partition)
    flags = []
    if math.isinf(db):
        flags.append("davies_bouldin_infinite")
    if math.isinf(ch):
        flags.append("calinski_harabasz_infinite")
    ari = None if truth is None else adjusted_rand_index(truth, partition.labels)
    return ValidationReport(
        silhouette=silhouette(x, partition),
        davies_bouldin=db,
        calinski_harabasz=ch,
        distortion=distortion(x, partition, centroids),
        ari=ari,
        flags=tuple(flags),
    )
