"""Clustering algorithms.

The centerpiece is random normed k-means (RNKM): points are assigned to
the centroid whose ratio DDF value Gamma(t, ||c - x||) = t / (t + ||c - x||)
is largest, which for fixed t > 0 is the Euclidean nearest centroid; the
objective J'(C) = sum over clusters of sum over members of Gamma is
monotonically non-decreasing over iterations.  Initialization samples
centroids from a spectral embedding of the Gamma similarity graph.

Baselines share the same conventions (deterministic seeding through the
pinned generator, lowest-index tie-breaks, empty-cluster repair):
Lloyd k-means, standalone k-means++ seeding, fuzzy c-means, and a
kernelized probabilistic k-means with softmax memberships.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from rnkmeans import kernels
from rnkmeans.errors import EmptyClusterError, SweepFailureError
from rnkmeans.pmspace import gamma_ddf
from rnkmeans.rng import Xoshiro256
from rnkmeans.spectral import normalized_laplacian, pairwise_similarity, spectral_embedding

DEFAULT_MAX_ITERS = 300
DEFAULT_TOL = 1e-6


class Score(Enum):
    """Model-selection score for the t sweep."""

    SILHOUETTE = "silhouette"
    OBJECTIVE = "objective"


class Runner(Enum):
    """Algorithm driving the elbow curve."""

    LLOYD = "lloyd"
    RNKM = "rnkm"


@dataclass(frozen=True)
class Partition:
    """Hard labels in [0, k); completeness is not enforced here because
    soft algorithms may legitimately leave a cluster without argmax wins.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] < 1:
            raise ValueError("labels must be a nonempty 1-d array")
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValueError("labels must be integers")
        labels = labels.astype(np.int64)
        if self.k < 1:
            raise ValueError("k must be positive")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValueError(f"labels must lie in [0, {self.k})")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.labels.shape[0]

    def cluster_sizes(self):
        return np.bincount(self.labels, minlength=self.k)

    def is_complete(self):
        """True when every label in [0, k) occurs at least once."""
        return bool(np.all(self.cluster_sizes() > 0))


@dataclass(frozen=True)
class TSweepEntry:
    """One row of the per-t table kept by the rnkm sweep."""

    t: float
    score: float | None
    iterations: int | None
    converged: bool | None
    error: str | None = None


@dataclass(frozen=True)
class TraceFrame:
    """Snapshot of one iteration: the t in effect, the centroids after
    the update, and the labels that produced it (frame 0 is the init)."""

    iteration: int
    t: float
    centroids: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True)
class ClusteringResult:
    partition: Partition
    centroids: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    converged: bool
    t: float | None = None
    t_table: tuple[TSweepEntry, ...] | None = None


@dataclass(frozen=True)
class FuzzyMembership:
    """Row-stochastic membership matrix; fuzzifier is None for methods
    without one (the kernel probabilistic baseline)."""

    u: np.ndarray
    fuzzifier: float | None = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64)
        if u.ndim != 2 or u.shape[0] < 1 or u.shape[1] < 1:
            raise ValueError("u must be a nonempty 2-d array")
        if np.any(u < -1e-12) or np.any(u > 1.0 + 1e-12):
            raise ValueError("memberships must lie in [0, 1]")
        if np.max(np.abs(u.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("membership rows must sum to 1")
        if self.fuzzifier is not None and not self.fuzzifier > 1.0:
            raise ValueError("fuzzifier must exceed 1")
        object.__setattr__(self, "u", u)

    def hard_labels(self):
        return np.argmax(self.u, axis=1).astype(np.int64)


def _validate_x(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError("x must be a nonempty 2-d array")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    return x


def _validate_k(k, n):
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return k


def _validate_loop(max_iters, tol):
    if int(max_iters) < 1:
        raise ValueError("max_iters must be at least 1")
    if not tol >= 0.0:
        raise ValueError("tol must be nonnegative")
    return int(max_iters), float(tol)


def _cluster_means(x, labels, k, fallback):
    """Mean of each cluster; empty clusters keep their fallback row."""
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, labels, x)
    sizes = np.bincount(labels, minlength=k)
    means = fallback.copy()
    occupied = sizes > 0
    means[occupied] = sums[occupied] / sizes[occupied, None]
    return means, sizes


def _repair_empty(x, labels, centroids, k, assign):
    """Reseed every empty cluster and redo the assignment once.

    An empty cluster's centroid moves to the point farthest from it among
    the members of the currently largest cluster (distinct donors when
    several clusters are empty).  If a cluster is still empty after the
    single re-assignment, raises EmptyClusterError.
    """
    sizes = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(sizes == 0)
    if empty.size == 0:
        return labels, centroids
    centroids = centroids.copy()
    sizes = sizes.copy()
    taken = np.zeros(x.shape[0], dtype=bool)
    for j in empty:
        largest = int(np.argmax(sizes))
        members = np.flatnonzero((labels == largest) & ~taken)
        if members.size == 0:
            raise EmptyClusterError(
                f"cluster {j} could not be reseeded: no donor points left")
        dist = np.sqrt(np.sum((x[members] - centroids[j]) ** 2, axis=1))
        donor = members[int(np.argmax(dist))]
        centroids[j] = x[donor]
        taken[donor] = True
        sizes[largest] -= 1
    labels = assign(x, centroids)
    if np.any(np.bincount(labels, minlength=k) == 0):
        bad = int(np.argmax(np.bincount(labels, minlength=k) == 0))
        raise EmptyClusterError(f"cluster {bad} is empty after repair")
    return labels, centroids


def _euclidean_assign(x, centroids):
    return np.argmin(kernels.cross_distances(x, centroids), axis=1)


def _member_distances(x, centroids, labels):
    diff = x - centroids[labels]
    return np.sqrt(np.sum(diff * diff, axis=1))


def random_rows_init(x, k, seed):
    """k distinct data rows drawn uniformly (classic k-means seeding)."""
    x = _validate_x(x)
    k = _validate_k(k, x.shape[0])
    rng = Xoshiro256(seed)
    remaining = list(range(x.shape[0]))
    chosen = []
    for _ in range(k):
        chosen.append(remaining.pop(rng.index(len(remaining))))
    return x[chosen].copy()


def kmeanspp_init(x, k, seed):
    """k-means++ seeding: first centroid uniform, the rest by the D^2 law.

    Each subsequent centroid is the first row whose cumulative squared
    distance to the nearest chosen centroid exceeds u * total; if every
    candidate already coincides with a centroid (all D^2 = 0), the
    remaining centroids are drawn uniformly without replacement.
    """
    x = _validate_x(x)
    n = x.shape[0]
    k = _validate_k(k, n)
    rng = Xoshiro256(seed)
    chosen = [rng.index(n)]
    d2 = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for _ in range(k - 1):
        cumulative = np.cumsum(d2)
        total = cumulative[-1]
        if total > 0.0:
            r = rng.uniform() * total
            idx = int(np.searchsorted(cumulative, r, side="right"))
            idx = min(idx, n - 1)
        else:
            remaining = [i for i in range(n) if i not in set(chosen)]
            idx = remaining[rng.index(len(remaining))]
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((x - x[idx]) ** 2, axis=1))
    return x[chosen].copy()


def rnkm_assign(x, centroids, t):
    """Label each row with the centroid of largest Gamma(t, distance).

    Ties go to the lowest centroid index.  Because Gamma is strictly
    decreasing in the distance for fixed t > 0, this is the Euclidean
    nearest-centroid rule.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = _validate_x(x)
    centroids = _validate_x(centroids)
    g = gamma_ddf(kernels.cross_distances(x, centroids), float(t))
    return np.argmax(g, axis=1).astype(np.int64)


def lloyd_kmeans(x, k, init, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL):
    """Plain Lloyd iteration from explicit initial centroids.

    Stops when the largest centroid displacement drops below tol or after
    max_iters passes.  The WCSS trace (recorded after each update) is
    non-increasing; empty clusters are repaired by reseeding.
    """
    x = _validate_x(x)
    n = x.shape[0]
    k = _validate_k(k, n)
    max_iters, tol = _validate_loop(max_iters, tol)
    centroids = _validate_x(init)
    if centroids.shape != (k, x.shape[1]):
        raise ValueError(f"init must have shape {(k, x.shape[1])}, "
                         f"got {centroids.shape}")
    centroids = centroids.copy()
    trace = []
    converged = False
    iterations = 0
    labels = None
    for _ in range(max_iters):
        iterations += 1
        labels = _euclidean_assign(x, centroids)
        labels, centroids = _repair_empty(x, labels, centroids, k,
                                          _euclidean_assign)
        new_centroids, _ = _cluster_means(x, labels, k, centroids)
        d = _member_distances(x, new_centroids, labels)
        trace.append(float(np.sum(d * d)))
        shift = np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1)))
        centroids = new_centroids
        if shift < tol:
            converged = True
            break
    return ClusteringResult(Partition(labels, k), centroids,
                            np.asarray(trace), iterations, converged)


def rnkm_single_t(x, k, t, init, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL):
    """RNKM at a fixed resolution t from explicit initial centroids.

    Alternates the Gamma argmax assignment with a guarded mean update: a
    cluster's centroid moves to the new member mean only when that does
    not lower the cluster's Gamma sum, otherwise it stays put.  The guard
    accepts the mean whenever the mean helps (for moderate t it always
    does) and makes the J' trace non-decreasing by construction, which
    the plain mean update does not guarantee for small t.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = _validate_x(x)
    n = x.shape[0]
    k = _validate_k(k, n)
    if k < 2:
        raise ValueError("k must be at least 2 (use objective_rnkm for "
                         "single-cluster diagnostics)")
    max_iters, tol = _validate_loop(max_iters, tol)
    centroids = _validate_x(init)
    if centroids.shape != (k, x.shape[1]):
        raise ValueError(f"init must have shape {(k, x.shape[1])}, "
                         f"got {centroids.shape}")
    t = float(t)
    assign = lambda xx, cc: rnkm_assign(xx, cc, t)
    centroids = centroids.copy()
    trace = []
    converged = False
    iterations = 0
    labels = None
    for _ in range(max_iters):
        iterations += 1
        labels = assign(x, centroids)
        labels, centroids = _repair_empty(x, labels, centroids, k, assign)
        means, _ = _cluster_means(x, labels, k, centroids)
        gamma_old = gamma_ddf(_member_distances(x, centroids, labels), t)
        gamma_new = gamma_ddf(_member_distances(x, means, labels), t)
        accept = (np.bincount(labels, weights=gamma_new, minlength=k)
                  >= np.bincount(labels, weights=gamma_old, minlength=k))
        new_centroids = np.where(accept[:, None], means, centroids)
        trace.append(float(np.sum(np.where(accept[labels], gamma_new, gamma_old))))
        shift = np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1)))
        centroids = new_centroids
        if shift < tol:
            converged = True
            break
    return ClusteringResult(Partition(labels, k), centroids,
                            np.asarray(trace), iterations, converged, t=t)


def spectral_sampling_init(x, k, t, seed, max_iters=DEFAULT_MAX_ITERS,
                           tol=DEFAULT_TOL):
    """Initial centroids for RNKM from the Gamma similarity spectrum.

    Builds W_ij = Gamma(t, ||x_i - x_j||), embeds the rows with the k
    smallest eigenvectors of the normalized Laplacian (rows unit-scaled),
    clusters the embedding with seeded k-means, and returns the data-space
    mean of each embedded cluster.  With k = n every point becomes its
    own centroid.
    """
    x = _validate_x(x)
    k = _validate_k(k, x.shape[0])
    sim = pairwise_similarity(x, t)
    lap = normalized_laplacian(sim)
    u, _ = spectral_embedding(lap, k)
    emb = lloyd_kmeans(u, k, kmeanspp_init(u, k, seed), max_iters, tol)
    centroids, sizes = _cluster_means(x, emb.partition.labels, k,
                                      np.zeros((k, x.shape[1])))
    if np.any(sizes == 0):
        raise EmptyClusterError("embedded clustering produced an empty cluster")
    return centroids


def rnkm(x, k, t_values, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL,
         seed=0, score=Score.SILHOUETTE):
    """RNKM with model selection over a sweep of t values.

    Each t gets its own spectral sampling initialization and single-t run;
    the result with the best score (silhouette by default, final J' with
    Score.OBJECTIVE) wins, ties resolved toward the smallest t.  Per-t
    failures are recorded and skipped; if every t fails, SweepFailureError
    aggregates them.  The returned result carries the per-t table.
    """
    from rnkmeans.validation import silhouette  # local import breaks the cycle

    x = _validate_x(x)
    ts = sorted(float(t) for t in np.atleast_1d(np.asarray(t_values, dtype=np.float64)))
    if len(ts) == 0:
        raise ValueError("t_values must be nonempty")
    if not all(t > 0.0 and np.isfinite(t) for t in ts):
        raise ValueError("t values must be positive and finite")
    if not isinstance(score, Score):
        raise ValueError(f"score must be a Score, got {score!r}")
    rows = []
    best = None
    best_score = -np.inf
    for t in ts:
        try:
            init = spectral_sampling_init(x, k, t, seed, max_iters, tol)
            result = rnkm_single_t(x, k, t, init, max_iters, tol)
            if score is Score.SILHOUETTE:
                value = silhouette(x, result.partition)
            else:
                value = float(result.objective_trace[-1])
        except Exception as exc:
            rows.append(TSweepEntry(t, None, None, None, repr(exc)))
            continue
        rows.append(TSweepEntry(t, value, result.iterations, result.converged))
        if value > best_score:
            best = result
            best_score = value
    if best is None:
        raise SweepFailureError([(row.t, row.error) for row in rows])
    return replace(best, t_table=tuple(rows))


def rnkm_trace(x, k, t_schedule, seed=0, max_iters=DEFAULT_MAX_ITERS,
               tol=DEFAULT_TOL):
    """Per-iteration RNKM centroid frames under a t schedule.

    Starts from the spectral sampling initialization at the first t of
    the schedule; iteration i >= 1 runs one guarded update at
    t_schedule[min(i-1, last)], so a short schedule holds its final t.
    Frame 0 carries the initial centroids with the assignment they induce;
    frame i carries the post-update centroids and the labels that drove
    the update.  Returns (frames, converged).
    """
    x = _validate_x(x)
    k = _validate_k(k, x.shape[0])
    max_iters, tol = _validate_loop(max_iters, tol)
    ts = [float(t) for t in np.atleast_1d(np.asarray(t_schedule, dtype=np.float64))]
    if len(ts) == 0:
        raise ValueError("t_schedule must be nonempty")
    if not all(t > 0.0 and np.isfinite(t) for t in ts):
        raise ValueError("t values must be positive and finite")
    centroids = spectral_sampling_init(x, k, ts[0], seed, max_iters, tol)
    frames = [TraceFrame(0, ts[0], centroids.copy(),
                         rnkm_assign(x, centroids, ts[0]))]
    converged = False
    for it in range(1, max_iters + 1):
        t = ts[min(it - 1, len(ts) - 1)]
        assign = lambda xx, cc: rnkm_assign(xx, cc, t)
        labels = assign(x, centroids)
        labels, centroids = _repair_empty(x, labels, centroids, k, assign)
        means, _ = _cluster_means(x, labels, k, centroids)
        gamma_old = gamma_ddf(_member_distances(x, centroids, labels), t)
        gamma_new = gamma_ddf(_member_distances(x, means, labels), t)
        accept = (np.bincount(labels, weights=gamma_new, minlength=k)
                  >= np.bincount(labels, weights=gamma_old, minlength=k))
        new_centroids = np.where(accept[:, None], means, centroids)
        shift = np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1)))
        centroids = new_centroids
        frames.append(TraceFrame(it, t, centroids.copy(), labels))
        if shift < tol:
            converged = True
            break
    return frames, converged


def fcm(x, k, m=2.0, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, seed=0):
    """Fuzzy c-means with k-means++ initial centroids.

    Memberships follow the inverse-distance-ratio update with fuzzifier m;
    a row at zero distance from any centroid gets membership 1 on the
    lowest-index zero-distance centroid.  Returns the hard-label result
    (argmax per row) together with the membership matrix.  The objective
    trace sum(u^m d^2), recorded after each centroid update, is
    non-increasing.

    If the final argmax partition leaves a cluster empty, that cluster is
    reseeded (farthest point of the largest cluster) and memberships are
    recomputed once against the repaired centroids; a persistently empty
    cluster raises EmptyClusterError.
    """
    x = _validate_x(x)
    n = x.shape[0]
    k = _validate_k(k, n)
    if not m > 1.0:
        raise ValueError("fuzzifier m must exceed 1")
    max_iters, tol = _validate_loop(max_iters, tol)
    p = 2.0 / (m - 1.0)
    centroids = kmeanspp_init(x, k, seed)
    d = kernels.cross_distances(x, centroids)
    trace = []
    converged = False
    iterations = 0
    u = None
    for _ in range(max_iters):
        iterations += 1
        u = _fcm_memberships(d, p)
        w = u ** m
        weight = w.sum(axis=0)
        new_centroids = centroids.copy()
        occupied = weight > 0.0
        new_centroids[occupied] = (w.T @ x)[occupied] / weight[occupied, None]
        d = kernels.cross_distances(x, new_centroids)
        trace.append(float(np.sum(w * d * d)))
        shift = np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1)))
        centroids = new_centroids
        if shift < tol:
            converged = True
            break
    labels = np.argmax(u, axis=1).astype(np.int64)
    if np.any(np.bincount(labels, minlength=k) == 0):
        # reseed the empty clusters, then hand the repaired centroids back
        # to the membership rule once (hard argmax of u is argmin distance)
        labels, centroids = _repair_empty(x, labels, centroids, k,
                                          _euclidean_assign)
        u = _fcm_memberships(kernels.cross_distances(x, centroids), p)
    membership = FuzzyMembership(u, m)
    labels = membership.hard_labels()
    result = ClusteringResult(Partition(labels, k), centroids,
                              np.asarray(trace), iterations, converged)
    return result, membership


def _fcm_memberships(d, p):
    zero_rows = np.flatnonzero(np.any(d == 0.0, axis=1))
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        ratio = d[:, :, None] / d[:, None, :]
        u = 1.0 / np.sum(ratio ** p, axis=2)
    for i in zero_rows:
        u[i] = 0.0
        u[i, int(np.argmax(d[i] == 0.0))] = 1.0
    return u


def kpkm(x, k, sigma=None, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, seed=0):
    """Kernelized probabilistic k-means (RBF kernel, softmax memberships).

    Feature-space centroids are membership-weighted means expressed
    through the kernel matrix; memberships are the softmax of
    -d^2 / (2 sigma^2) over the feature-space distances d.  sigma defaults
    to the median pairwise distance (1.0 when that is zero).  The
    objective trace records the entropic free energy
    sum(u d^2) + 2 sigma^2 sum(u ln u), which this alternation descends;
    convergence is declared when the largest feature-space centroid shift
    drops below tol.

    Softmax rows always carry some mass for every cluster, but the hard
    argmax can still leave one empty (at the median-heuristic sigma the
    softmax fixed point may support fewer than k clusters).  Such a
    cluster is reseeded in feature space at the farthest member of the
    largest cluster and memberships are recomputed once; a persistently
    empty cluster raises EmptyClusterError.
    """
    x = _validate_x(x)
    n = x.shape[0]
    k = _validate_k(k, n)
    max_iters, tol = _validate_loop(max_iters, tol)
    dists = kernels.pairwise_distances(x)
    if sigma is None:
        upper = dists[np.triu_indices(n, 1)]
        sigma = float(np.median(upper)) if upper.size else 0.0
        if sigma == 0.0:
            sigma = 1.0
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    two_sigma_sq = 2.0 * sigma * sigma
    kernel = np.exp(-(dists * dists) / two_sigma_sq)

    init_centroids = kmeanspp_init(x, k, seed)
    d0 = kernels.cross_distances(x, init_centroids)
    d2 = np.maximum(2.0 - 2.0 * np.exp(-(d0 * d0) / two_sigma_sq), 0.0)
    u = _softmax_rows(-d2 / two_sigma_sq)

    trace = []
    converged = False
    iterations = 0
    s = u.sum(axis=0)
    ku = kernel @ u
    quad = np.sum(u * ku, axis=0)
    for _ in range(max_iters):
        iterations += 1
        d2 = np.maximum(1.0 - 2.0 * ku / s[None, :] + (quad / s ** 2)[None, :], 0.0)
        u_new = _softmax_rows(-d2 / two_sigma_sq)
        s_new = u_new.sum(axis=0)
        if np.any(s_new == 0.0):
            bad = int(np.argmax(s_new == 0.0))
            raise EmptyClusterError(f"cluster {bad} lost all membership mass")
        ku_new = kernel @ u_new
        quad_new = np.sum(u_new * ku_new, axis=0)
        cross = np.sum(u * ku_new, axis=0)
        shift_sq = np.maximum(quad_new / s_new ** 2
                              - 2.0 * cross / (s_new * s)
                              + quad / s ** 2, 0.0)
        d2_new = np.maximum(1.0 - 2.0 * ku_new / s_new[None, :]
                            + (quad_new / s_new ** 2)[None, :], 0.0)
        entropy = np.sum(np.where(u_new > 0.0, u_new * np.log(u_new,
                                  out=np.zeros_like(u_new), where=u_new > 0.0), 0.0))
        trace.append(float(np.sum(u_new * d2_new) + two_sigma_sq * entropy))
        u, s, ku, quad = u_new, s_new, ku_new, quad_new
        if np.max(np.sqrt(shift_sq)) < tol:
            converged = True
            break

    labels = np.argmax(u, axis=1).astype(np.int64)
    sizes = np.bincount(labels, minlength=k)
    if np.any(sizes == 0):
        # feature-space analog of the reseed: the empty cluster's centroid
        # moves onto the farthest member of the largest cluster (a one-hot
        # membership row), then memberships are recomputed once
        d2 = np.maximum(1.0 - 2.0 * ku / s[None, :] + (quad / s ** 2)[None, :], 0.0)
        u = u.copy()
        sizes = sizes.copy()
        taken = np.zeros(n, dtype=bool)
        for j in np.flatnonzero(sizes == 0):
            largest = int(np.argmax(sizes))
            members = np.flatnonzero((labels == largest) & ~taken)
            if members.size == 0:
                raise EmptyClusterError(
                    f"cluster {j} could not be reseeded: no donor points left")
            donor = members[int(np.argmax(d2[members, j]))]
            u[donor] = 0.0
            u[donor, j] = 1.0
            taken[donor] = True
            sizes[largest] -= 1
        s = u.sum(axis=0)
        ku = kernel @ u
        quad = np.sum(u * ku, axis=0)
        d2 = np.maximum(1.0 - 2.0 * ku / s[None, :] + (quad / s ** 2)[None, :], 0.0)
        u = _softmax_rows(-d2 / two_sigma_sq)
        labels = np.argmax(u, axis=1).astype(np.int64)
        counts = np.bincount(labels, minlength=k)
        if np.any(counts == 0):
            bad = int(np.argmax(counts == 0))
            raise EmptyClusterError(f"cluster {bad} is empty after repair")
    membership = FuzzyMembership(u, None)
    result = ClusteringResult(Partition(labels, k), centroids_from_memberships(x, u),
                              np.asarray(trace), iterations, converged)
    return result, membership


def centroids_from_memberships(x, u):
    """Input-space membership-weighted means (diagnostic counterpart of
    the implicit feature-space centroids)."""
    weight = u.sum(axis=0)
    out = (u.T @ x)
    occupied = weight > 0.0
    out[occupied] /= weight[occupied, None]
    return out


def _softmax_rows(z):
    z = z - np.max(z, axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def elbow_select_k(x, k_range, runner=Runner.LLOYD, seed=0, t=1.0,
                   max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL):
    """Pick k by the farthest-from-chord elbow rule.

    Runs the chosen algorithm for each k (Lloyd scores final WCSS, RNKM
    scores -J' at the fixed resolution ``t``), then returns the k whose
    curve point lies farthest from the chord joining the curve endpoints.
    Ties and an exactly linear curve resolve to the smallest k.
    """
    x = _validate_x(x)
    n = x.shape[0]
    ks = sorted({int(k) for k in k_range})
    if not ks:
        raise ValueError("k_range must be nonempty")
    if ks[0] < 2 or ks[-1] > n:
        raise ValueError(f"k values must lie in [2, {n}]")
    if not isinstance(runner, Runner):
        raise ValueError(f"runner must be a Runner, got {runner!r}")
    ys = []
    for k in ks:
        if runner is Runner.LLOYD:
            res = lloyd_kmeans(x, k, kmeanspp_init(x, k, seed), max_iters, tol)
            ys.append(float(res.objective_trace[-1]))
        else:
            init = spectral_sampling_init(x, k, t, seed, max_iters, tol)
            res = rnkm_single_t(x, k, t, init, max_iters, tol)
            ys.append(-float(res.objective_trace[-1]))
    if len(ks) == 1:
        return ks[0]
    k_arr = np.asarray(ks, dtype=np.float64)
    y_arr = np.asarray(ys)
    dk = k_arr[-1] - k_arr[0]
    dy = y_arr[-1] - y_arr[0]
    # perpendicular distance from each curve point to the endpoint chord
    num = np.abs(dy * (k_arr - k_arr[0]) - dk * (y_arr - y_arr[0]))
    return ks[int(np.argmax(num))]


def objective_rnkm(x, partition, centroids, t):
    """J'(C): the total Gamma mass of members around their centroids."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = _validate_x(x)
    centroids = _validate_x(centroids)
    if not isinstance(partition, Partition):
        raise ValueError("partition must be a Partition")
    if partition.n != x.shape[0]:
        raise ValueError("partition length does not match x")
    if centroids.shape[0] != partition.k:
        raise ValueError("centroid count does not match partition.k")
    d = _member_distances(x, centroids, partition.labels)
    return float(np.sum(gamma_ddf(d, float(t))))


def average_within_cluster_gamma(points, t):
    """Mean-normalized pairwise Gamma mass of one cluster.

    For r >= 2 member rows returns (1/r) * sum over unordered pairs of
    Gamma(t, pairwise distance); clusters with fewer than two members
    contribute 0.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    points = _validate_x(points)
    r = points.shape[0]
    if r < 2:
        return 0.0
    d = kernels.pairwise_distances(points)
    iu = np.triu_indices(r, 1)
    return float(np.sum(gamma_ddf(d[iu], float(t))) / r)


def pairwise_objective(x, partition, t):
    """J(C): sum of average_within_cluster_gamma over clusters (diagnostic,
    not the quantity the iteration optimizes)."""
    x = _validate_x(x)
    if not isinstance(partition, Partition):
        raise ValueError("partition must be a Partition")
    if partition.n != x.shape[0]:
        raise ValueError("partition length does not match x")
    total = 0.0
    for j in range(partition.k):
        members = x[partition.labels == j]
        if members.shape[0] >= 2:
            total += average_within_cluster_gamma(members, t)
    return float(total)
