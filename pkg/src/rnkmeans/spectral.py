"""Similarity graphs and their spectra.

The similarity between two data rows is their ratio DDF evaluated at the
chosen resolution t:  W_ij = t / (t + ||x_i - x_j||).  The symmetric
normalized Laplacian of W feeds the spectral sampling initializer in
rnkmeans.clustering.
"""

from dataclasses import dataclass

import numpy as np

from rnkmeans import kernels
from rnkmeans.pmspace import gamma_ddf

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense similarity matrix with the resolution it was built at."""

    w: np.ndarray
    t: float


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues ascending; vectors[:, i] belongs to values[i]."""

    values: np.ndarray
    vectors: np.ndarray


def pairwise_similarity(x, t):
    """Similarity matrix W_ij = gamma_ddf(||x_i - x_j||, t).

    W is exactly symmetric with a unit diagonal; every entry equals the
    DDF of the corresponding pairwise distance bit for bit.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("x must be a nonempty 2-d array")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    d = kernels.pairwise_distances(x)
    return SimilarityMatrix(gamma_ddf(d, float(t)), float(t))


def normalized_laplacian(w):
    """Symmetric normalized Laplacian L = I - D^{-1/2} W D^{-1/2}.

    Accepts a SimilarityMatrix or a raw symmetric matrix with entries in
    [0, 1].  Built so that L is symmetric bit for bit.  Raises on a
    nonpositive row sum (an isolated vertex has no normalization).
    """
    if isinstance(w, SimilarityMatrix):
        w = w.w
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
        raise ValueError("w must be a nonempty square matrix")
    if np.max(np.abs(w - w.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("w must be symmetric")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ValueError("similarities must lie in [0, 1]")
    deg = w.sum(axis=1)
    if np.any(deg <= 0.0):
        bad = int(np.argmax(deg <= 0.0))
        raise ValueError(f"row {bad} has nonpositive sum {deg[bad]:g}")
    inv_sqrt = 1.0 / np.sqrt(deg)
    # outer(s, s) is bitwise symmetric, and so is w, so lap is too
    lap = -(np.multiply.outer(inv_sqrt, inv_sqrt) * w)
    lap[np.diag_indices_from(lap)] += 1.0
    return lap


def sym_eigendecomp(a):
    """Full eigendecomposition of a symmetric matrix via cyclic Jacobi.

    Eigenvalues come back ascending (stable order under ties); each
    eigenvector is fixed to have its largest-magnitude component
    positive, which pins the sign and makes results reproducible.
    Raises on asymmetry beyond 1e-10 and on non-convergence.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("a must be a nonempty square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("a must be finite")
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError(f"a is asymmetric beyond {SYMMETRY_TOL:g}")
    values, vectors = kernels.jacobi_eigh(a)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    anchor = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[anchor, np.arange(vectors.shape[1])] < 0.0, -1.0, 1.0)
    return EigenPairs(values, vectors * signs[None, :])


def spectral_embedding(lap, k):
    """Rows of the k smallest eigenvectors, each row scaled to unit norm.

    Returns (u, zero_rows); a row that is identically zero before scaling
    is left as zero and flagged in the boolean mask instead of being
    divided by zero.
    """
    eig = sym_eigendecomp(lap)
    n = eig.vectors.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    u = eig.vectors[:, :k].copy()
    norms = np.sqrt(np.sum(u * u, axis=1))
    zero_rows = norms == 0.0
    u[~zero_rows] /= norms[~zero_rows, None]
    return u, zero_rows
