"""Pure numpy backend for the hot kernels.

Mirrors rnkmeans.kernels._cy operation for operation; keep the two in
sync.  The Jacobi rotation below applies exactly the same elementwise
arithmetic as the compiled loop (and the extension is built with FMA
contraction off), so the backends agree to rounding noise.
"""

import math

import numpy as np

from rnkmeans.errors import JacobiConvergenceError

# Row-block size for the pairwise distance loop, keeps the (block, n, d)
# intermediate below ~128 MB for double precision.
_BLOCK_ELEMS = 1 << 24


def pairwise_distances(x):
    n, d = x.shape
    out = np.empty((n, n))
    block = max(1, _BLOCK_ELEMS // max(1, n * d))
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = x[start:stop, None, :] - x[None, :, :]
        np.sqrt(np.sum(diff * diff, axis=-1), out=out[start:stop])
    # (x_i - x_j)^2 sums in the same order as (x_j - x_i)^2, so the matrix
    # is symmetric bit for bit; the diagonal is exactly zero.
    return out

def cross_distances(x, c):
    diff = x[:, None, :] - c[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _off_norm(a):
    # sum the off-diagonal squares directly; subtracting the diagonal mass
    # from the total cancels catastrophically once the off-diagonal part
    # is small, leaving a floor of ~eps * ||A||_F^2 that never converges
    off = np.array(a, copy=True)
    np.fill_diagonal(off, 0.0)
    return math.sqrt(float(np.sum(off * off)))


def jacobi_eigh(a, rel_tol=1e-10, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) in diagonal order, neither sorted
    nor sign-fixed; callers normalize.  Converges when the off-diagonal
    Frobenius norm falls below rel_tol * ||A||_F (computed on entry);
    raises JacobiConvergenceError after max_sweeps sweeps.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    thresh = rel_tol * math.sqrt(float(np.sum(a * a)))
    converged = False
    for _ in range(max_sweeps):
        if _off_norm(a) <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if abs(tau) < 1e150:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                else:
                    # tau^2 would overflow; the small root tends to 1/(2 tau)
                    t = 0.5 / tau
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if not converged and _off_norm(a) > thresh:
        raise JacobiConvergenceError(_off_norm(a), max_sweeps)
    return np.diagonal(a).copy(), v
