"""Hot numeric kernels with a compiled fast path.

The Cython extension (rnkmeans.kernels._cy) is preferred when it was
built; the numpy fallback (_py) implements the same algorithms with the
same conventions.  Set RNKMEANS_KERNELS=py or =cy to force a backend;
forcing cy raises if the extension is missing.
"""

import os

import numpy as np

_requested = os.environ.get("RNKMEANS_KERNELS", "").strip().lower()

if _requested in ("", "cy"):
    try:
        from rnkmeans.kernels import _cy as _impl
        BACKEND = "cy"
    except ImportError:
        if _requested == "cy":
            raise ImportError("RNKMEANS_KERNELS=cy but the compiled kernels "
                              "are not installed") from None
        from rnkmeans.kernels import _py as _impl
        BACKEND = "py"
elif _requested == "py":
    from rnkmeans.kernels import _py as _impl
    BACKEND = "py"
else:
    raise ValueError(f"unknown RNKMEANS_KERNELS value {_requested!r}; "
                     "expected 'py' or 'cy'")


def _as_matrix(a, name):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {a.shape}")
    return a


def pairwise_distances(x):
    """Full matrix of Euclidean distances between rows of x.

    Exactly symmetric with an exactly zero diagonal.
    """
    return _impl.pairwise_distances(_as_matrix(x, "x"))


def cross_distances(x, c):
    """n x k matrix of Euclidean distances from rows of x to rows of c."""
    x = _as_matrix(x, "x")
    c = _as_matrix(c, "c")
    if x.shape[1] != c.shape[1]:
        raise ValueError(f"dimension mismatch: x has {x.shape[1]} features, "
                         f"c has {c.shape[1]}")
    return _impl.cross_distances(x, c)


def jacobi_eigh(a, rel_tol=1e-10, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition; see the backend docstring."""
    a = _as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"a must be square, got shape {a.shape}")
    return _impl.jacobi_eigh(a, rel_tol, max_sweeps)
