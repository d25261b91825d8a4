"""Random normed k-means clustering toolkit.

Submodules:

* pmspace     distance distribution functions, t-norms, axiom checks
* spectral    similarity graphs, normalized Laplacian, Jacobi eigensolver
* clustering  RNKM and the baselines (Lloyd, k-means++, FCM, kernel
              probabilistic k-means), elbow selection
* validation  internal and external cluster validity indices
* data        CSV handling, min-max normalization, pinned synthetic
              generators, bundled datasets
* cli         command line entry point (``rnkmeans``)
* kernels     hot numeric kernels (compiled backend with numpy fallback)
"""

__version__ = "0.1.0"
