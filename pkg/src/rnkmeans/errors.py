"""Exception types shared across the package."""


class JacobiConvergenceError(RuntimeError):
    """Eigensolver failed to reach the off-diagonal threshold.

    Carries the off-diagonal Frobenius norm reached when the sweep budget
    ran out, so callers can judge how far from convergence the run was.
    """

    def __init__(self, off_norm, max_sweeps):
        self.off_norm = float(off_norm)
        self.max_sweeps = int(max_sweeps)
        super().__init__(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {self.off_norm:.3e})")


class EmptyClusterError(RuntimeError):
    """A cluster stayed empty even after the reseeding repair pass."""


class SweepFailureError(RuntimeError):
    """Every t value in a sweep failed; per-t errors are attached."""

    def __init__(self, failures):
        self.failures = tuple(failures)  # (t, repr(exception)) pairs
        lines = ", ".join(f"t={t:g}: {msg}" for t, msg in self.failures)
        super().__init__(f"all t runs failed ({lines})")


class CsvFormatError(ValueError):
    """Malformed CSV input; the message names the offending row/column."""
