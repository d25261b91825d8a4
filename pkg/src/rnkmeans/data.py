"""Dataset ingestion, min-max normalization, and synthetic generators.

CSV files are RFC-4180-style with '.' decimal separators, an optional
single header row, and an optional label column that is extracted as
ground truth (coded by first appearance).  Synthetic datasets draw
i.i.d. samples from ten classical distributions through the pinned
generator, so one (distribution, parameters, seed) triple yields the
same matrix on every platform.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from rnkmeans.errors import CsvFormatError
from rnkmeans.rng import Xoshiro256


@dataclass(frozen=True)
class DataMatrix:
    """A finite n x d feature matrix with optional column names and
    optional integer ground-truth labels (plus their original names)."""

    x: np.ndarray
    feature_names: tuple[str, ...] | None = None
    labels: np.ndarray | None = None
    label_names: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError("x must be a nonempty 2-d array")
        if not np.all(np.isfinite(x)):
            raise ValueError("x must be finite")
        object.__setattr__(self, "x", x)
        if self.feature_names is not None:
            names = tuple(str(s) for s in self.feature_names)
            if len(names) != x.shape[1]:
                raise ValueError("feature_names length does not match d")
            object.__setattr__(self, "feature_names", names)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (x.shape[0],):
                raise ValueError("labels length does not match n")
            if not np.issubdtype(labels.dtype, np.integer):
                raise ValueError("labels must be integers")
            object.__setattr__(self, "labels", labels.astype(np.int64))
        if self.label_names is not None:
            object.__setattr__(self, "label_names",
                               tuple(str(s) for s in self.label_names))

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def d(self):
        return self.x.shape[1]


def _matrix_from_rows(rows, header, label_column):
    if not rows:
        raise CsvFormatError("empty file")
    names = None
    body_start = 0
    if header:
        names = [cell.strip() for cell in rows[0]]
        body_start = 1
    body = rows[body_start:]
    if not body:
        raise CsvFormatError("no data rows")
    ncols = len(body[0])
    if ncols == 0:
        raise CsvFormatError(f"line {body_start + 1}: empty row")

    label_idx = None
    if label_column is not None:
        if isinstance(label_column, str):
            if names is None:
                raise CsvFormatError("label column given by name requires a header")
            if label_column not in names:
                raise CsvFormatError(f"no column named {label_column!r} in header")
            label_idx = names.index(label_column)
        else:
            label_idx = int(label_column)
            if not 0 <= label_idx < ncols:
                raise CsvFormatError(f"label column {label_idx} out of range "
                                     f"for {ncols} columns")
    if ncols - (0 if label_idx is None else 1) < 1:
        raise CsvFormatError("no feature columns")

    values = np.empty((len(body), ncols - (0 if label_idx is None else 1)))
    raw_labels = []
    for i, row in enumerate(body):
        line = body_start + i + 1
        if len(row) != ncols:
            raise CsvFormatError(f"line {line}: expected {ncols} columns, "
                                 f"got {len(row)}")
        out_j = 0
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                v = float(cell)
            except ValueError:
                raise CsvFormatError(f"line {line}, column {j + 1}: "
                                     f"non-numeric value {cell!r}") from None
            if not math.isfinite(v):
                raise CsvFormatError(f"line {line}, column {j + 1}: "
                                     f"non-finite value {cell!r}")
            values[i, out_j] = v
            out_j += 1

    labels = None
    label_names = None
    if label_idx is not None:
        codes = {}
        for s in raw_labels:
            codes.setdefault(s, len(codes))
        labels = np.fromiter((codes[s] for s in raw_labels), dtype=np.int64,
                             count=len(raw_labels))
        label_names = tuple(codes)
    feature_names = None
    if names is not None:
        feature_names = tuple(s for j, s in enumerate(names) if j != label_idx)
    return DataMatrix(values, feature_names, labels, label_names)


def load_csv(path, delimiter=",", header=False, label_column=None):
    """Parse a numeric CSV into a DataMatrix.

    label_column selects the ground-truth column by 0-based position or,
    with header=True, by name.  Ragged rows and non-numeric feature cells
    raise CsvFormatError naming the 1-based file line (and column).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    return _matrix_from_rows(rows, header, label_column)


def write_csv(path, data, delimiter=",", label_header="label"):
    """Write a DataMatrix so that load_csv reads back bit-identical floats.

    Floats are rendered with repr (shortest round-trip form); a header is
    written only when the matrix carries feature names; labels, when
    present, become a trailing column of their original names.
    """
    if not isinstance(data, DataMatrix):
        data = DataMatrix(np.asarray(data, dtype=np.float64))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        if data.feature_names is not None:
            head = list(data.feature_names)
            if data.labels is not None:
                head.append(label_header)
            writer.writerow(head)
        for i in range(data.n):
            row = [repr(float(v)) for v in data.x[i]]
            if data.labels is not None:
                code = int(data.labels[i])
                row.append(data.label_names[code] if data.label_names
                           else str(code))
            writer.writerow(row)


def minmax_normalize(data):
    """Map each feature to [0, 1] by (x - min) / (max - min).

    Constant features map to all-zeros; the second return value is the
    boolean mask of such features.  Accepts a DataMatrix (names and
    labels are carried over) or a bare array.
    """
    if isinstance(data, DataMatrix):
        x = data.x
        carry = (data.feature_names, data.labels, data.label_names)
    else:
        x = np.ascontiguousarray(data, dtype=np.float64)
        carry = (None, None, None)
    mins = x.min(axis=0)
    span = x.max(axis=0) - mins
    constant = span == 0.0
    scaled = np.zeros_like(x)
    keep = ~constant
    scaled[:, keep] = (x[:, keep] - mins[keep]) / span[keep]
    return DataMatrix(scaled, *carry), constant


class DistKind(Enum):
    """The ten synthetic source distributions."""

    UNIFORM_REAL = "uniform_real"
    UNIFORM_INT = "uniform_int"
    NORMAL = "normal"
    EXPONENTIAL = "exponential"
    UNIFORM_DISCRETE = "uniform_discrete"
    BINOMIAL = "binomial"
    GAMMA = "gamma"
    LOGNORMAL = "lognormal"
    POISSON = "poisson"
    BERNOULLI = "bernoulli"


_DIST_DEFAULTS = {
    DistKind.UNIFORM_REAL: {"low": 0.0, "high": 100.0},
    DistKind.UNIFORM_INT: {"low": 0, "high": 100},
    DistKind.NORMAL: {"mean": 0.0, "std": 1.0},
    DistKind.EXPONENTIAL: {"rate": 0.5},
    DistKind.UNIFORM_DISCRETE: {"low": 0, "high": 9},
    DistKind.BINOMIAL: {"trials": 10, "p": 0.5},
    DistKind.GAMMA: {"shape": 1.0, "scale": 2.0},
    DistKind.LOGNORMAL: {"mu": 0.0, "sigma": 1.0},
    DistKind.POISSON: {"rate": 2.0},
    DistKind.BERNOULLI: {"p": 0.3},
}


def _validated_params(dist, params):
    merged = dict(_DIST_DEFAULTS[dist])
    unknown = set(params) - set(merged)
    if unknown:
        raise ValueError(f"unknown parameters for {dist.value}: "
                         f"{sorted(unknown)} (accepts {sorted(merged)})")
    merged.update(params)
    if dist in (DistKind.UNIFORM_INT, DistKind.UNIFORM_DISCRETE):
        merged["low"], merged["high"] = int(merged["low"]), int(merged["high"])
        if merged["high"] < merged["low"]:
            raise ValueError("high must be >= low")
    elif dist is DistKind.UNIFORM_REAL:
        if not merged["high"] > merged["low"]:
            raise ValueError("high must exceed low")
    elif dist is DistKind.NORMAL:
        if not merged["std"] > 0.0:
            raise ValueError("std must be positive")
    elif dist in (DistKind.EXPONENTIAL, DistKind.POISSON):
        if not merged["rate"] > 0.0:
            raise ValueError("rate must be positive")
    elif dist is DistKind.BINOMIAL:
        merged["trials"] = int(merged["trials"])
        if merged["trials"] < 1:
            raise ValueError("trials must be at least 1")
        if not 0.0 <= merged["p"] <= 1.0:
            raise ValueError("p must lie in [0, 1]")
    elif dist is DistKind.GAMMA:
        if not (merged["shape"] > 0.0 and merged["scale"] > 0.0):
            raise ValueError("shape and scale must be positive")
    elif dist is DistKind.LOGNORMAL:
        if not merged["sigma"] > 0.0:
            raise ValueError("sigma must be positive")
    elif dist is DistKind.BERNOULLI:
        if not 0.0 <= merged["p"] <= 1.0:
            raise ValueError("p must lie in [0, 1]")
    return merged


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic dataset: distribution, parameters
    (defaults filled in), shape, and seed."""

    dist: DistKind
    params: dict
    n: int
    d: int
    seed: int

    def __post_init__(self):
        if not isinstance(self.dist, DistKind):
            raise ValueError(f"dist must be a DistKind, got {self.dist!r}")
        object.__setattr__(self, "params",
                           _validated_params(self.dist, dict(self.params)))
        if int(self.n) < 1 or int(self.d) < 1:
            raise ValueError("n and d must be at least 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "seed", int(self.seed))


def _sampler(dist, params):
    p = params
    if dist is DistKind.UNIFORM_REAL:
        return lambda rng: rng.uniform_real(p["low"], p["high"])
    if dist in (DistKind.UNIFORM_INT, DistKind.UNIFORM_DISCRETE):
        return lambda rng: float(rng.uniform_int(p["low"], p["high"]))
    if dist is DistKind.NORMAL:
        return lambda rng: rng.normal(p["mean"], p["std"])
    if dist is DistKind.EXPONENTIAL:
        return lambda rng: rng.exponential(p["rate"])
    if dist is DistKind.BINOMIAL:
        return lambda rng: float(rng.binomial(p["trials"], p["p"]))
    if dist is DistKind.GAMMA:
        return lambda rng: rng.gamma(p["shape"], p["scale"])
    if dist is DistKind.LOGNORMAL:
        return lambda rng: rng.lognormal(p["mu"], p["sigma"])
    if dist is DistKind.POISSON:
        return lambda rng: float(rng.poisson(p["rate"]))
    if dist is DistKind.BERNOULLI:
        return lambda rng: float(rng.bernoulli(p["p"]))
    raise ValueError(f"unhandled distribution {dist!r}")


def gen_synthetic(spec):
    """Draw spec.n x spec.d i.i.d. samples in row-major order.

    The same spec always yields the bit-identical matrix: one generator
    seeded with spec.seed feeds every cell in sequence.
    """
    if not isinstance(spec, SyntheticSpec):
        raise ValueError("spec must be a SyntheticSpec")
    rng = Xoshiro256(spec.seed)
    draw = _sampler(spec.dist, spec.params)
    flat = np.empty(spec.n * spec.d)
    for i in range(flat.shape[0]):
        flat[i] = draw(rng)
    return DataMatrix(flat.reshape(spec.n, spec.d))


def load_manifest(path):
    """Load a dataset described by a JSON manifest.

    Keys: path (CSV location, resolved relative to the manifest), n, d
    (expected shape after label extraction), and optional delimiter,
    header, label_column, name.  A shape mismatch is an error.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    missing = {"path", "n", "d"} - set(spec)
    if missing:
        raise ValueError(f"manifest is missing keys: {sorted(missing)}")
    csv_path = Path(spec["path"])
    if not csv_path.is_absolute():
        csv_path = path.parent / csv_path
    dm = load_csv(csv_path,
                  delimiter=spec.get("delimiter", ","),
                  header=bool(spec.get("header", False)),
                  label_column=spec.get("label_column"))
    if (dm.n, dm.d) != (int(spec["n"]), int(spec["d"])):
        raise ValueError(f"manifest expects shape ({spec['n']}, {spec['d']}), "
                         f"file has ({dm.n}, {dm.d})")
    return dm


def load_iris():
    """The bundled 150 x 4 iris dataset with its three species as labels."""
    text = (resources.files("rnkmeans.datasets") / "iris.csv"
            ).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    return _matrix_from_rows(rows, header=True, label_column="species")
