"""Command-line harness.

Verbs: ``bench`` (benchmark table over datasets x algorithms x seeds),
``sweep-t`` (per-t validity-index curves for RNKM), ``trace``
(per-iteration centroid frames, with an optional per-iteration t
schedule), ``gen`` (synthetic dataset to CSV), and ``validate``
(validity report for supplied labels).

Conventions: bench, sweep-t, and trace min-max normalize features before
clustering (validate scores the data as given); CSV outputs use ``\n``
line endings and repr-formatted floats so reruns are byte-identical;
summaries and errors are JSON; figures are self-contained polyline SVGs.
Failures print ``{"error": {...}}`` to stdout and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from rnkmeans import clustering
from rnkmeans.data import (
    DataMatrix,
    DistKind,
    SyntheticSpec,
    gen_synthetic,
    load_csv,
    load_iris,
    load_manifest,
    minmax_normalize,
    write_csv,
)
from rnkmeans.validation import validation_report

ALGORITHMS = ("km", "kmpp", "fcm", "kpkm", "rnkm")

# reference silhouette medians for the bundled-iris benchmark rows;
# bench reports the delta of the measured medians against these
REFERENCE_SILHOUETTE = {"iris": {"km": 0.459, "rnkm": 0.680}}

RECORD_COLUMNS = ("dataset", "algo", "seed", "k", "SI", "Da", "Di", "Ca",
                  "ARI", "t", "iters")
SWEEP_COLUMNS = ("t", "SI", "Da", "Di", "Ca", "ARI", "iters", "converged")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _jnum(v):
    # JSON has no Infinity literal; degenerate indices become strings
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _write_rows(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _t_grid(t_min, t_max, steps, log):
    if steps < 1:
        raise ValueError("t-steps must be at least 1")
    if not (t_min > 0.0 and t_max >= t_min):
        raise ValueError("need 0 < t-min <= t-max")
    if steps == 1:
        return [float(t_min)]
    if log:
        return [float(v) for v in
                np.exp(np.linspace(math.log(t_min), math.log(t_max), steps))]
    return [float(v) for v in np.linspace(t_min, t_max, steps)]


def _parse_label_column(value):
    if value is None:
        return None
    try:
        return int(value)
    except ValueError:
        return value


def _load_input(value, delimiter=",", header=False, label_column=None):
    """Resolve a dataset argument: 'iris', a .json manifest or synthetic
    spec ({"dist": ...}), or a CSV path."""
    if value == "iris":
        return load_iris()
    path = Path(value)
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        if "dist" in obj:
            spec = SyntheticSpec(DistKind(obj["dist"]), obj.get("params", {}),
                                 obj["n"], obj["d"], obj.get("seed", 0))
            return gen_synthetic(spec)
        return load_manifest(path)
    return load_csv(path, delimiter=delimiter, header=header,
                    label_column=label_column)


def _read_label_file(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: no labels")
    tokens = []
    for i, row in enumerate(rows):
        if len(row) != 1:
            raise ValueError(f"{path}: line {i + 1}: expected one column")
        tokens.append(row[0].strip())
    try:
        return np.asarray([int(tok) for tok in tokens], dtype=np.int64)
    except ValueError:
        codes = {}
        for tok in tokens:
            codes.setdefault(tok, len(codes))
        return np.asarray([codes[tok] for tok in tokens], dtype=np.int64)


def _run_cell(algo, x, k, t_values, seed):
    """One benchmark cell; returns (result, chosen_t)."""
    if algo == "km":
        res = clustering.lloyd_kmeans(x, k, clustering.random_rows_init(x, k, seed))
        return res, None
    if algo == "kmpp":
        res = clustering.lloyd_kmeans(x, k, clustering.kmeanspp_init(x, k, seed))
        return res, None
    if algo == "fcm":
        res, _ = clustering.fcm(x, k, seed=seed)
        return res, None
    if algo == "kpkm":
        res, _ = clustering.kpkm(x, k, seed=seed)
        return res, None
    if algo == "rnkm":
        res = clustering.rnkm(x, k, t_values, seed=seed)
        return res, res.t
    raise ValueError(f"unknown algorithm {algo!r}")


@dataclass(frozen=True)
class DatasetJob:
    name: str
    data: DataMatrix
    k: object  # positive int or "elbow"


@dataclass(frozen=True)
class BenchConfig:
    jobs: tuple[DatasetJob, ...]
    algorithms: tuple[str, ...]
    t_values: tuple[float, ...]
    seeds: tuple[int, ...]


def _parse_k(value, where):
    if value == "elbow":
        return "elbow"
    try:
        k = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{where}: k must be an integer or \"elbow\", "
                         f"got {value!r}") from None
    if k < 2:
        raise ValueError(f"{where}: k must be at least 2")
    return k


def _parse_bench_config(path):
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)

    algos = [str(a).lower() for a in cfg.get("algorithms", [])]
    if not algos:
        raise ValueError("config: algorithms must be a non-empty list")
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise ValueError(f"config: unknown algorithms {unknown} "
                         f"(choose from {list(ALGORITHMS)})")

    seeds = cfg.get("seeds", list(range(10)))
    if not seeds:
        raise ValueError("config: seeds must be non-empty")
    seeds = tuple(int(s) for s in seeds)

    grid = cfg.get("t_grid")
    if grid is None:
        t_values = tuple(_t_grid(0.1, 10.0, 20, log=True))
    elif isinstance(grid, list):
        t_values = tuple(float(t) for t in grid)
    elif "values" in grid:
        t_values = tuple(float(t) for t in grid["values"])
    else:
        t_values = tuple(_t_grid(float(grid.get("t_min", 0.1)),
                                 float(grid.get("t_max", 10.0)),
                                 int(grid.get("steps", 20)),
                                 bool(grid.get("log", True))))
    if not t_values or any(not t > 0.0 for t in t_values):
        raise ValueError("config: t grid must be non-empty and positive")

    entries = cfg.get("datasets", [])
    if not entries:
        raise ValueError("config: datasets must be a non-empty list")
    default_k = cfg.get("k")
    jobs = []
    seen = set()
    for entry in entries:
        if isinstance(entry, str):
            entry = {"name": entry}
        name = entry.get("name")
        if not name:
            raise ValueError("config: every dataset needs a name")
        if name in seen:
            raise ValueError(f"config: duplicate dataset name {name!r}")
        seen.add(name)
        if "manifest" in entry:
            mpath = Path(entry["manifest"])
            if not mpath.is_absolute():
                mpath = path.parent / mpath
            dm = load_manifest(mpath)
        elif "synthetic" in entry:
            syn = entry["synthetic"]
            spec = SyntheticSpec(DistKind(syn["dist"]), syn.get("params", {}),
                                 syn["n"], syn["d"], syn.get("seed", 0))
            dm = gen_synthetic(spec)
        elif "bundled" in entry or name == "iris":
            bundled = entry.get("bundled", name)
            if bundled != "iris":
                raise ValueError(f"config: unknown bundled dataset {bundled!r}")
            dm = load_iris()
        else:
            raise ValueError(f"config: dataset {name!r} needs one of "
                             f"manifest/synthetic/bundled")
        k = entry.get("k", default_k)
        if k is None:
            raise ValueError(f"config: dataset {name!r} has no k "
                             f"(set it on the entry or at top level)")
        jobs.append(DatasetJob(name, dm, _parse_k(k, f"dataset {name!r}")))
    return BenchConfig(tuple(jobs), tuple(algos), t_values, seeds)


def cmd_bench(args):
    config = _parse_bench_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    records = []
    errors = []
    wall_ms = {}
    summary_datasets = {}
    values_by_cell = {}
    for job in config.jobs:
        normalized, constant = minmax_normalize(job.data)
        x = normalized.x
        truth = job.data.labels
        k = job.k
        if k == "elbow":
            k = clustering.elbow_select_k(
                x, range(2, max(3, min(10, x.shape[0] - 1) + 1)),
                seed=config.seeds[0])
        summary_datasets[job.name] = {
            "n": int(x.shape[0]), "d": int(x.shape[1]), "k": int(k),
            "constant_features": int(constant.sum()),
            "has_labels": truth is not None,
        }
        for algo in config.algorithms:
            for seed in config.seeds:
                start = time.perf_counter()
                try:
                    result, chosen_t = _run_cell(algo, x, k, config.t_values, seed)
                    report = validation_report(x, result.partition,
                                               result.centroids, truth)
                except Exception as exc:
                    errors.append({"dataset": job.name, "algo": algo,
                                   "seed": seed, "type": type(exc).__name__,
                                   "message": str(exc)})
                    continue
                finally:
                    ms = 1000.0 * (time.perf_counter() - start)
                    wall_ms.setdefault(job.name, {}).setdefault(
                        algo, {})[str(seed)] = ms
                records.append((job.name, algo, seed, k,
                                report.silhouette, report.davies_bouldin,
                                report.distortion, report.calinski_harabasz,
                                report.ari, chosen_t, result.iterations))
                values_by_cell.setdefault((job.name, algo), []).append(report)

    records.sort(key=lambda r: (r[0], r[1], r[2]))
    _write_rows(out_dir / "records.csv", RECORD_COLUMNS, records)

    medians = {}
    for (name, algo), reports in sorted(values_by_cell.items()):
        cell = {
            "SI": statistics.median(r.silhouette for r in reports),
            "Da": statistics.median(r.davies_bouldin for r in reports),
            "Di": statistics.median(r.distortion for r in reports),
            "Ca": statistics.median(r.calinski_harabasz for r in reports),
        }
        aris = [r.ari for r in reports if r.ari is not None]
        cell["ARI"] = statistics.median(aris) if aris else None
        medians.setdefault(name, {})[algo] = {key: _jnum(v)
                                              for key, v in cell.items()}

    deltas = {}
    for name, refs in REFERENCE_SILHOUETTE.items():
        for algo, ref in refs.items():
            got = medians.get(name, {}).get(algo)
            if got is None or not isinstance(got["SI"], float):
                continue
            deltas.setdefault(name, {})[algo] = {
                "reference_SI": ref,
                "median_SI": got["SI"],
                "delta": got["SI"] - ref,
            }

    summary = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "datasets": summary_datasets,
        "algorithms": list(config.algorithms),
        "seeds": list(config.seeds),
        "t_grid": list(config.t_values),
        "medians": medians,
        "reference_deltas": deltas,
        "wall_ms": wall_ms,
        "errors": errors,
    }
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps({"ok": True, "records": len(records),
                      "errors": len(errors), "out": str(out_dir)},
                     sort_keys=True))
    return 0


def _svg_curve(path, ts, values, title, log_x):
    pts = [(t, v) for t, v in zip(ts, values)
           if v is not None and math.isfinite(v)]
    if not pts:
        return False
    width, height, margin = 640, 400, 60
    xs = [math.log10(t) for t, _ in pts] if log_x else [t for t, _ in pts]
    ys = [v for _, v in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def px(x):
        return margin + (width - 2 * margin) * (x - x_lo) / x_span

    def py(y):
        return height - margin - (height - 2 * margin) * (y - y_lo) / y_span

    coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    dots = "".join(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" '
                   f'fill="#1f6fb2"/>' for x, y in zip(xs, ys))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="#444"/>',
        f'<text x="{width / 2:.0f}" y="{margin / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<text x="{margin}" y="{height - margin / 3:.0f}" '
        f'font-family="sans-serif" font-size="11">t = {pts[0][0]:g}</text>',
        f'<text x="{width - margin}" y="{height - margin / 3:.0f}" '
        f'text-anchor="end" font-family="sans-serif" font-size="11">'
        f't = {pts[-1][0]:g}</text>',
        f'<text x="{margin / 3:.0f}" y="{height - margin}" '
        f'font-family="sans-serif" font-size="11">{y_lo:.4g}</text>',
        f'<text x="{margin / 3:.0f}" y="{margin + 10}" '
        f'font-family="sans-serif" font-size="11">{y_hi:.4g}</text>',
        f'<polyline points="{coords}" fill="none" stroke="#1f6fb2" '
        f'stroke-width="1.5"/>',
        dots,
        "</svg>",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
    return True


def cmd_sweep_t(args):
    dm = _load_input(args.input, args.delimiter, args.header,
                     _parse_label_column(args.label_column))
    normalized, _ = minmax_normalize(dm)
    x = normalized.x
    truth = dm.labels
    ts = _t_grid(args.t_min, args.t_max, args.t_steps, args.log)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    errors = []
    for t in ts:
        try:
            init = clustering.spectral_sampling_init(x, args.k, t, args.seed)
            res = clustering.rnkm_single_t(x, args.k, t, init)
            report = validation_report(x, res.partition, res.centroids, truth)
        except Exception as exc:
            errors.append({"t": t, "type": type(exc).__name__,
                           "message": str(exc)})
            continue
        rows.append((t, report.silhouette, report.davies_bouldin,
                     report.distortion, report.calinski_harabasz,
                     report.ari, res.iterations, res.converged))

    _write_rows(out_dir / "sweep.csv", SWEEP_COLUMNS, rows)
    if errors:
        with open(out_dir / "sweep_errors.json", "w", encoding="utf-8") as fh:
            json.dump(errors, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if not rows:
        raise RuntimeError(f"all {len(ts)} t values failed; "
                           f"see {out_dir / 'sweep_errors.json'}")
    figures = []
    if args.svg:
        for idx, name in (1, "SI"), (2, "Da"), (3, "Di"), (4, "Ca"), (5, "ARI"):
            fig = out_dir / f"sweep_{name}.svg"
            if _svg_curve(fig, [r[0] for r in rows], [r[idx] for r in rows],
                          f"{name} vs t", args.log):
                figures.append(str(fig))
    print(json.dumps({"ok": True, "rows": len(rows), "errors": len(errors),
                      "figures": figures, "out": str(out_dir)},
                     sort_keys=True))
    return 0


def cmd_trace(args):
    dm = _load_input(args.input, args.delimiter, args.header,
                     _parse_label_column(args.label_column))
    normalized, _ = minmax_normalize(dm)
    x = normalized.x
    schedule = [float(tok) for tok in args.t.split(",") if tok.strip()]
    frames, converged = clustering.rnkm_trace(x, args.k, schedule, args.seed,
                                              args.max_iters, args.tol)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    names = (normalized.feature_names
             or tuple(f"dim_{j}" for j in range(x.shape[1])))
    centroid_rows = []
    label_rows = []
    for frame in frames:
        for c in range(frame.centroids.shape[0]):
            centroid_rows.append((frame.iteration, frame.t, c,
                                  *[float(v) for v in frame.centroids[c]]))
        for i in range(frame.labels.shape[0]):
            label_rows.append((frame.iteration, i, int(frame.labels[i])))
    _write_rows(out_dir / "trace_centroids.csv",
                ("iteration", "t", "cluster", *names), centroid_rows)
    _write_rows(out_dir / "trace_labels.csv",
                ("iteration", "point", "label"), label_rows)
    print(json.dumps({"ok": True, "frames": len(frames),
                      "converged": converged, "out": str(out_dir)},
                     sort_keys=True))
    return 0


def _parse_params(text):
    params = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ValueError(f"--params entries must look like key=value, "
                             f"got {chunk!r}")
        key, _, raw = chunk.partition("=")
        try:
            value = int(raw)
        except ValueError:
            value = float(raw)
        params[key.strip()] = value
    return params


def cmd_gen(args):
    spec = SyntheticSpec(DistKind(args.dist), _parse_params(args.params),
                         args.n, args.d, args.seed)
    dm = gen_synthetic(spec)
    named = DataMatrix(dm.x, tuple(f"feature_{j}" for j in range(dm.d)))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, named)
    print(json.dumps({"ok": True, "n": dm.n, "d": dm.d, "out": str(out)},
                     sort_keys=True))
    return 0


def cmd_validate(args):
    truth = None
    label_column = _parse_label_column(args.label_column)
    if args.labels is not None:
        if Path(args.labels).is_file():
            truth = _read_label_file(args.labels)
        else:
            label_column = _parse_label_column(args.labels)
    header = args.header or isinstance(label_column, str)
    dm = _load_input(args.input, args.delimiter, header, label_column)
    if truth is None:
        truth = dm.labels

    pred = _read_label_file(args.pred)
    if pred.shape[0] != dm.n:
        raise ValueError(f"predicted labels have {pred.shape[0]} rows, "
                         f"data has {dm.n}")
    if pred.min() < 0:
        raise ValueError("predicted labels must be nonnegative")
    partition = clustering.Partition(pred, int(pred.max()) + 1)
    report = validation_report(dm.x, partition, truth=truth)
    out = {
        "n": dm.n,
        "d": dm.d,
        "k": partition.k,
        "silhouette": _jnum(report.silhouette),
        "davies_bouldin": _jnum(report.davies_bouldin),
        "calinski_harabasz": _jnum(report.calinski_harabasz),
        "distortion": _jnum(report.distortion),
        "ari": _jnum(report.ari),
        "flags": list(report.flags),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _add_input_options(sub):
    sub.add_argument("--input", required=True,
                     help="'iris', a CSV path, or a JSON manifest/synthetic spec")
    sub.add_argument("--delimiter", default=",")
    sub.add_argument("--header", action="store_true",
                     help="the input CSV has a header row")
    sub.add_argument("--label-column", default=None,
                     help="ground-truth column (0-based index or header name)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rnkmeans",
        description="Random normed k-means benchmarks and diagnostics.")
    subs = parser.add_subparsers(dest="verb", required=True)

    bench = subs.add_parser("bench", help="run the benchmark table")
    bench.add_argument("--config", required=True, help="JSON config path")
    bench.add_argument("--out", required=True, help="output directory")
    bench.set_defaults(handler=cmd_bench)

    sweep = subs.add_parser("sweep-t", help="per-t validity-index curves")
    _add_input_options(sweep)
    sweep.add_argument("--k", required=True, type=int)
    sweep.add_argument("--t-min", type=float, default=0.1)
    sweep.add_argument("--t-max", type=float, default=10.0)
    sweep.add_argument("--t-steps", type=int, default=50)
    sweep.add_argument("--log", action="store_true",
                       help="log-spaced t grid")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--svg", action="store_true",
                       help="write one SVG curve per index")
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.set_defaults(handler=cmd_sweep_t)

    trace = subs.add_parser("trace", help="per-iteration centroid frames")
    _add_input_options(trace)
    trace.add_argument("--k", required=True, type=int)
    trace.add_argument("--t", required=True,
                       help="comma-separated t schedule; iteration i uses "
                            "the i-th entry (the last one repeats)")
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--max-iters", type=int, default=300)
    trace.add_argument("--tol", type=float, default=1e-6)
    trace.add_argument("--out", required=True, help="output directory")
    trace.set_defaults(handler=cmd_trace)

    gen = subs.add_parser("gen", help="write a synthetic dataset CSV")
    gen.add_argument("--dist", required=True,
                     choices=[kind.value for kind in DistKind])
    gen.add_argument("--params", default="",
                     help="comma-separated key=value overrides")
    gen.add_argument("--n", required=True, type=int)
    gen.add_argument("--d", required=True, type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.set_defaults(handler=cmd_gen)

    val = subs.add_parser("validate", help="score supplied labels")
    _add_input_options(val)
    val.add_argument("--pred", required=True,
                     help="CSV with one predicted label per row")
    val.add_argument("--labels", default=None,
                     help="ground truth: a label file or a column of --input")
    val.set_defaults(handler=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except Exception as exc:
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}}, sort_keys=True))
        return 1


if __name__ == "__main__":
    sys.exit(main())
