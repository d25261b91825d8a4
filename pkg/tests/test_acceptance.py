"""Acceptance gate: one test per release criterion.

Each test prints a single ``[acceptance] <name>: PASS/FAIL`` line on the
real stdout (so the verdicts survive pytest's capture) and then asserts.
Every criterion carries a wall-clock budget; blowing the budget fails the
criterion even when the numbers are right.

The oracles here are deliberately naive re-implementations: loops instead
of vectorization, exhaustive enumeration instead of iteration, so that a
shared bug between package and test is as unlikely as we can make it.
"""

import json
import math
import statistics
import sys
import time

import numpy as np

from rnkmeans import cli, clustering, pmspace, spectral
from rnkmeans.data import (
    DistKind,
    SyntheticSpec,
    gen_synthetic,
    load_iris,
    minmax_normalize,
)
from rnkmeans.rng import Xoshiro256
from rnkmeans.validation import (
    adjusted_rand_index,
    calinski_harabasz,
    davies_bouldin,
    distortion,
    rand_index,
    silhouette,
)


def _report(name, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    verdict = "PASS" if ok else "FAIL"
    print(f"[acceptance] {name}: {verdict} ({detail}; "
          f"{elapsed:.1f}s of {budget:.0f}s budget)", file=sys.__stdout__)
    return ok


def _points(rng, n, d, scale=1.0):
    return np.array([[scale * rng.normal() for _ in range(d)]
                     for _ in range(n)])


def test_01_objective_monotonicity():
    budget, start = 30.0, time.perf_counter()
    worst = 0.0
    for run in range(100):
        rng = Xoshiro256(1000 + run)
        n = 30 + rng.index(171)          # n in [30, 200]
        d = 1 + rng.index(5)             # d in [1, 5]
        k = 2 + rng.index(4)             # k in [2, 5]
        t = (0.1, 1.0, 10.0)[run % 3]
        x = _points(rng, n, d, scale=3.0)
        res = clustering.rnkm_single_t(
            x, k, t, clustering.kmeanspp_init(x, k, 1000 + run))
        trace = res.objective_trace
        if trace.shape[0] > 1:
            worst = max(worst, float(np.max(trace[:-1] - trace[1:])))
    ok = worst <= 1e-9
    elapsed = time.perf_counter() - start
    assert _report("objective monotonicity", ok,
                   f"100 runs, worst backward step {worst:.2e}",
                   elapsed, budget)


def test_02_random_norm_axioms():
    budget, start = 5.0, time.perf_counter()
    rng = Xoshiro256(77)
    pts = _points(rng, 1000, 3, scale=2.0)
    pts[0] = 0.0                          # exercise the nullity branch
    grid = np.exp(np.linspace(math.log(0.05), math.log(50.0), 20))

    good = pmspace.check_random_norm_axioms(pts, grid, 1e-12, max_pairs=1000)
    broken = pmspace.check_random_norm_axioms(
        pts, grid, 1e-12,
        family=pmspace.DistanceDistributionFamily(
            "sq", lambda r, t: t / (t + r ** 2)),
        max_pairs=1000)

    ok = (good.passed and good.n_pairs == 1000
          and not broken.passed and not broken.scaling.passed
          and broken.scaling.worst_violation > 1e-12
          and {"p_index", "alpha", "t", "lhs", "rhs"}
          <= set(broken.scaling.witness))
    elapsed = time.perf_counter() - start
    assert _report("random-norm axioms", ok,
                   f"1000 pairs x 20x20 grid at 1e-12; broken family "
                   f"violation {broken.scaling.worst_violation:.2e}",
                   elapsed, budget)


def test_03_assignment_equivalence():
    budget, start = 5.0, time.perf_counter()
    mismatches = 0
    for i in range(500):
        rng = Xoshiro256(3000 + i)
        n = 2 + rng.index(29)
        k = 1 + rng.index(6)
        d = 1 + rng.index(4)
        t = (0.01, 1.0, 100.0)[i % 3]
        x = np.array([[rng.uniform() for _ in range(d)] for _ in range(n)])
        c = np.array([[rng.uniform() for _ in range(d)] for _ in range(k)])
        if i % 10 == 0 and k >= 2:
            c[1] = c[0]                   # force a tie on a real centroid
        labels = clustering.rnkm_assign(x, c, t)
        dist = np.sqrt(((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=-1))
        if not np.array_equal(labels, np.argmin(dist, axis=1)):
            mismatches += 1
    ok = mismatches == 0
    elapsed = time.perf_counter() - start
    assert _report("assignment equivalence", ok,
                   f"{500 - mismatches}/500 instances exact",
                   elapsed, budget)


def _two_cluster_gamma_opt(x, t=1.0, iters=200):
    """Exhaustive 2-partition optimum of the Gamma-sum objective.

    Every bipartition is enumerated (point n-1 pinned to side 0); each
    cluster's centroid is optimized by a batched multistart ascent (cluster
    mean plus every member nudged toward it) with the member points
    themselves as closed-form candidates.  Returns (value, centroids).
    """
    n, d = x.shape
    masks = np.arange(1, 2 ** (n - 1))
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    w = np.concatenate([1.0 - bits, bits], axis=0)        # (C, n)
    means = (w @ x) / w.sum(axis=1)[:, None]
    jit = x[None, :, :] + 1e-4 * (means[:, None, :] - x[None, :, :])
    starts = np.concatenate([means[:, None, :], jit], axis=1)   # (C, S, d)
    n_cands, n_starts, _ = starts.shape

    def fval(c):
        r = np.sqrt(np.sum((c[:, :, None, :] - x[None, None, :, :]) ** 2,
                           axis=-1))
        return np.sum(w[:, None, :] * (t / (t + r)), axis=-1)

    c = starts.copy()
    f = fval(c)
    step = np.full((n_cands, n_starts), 0.1)
    for _ in range(iters):
        r = np.sqrt(np.sum((c[:, :, None, :] - x[None, None, :, :]) ** 2,
                           axis=-1))
        r = np.maximum(r, 1e-12)
        coef = w[:, None, :] * (-t / (t + r) ** 2) / r
        grad = np.sum(coef[:, :, :, None]
                      * (c[:, :, None, :] - x[None, None, :, :]), axis=2)
        cand = c + step[:, :, None] * grad
        fc = fval(cand)
        better = fc > f
        c = np.where(better[:, :, None], cand, c)
        f = np.where(better, fc, f)
        step = np.where(better, step * 1.3, step * 0.5)

    rows = np.arange(n_cands)
    best_start = np.argmax(f, axis=1)
    best_f = f[rows, best_start]
    best_c = c[rows, best_start]
    # a cluster's optimum can sit exactly on a member point
    rp = np.sqrt(np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=-1))
    fp = w @ (t / (t + rp)).T
    best_point = np.argmax(fp, axis=1)
    point_f = fp[rows, best_point]
    use_point = point_f > best_f
    best_f = np.where(use_point, point_f, best_f)
    best_c = np.where(use_point[:, None], x[best_point], best_c)

    half = len(masks)
    totals = best_f[:half] + best_f[half:]
    p_star = int(np.argmax(totals))
    return float(totals[p_star]), np.stack([best_c[p_star],
                                            best_c[half + p_star]])


def _two_cluster_wcss_opt(x):
    n, d = x.shape
    masks = np.arange(1, 2 ** (n - 1))
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    w = np.concatenate([1.0 - bits, bits], axis=0)
    means = (w @ x) / w.sum(axis=1)[:, None]
    sq = np.sum((x[None, :, :] - means[:, None, :]) ** 2, axis=-1)
    per = np.sum(w * sq, axis=1)
    half = len(masks)
    totals = per[:half] + per[half:]
    p_star = int(np.argmin(totals))
    return float(totals[p_star]), np.stack([means[p_star],
                                            means[half + p_star]])


def test_04_small_instance_optimality():
    budget, start = 20.0, time.perf_counter()
    worst_gamma_gap = worst_wcss_gap = 0.0
    worst_gamma_eq = worst_wcss_eq = 0.0
    for seed in range(50):
        rng = Xoshiro256(seed)
        n = 4 + rng.index(5)
        d = 1 + rng.index(3)
        x = np.array([[rng.uniform() for _ in range(d)] for _ in range(n)])

        opt_gamma, opt_c = _two_cluster_gamma_opt(x)
        res = clustering.rnkm_single_t(
            x, 2, 1.0, clustering.kmeanspp_init(x, 2, seed))
        worst_gamma_gap = max(worst_gamma_gap,
                              float(res.objective_trace[-1]) - opt_gamma)
        from_opt = clustering.rnkm_single_t(x, 2, 1.0, opt_c)
        worst_gamma_eq = max(worst_gamma_eq,
                             abs(float(from_opt.objective_trace[-1])
                                 - opt_gamma))

        opt_wcss, opt_means = _two_cluster_wcss_opt(x)
        lloyd = clustering.lloyd_kmeans(
            x, 2, clustering.kmeanspp_init(x, 2, seed))
        worst_wcss_gap = max(worst_wcss_gap,
                             opt_wcss - float(lloyd.objective_trace[-1]))
        lloyd_opt = clustering.lloyd_kmeans(x, 2, opt_means)
        worst_wcss_eq = max(worst_wcss_eq,
                            abs(float(lloyd_opt.objective_trace[-1])
                                - opt_wcss))
    ok = (worst_gamma_gap <= 1e-9 and worst_gamma_eq <= 1e-9
          and worst_wcss_gap <= 1e-9 and worst_wcss_eq <= 1e-9)
    elapsed = time.perf_counter() - start
    assert _report(
        "small-instance optimality", ok,
        f"50 instances; gamma gap {worst_gamma_gap:.2e} "
        f"eq {worst_gamma_eq:.2e}, wcss gap {worst_wcss_gap:.2e} "
        f"eq {worst_wcss_eq:.2e}", elapsed, budget)


def _naive_indices(x, labels, k, centroids):
    n = x.shape[0]

    def dist(p, q):
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))

    sil = []
    for i in range(n):
        mine = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not mine:
            sil.append(0.0)
            continue
        a = sum(dist(x[i], x[j]) for j in mine) / len(mine)
        b = math.inf
        for c in range(k):
            if c == labels[i]:
                continue
            members = [j for j in range(n) if labels[j] == c]
            b = min(b, sum(dist(x[i], x[j]) for j in members) / len(members))
        denom = max(a, b)
        sil.append(0.0 if denom == 0.0 else (b - a) / denom)
    sil = sum(sil) / n

    means = [x[labels == j].mean(axis=0) for j in range(k)]
    lam = [np.mean([dist(p, means[j]) for p in x[labels == j]])
           for j in range(k)]
    worst = []
    for i in range(k):
        ratios = [math.inf if dist(means[i], means[j]) == 0.0
                  else (lam[i] + lam[j]) / dist(means[i], means[j])
                  for j in range(k) if j != i]
        worst.append(max(ratios))
    db = sum(worst) / k

    grand = x.mean(axis=0)
    ssw = ssb = 0.0
    for j in range(k):
        members = x[labels == j]
        m = members.mean(axis=0)
        ssw += sum(dist(p, m) ** 2 for p in members)
        ssb += len(members) * dist(m, grand) ** 2
    ch = math.inf if ssw == 0.0 else (ssb / (k - 1)) / (ssw / (n - k))

    dstn = sum(dist(x[i], centroids[labels[i]]) ** 2 for i in range(n))
    return sil, db, ch, dstn


def _pair_counts(la, lb):
    a = b = c = d = 0
    for i in range(len(la)):
        for j in range(i + 1, len(la)):
            same_a, same_b = la[i] == la[j], lb[i] == lb[j]
            if same_a and same_b:
                a += 1
            elif same_a:
                b += 1
            elif same_b:
                c += 1
            else:
                d += 1
    return a, b, c, d


def test_05_validation_index_oracles():
    budget, start = 10.0, time.perf_counter()
    worst = 0.0
    for seed in range(200):
        rs = np.random.RandomState(90_000 + seed)
        k = rs.randint(2, 5)
        n = rs.randint(k + 2, 31)
        x = rs.randn(n, rs.randint(1, 4))
        labels = np.concatenate([np.arange(k), rs.randint(0, k, size=n - k)])
        rs.shuffle(labels)
        labels = labels.astype(np.int64)
        part = clustering.Partition(labels, k)
        cents = np.stack([x[labels == j].mean(axis=0) for j in range(k)])
        other = np.concatenate([np.arange(k), rs.randint(0, k, size=n - k)])
        rs.shuffle(other)

        sil, db, ch, dstn = _naive_indices(x, labels, k, cents)
        worst = max(worst, abs(silhouette(x, part) - sil))
        got_db = davies_bouldin(x, part)
        if math.isinf(db):
            worst = max(worst, 0.0 if math.isinf(got_db) else math.inf)
        else:
            worst = max(worst, abs(got_db - db))
        got_ch = calinski_harabasz(x, part)
        if math.isinf(ch):
            worst = max(worst, 0.0 if math.isinf(got_ch) else math.inf)
        else:
            worst = max(worst, abs(got_ch - ch))
        worst = max(worst, abs(distortion(x, part, cents) - dstn))

        a, b, c, d = _pair_counts(labels, other)
        worst = max(worst, abs(rand_index(labels, other)
                               - (a + d) / (a + b + c + d)))
        den = (a + b) * (b + d) + (a + c) * (c + d)
        ari = 1.0 if den == 0 else 2.0 * (a * d - b * c) / den
        worst = max(worst, abs(adjusted_rand_index(labels, other) - ari))

    hand = (adjusted_rand_index([0, 1, 2], [0, 1, 2]) == 1.0
            and adjusted_rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == -0.5
            and rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == 1.0 / 3.0)
    ok = worst <= 1e-9 and hand
    elapsed = time.perf_counter() - start
    assert _report("validation-index oracles", ok,
                   f"200 instances, worst deviation {worst:.2e}; "
                   f"hand cases {'exact' if hand else 'WRONG'}",
                   elapsed, budget)


def test_06_spectral_correctness():
    budget, start = 20.0, time.perf_counter()
    worst_res = worst_orth = worst_range = worst_small = 0.0
    for i in range(50):
        rng = Xoshiro256(6000 + i)
        n = 5 + rng.index(56)
        d = 1 + rng.index(4)
        x = _points(rng, n, d)
        lap = spectral.normalized_laplacian(
            spectral.pairwise_similarity(x, 1.0).w)
        pairs = spectral.sym_eigendecomp(lap)
        vecs, vals = pairs.vectors, pairs.values
        worst_res = max(worst_res,
                        float(np.max(np.abs(lap @ vecs
                                            - vecs * vals[None, :]))))
        worst_orth = max(worst_orth,
                         float(np.max(np.abs(vecs.T @ vecs - np.eye(n)))))
        worst_range = max(worst_range,
                          float(max(-vals.min(), vals.max() - 2.0)))
        worst_small = max(worst_small, float(abs(vals.min())))
    ok = (worst_res < 1e-8 and worst_orth < 1e-8
          and worst_range < 1e-8 and worst_small < 1e-8)
    elapsed = time.perf_counter() - start
    assert _report("spectral correctness", ok,
                   f"50 matrices; residual {worst_res:.2e}, "
                   f"orthonormality {worst_orth:.2e}, "
                   f"range exceedance {worst_range:.2e}, "
                   f"smallest {worst_small:.2e}", elapsed, budget)


def test_07_iris_soft_reproduction():
    budget, start = 60.0, time.perf_counter()
    normalized, _ = minmax_normalize(load_iris())
    x = normalized.x
    t_grid = np.exp(np.linspace(math.log(0.1), math.log(10.0), 12))
    km_scores, rnkm_scores = [], []
    for seed in range(10):
        km = clustering.lloyd_kmeans(x, 3, clustering.kmeanspp_init(x, 3, seed))
        km_scores.append(silhouette(x, km.partition))
        best = clustering.rnkm(x, 3, t_grid, seed=seed)
        rnkm_scores.append(silhouette(x, best.partition))
    km_median = statistics.median(km_scores)
    rnkm_median = statistics.median(rnkm_scores)
    reference = cli.REFERENCE_SILHOUETTE["iris"]
    ok = (abs(km_median - reference["km"]) <= 0.05
          and rnkm_median >= km_median - 0.02)
    elapsed = time.perf_counter() - start
    assert _report(
        "iris soft reproduction", ok,
        f"km median {km_median:.4f} (reference {reference['km']} +- 0.05), "
        f"rnkm median {rnkm_median:.4f}; delta vs reference "
        f"{reference['rnkm']}: {rnkm_median - reference['rnkm']:+.4f} "
        f"(reported, not asserted)", elapsed, budget)


def test_08_generator_moments():
    budget, start = 10.0, time.perf_counter()
    e = math.e
    m_int, m_disc = 101, 10
    ln_var = (e - 1.0) * e
    # (kind, mean, variance, fourth central moment), all at default params
    table = [
        (DistKind.UNIFORM_REAL, 50.0, 100.0 ** 2 / 12, 100.0 ** 4 / 80),
        (DistKind.UNIFORM_INT, 50.0, (m_int ** 2 - 1) / 12,
         (m_int ** 2 - 1) * (3 * m_int ** 2 - 7) / 240),
        (DistKind.NORMAL, 0.0, 1.0, 3.0),
        (DistKind.EXPONENTIAL, 2.0, 4.0, 9.0 / 0.5 ** 4),
        (DistKind.UNIFORM_DISCRETE, 4.5, (m_disc ** 2 - 1) / 12,
         (m_disc ** 2 - 1) * (3 * m_disc ** 2 - 7) / 240),
        (DistKind.BINOMIAL, 5.0, 2.5,
         3 * 2.5 ** 2 + 2.5 * (1 - 6 * 0.25)),
        (DistKind.GAMMA, 2.0, 4.0, 3 * 1 * (1 + 2) * 2.0 ** 4),
        (DistKind.LOGNORMAL, math.exp(0.5), ln_var,
         ln_var ** 2 * (e ** 4 + 2 * e ** 3 + 3 * e ** 2 - 3)),
        (DistKind.POISSON, 2.0, 2.0, 2.0 * (1 + 3 * 2.0)),
        (DistKind.BERNOULLI, 0.3, 0.21, 0.21 * (1 - 3 * 0.21)),
    ]
    n_draws = 100_000
    worst_zm = worst_zv = 0.0
    regen_ok = True
    for kind, mean, var, mu4 in table:
        spec = SyntheticSpec(kind, {}, n_draws, 1, 2026)
        draws = gen_synthetic(spec).x.ravel()
        se_mean = math.sqrt(var / n_draws)
        se_var = math.sqrt(mu4 / n_draws
                           - var ** 2 * (n_draws - 3)
                           / (n_draws * (n_draws - 1)))
        worst_zm = max(worst_zm, abs(draws.mean() - mean) / se_mean)
        worst_zv = max(worst_zv, abs(draws.var(ddof=1) - var) / se_var)
        regen_ok = regen_ok and np.array_equal(draws,
                                               gen_synthetic(spec).x.ravel())
    ok = worst_zm <= 5.0 and worst_zv <= 5.0 and regen_ok
    elapsed = time.perf_counter() - start
    assert _report(
        "generator moments", ok,
        f"10 distributions at 1e5 draws; max |z| mean {worst_zm:.2f}, "
        f"variance {worst_zv:.2f}; regeneration "
        f"{'bit-identical' if regen_ok else 'DIVERGED'}", elapsed, budget)


def test_09_end_to_end_determinism(tmp_path, capsys):
    budget, start = 60.0, time.perf_counter()
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({
        "datasets": [{"name": "syn",
                      "synthetic": {"dist": "normal", "n": 60, "d": 2,
                                    "seed": 0}}],
        "algorithms": ["km", "rnkm"],
        "seeds": [0, 1],
        "k": 2,
        "t_grid": {"values": [0.5, 2.0]},
    }))
    bodies = []
    rc_ok = True
    for tag in ("first", "second"):
        out = tmp_path / tag
        rc_ok = rc_ok and cli.main(["bench", "--config", str(cfg),
                                    "--out", str(out)]) == 0
        bodies.append((out / "records.csv").read_bytes())
    capsys.readouterr()
    ok = rc_ok and bodies[0] == bodies[1] and len(bodies[0]) > 0
    elapsed = time.perf_counter() - start
    assert _report("end-to-end determinism", ok,
                   f"two bench runs, records.csv {len(bodies[0])} bytes "
                   f"{'identical' if bodies[0] == bodies[1] else 'DIFFER'}",
                   elapsed, budget)
