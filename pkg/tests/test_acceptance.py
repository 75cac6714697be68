"""
Acceptance suite: ten end-to-end criteria at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line (visible even without ``-s``) and
then asserts, so a failing criterion is reported both ways. Run only this
file with ``pytest tests/test_acceptance.py -v``.
"""

import time

import numpy as np
import pytest

from graphgp.bench import BenchmarkSpec, run_benchmark
from graphgp.cli import main
from graphgp.data import add_noise_snr, empirical_snr_db, random_geodesic_graph, synth_smooth_dataset
from graphgp.graph import (
    BandProfile,
    Graph,
    check_vec_kronecker_identity,
    generative_project,
    gft,
    igft,
    make_penalty,
    make_smoothing_operator,
    smoothness,
)
from graphgp.model import (
    conventional_marginal_trace,
    fit,
    marginal_trace,
    predict,
    predict_conventional,
    predict_naive,
)

from conftest import random_adjacency, random_disconnected_adjacency, random_instance, rel_err, union_find_components


def report(capsys, number, name, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {name}: {detail}")
    assert ok, detail


def _trace_sweep(seed):
    """100 connected graphs with random sizes; yields fitted pieces for criteria 2 and 3."""
    rng = np.random.default_rng(seed)
    for _ in range(100):
        M = int(rng.integers(2, 13))
        N = int(rng.integers(1, 11))
        family = "linear" if rng.random() < 0.5 else "rbf"
        alpha = float(10 ** rng.uniform(-2, 2))
        yield random_instance(rng, M, N, family, alpha)


def test_criterion_1_oracle_equivalence(capsys):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst_mean = worst_cov = 0.0
    for i in range(200):
        M = int(rng.integers(2, 11))
        N = int(rng.integers(1, 16))
        family = ("linear", "rbf")[i % 2]
        alpha = (0.0, 0.1, 1.0, 10.0)[(i // 2) % 4]
        connected = (i // 8) % 2 == 0
        g, X, T, kernel, alpha, beta, x = random_instance(rng, M, N, family, alpha, connected=connected)
        model = fit(X, T, g.spectrum, "laplacian", kernel, alpha, beta)
        a, b = predict(model, x), predict_naive(model, x)
        worst_mean = max(worst_mean, rel_err(a.mean, b.mean))
        worst_cov = max(worst_cov, rel_err(a.covariance, b.covariance))
    elapsed = time.perf_counter() - start
    ok = worst_mean <= 1e-8 and worst_cov <= 1e-8 and elapsed < 60
    report(capsys, 1, "oracle equivalence", ok,
           f"max rel err mean {worst_mean:.2e}, cov {worst_cov:.2e} over 200 instances in {elapsed:.2f}s")


def test_criterion_2_marginal_trace(capsys):
    start = time.perf_counter()
    min_gap = np.inf
    worst_null = 0.0
    for g, X, T, kernel, alpha, beta, _ in _trace_sweep(2):
        model = fit(X, T, g.spectrum, "laplacian", kernel, alpha, beta)
        tc, tg = conventional_marginal_trace(model), marginal_trace(model)
        min_gap = min(min_gap, (tc - tg) / tc)
        for null in (
            fit(X, T, g.spectrum, "laplacian", kernel, 0.0, beta),
            fit(X, T, Graph.empty(g.num_nodes).spectrum, "laplacian", kernel, alpha, beta),
        ):
            tc0, tg0 = conventional_marginal_trace(null), marginal_trace(null)
            worst_null = max(worst_null, abs(tc0 - tg0) / tc0)
    elapsed = time.perf_counter() - start
    ok = min_gap > 0 and worst_null <= 1e-10 and elapsed < 30
    report(capsys, 2, "marginal trace reduction", ok,
           f"min relative gap {min_gap:.3e} (>0), max null-case diff {worst_null:.1e}, {elapsed:.2f}s")


def test_criterion_3_predictive_covariance(capsys):
    start = time.perf_counter()
    min_gap = np.inf
    worst_psd = -np.inf
    for g, X, T, kernel, alpha, beta, x in _trace_sweep(2):
        gpg = predict(fit(X, T, g.spectrum, "laplacian", kernel, alpha, beta), x).covariance
        conv = predict_conventional(X, T, kernel, beta, x).covariance
        delta = conv - gpg
        min_gap = min(min_gap, (np.trace(conv) - np.trace(gpg)) / np.trace(conv))
        norm = np.linalg.norm(delta, 2)
        # min eigenvalue as a multiple of the tolerance 1e-8 ||delta||; must stay >= -1
        worst_psd = max(worst_psd, -np.linalg.eigvalsh((delta + delta.T) / 2).min() / (1e-8 * norm))
    elapsed = time.perf_counter() - start
    ok = min_gap > 0 and worst_psd <= 1
    report(capsys, 3, "predictive covariance reduction", ok,
           f"min relative trace gap {min_gap:.3e}, worst negative eigenvalue {worst_psd:.2e} x tolerance, "
           f"{elapsed:.2f}s")


def test_criterion_4_collapse(capsys):
    rng = np.random.default_rng(4)
    worst = 0.0
    for i in range(50):
        M, N = int(rng.integers(2, 9)), int(rng.integers(1, 12))
        g, X, T, kernel, _, beta, x = random_instance(rng, M, N, ("linear", "rbf")[i % 2], 0.0)
        alpha = float(10 ** rng.uniform(-2, 2))
        dists = [
            predict(fit(X, T, g.spectrum, "laplacian", kernel, 0.0, beta), x),
            predict(fit(X, T, Graph.empty(M).spectrum, "laplacian", kernel, alpha, beta), x),
            predict_conventional(X, T, kernel, beta, x),
        ]
        for a in range(3):
            for b in range(a + 1, 3):
                worst = max(worst, rel_err(dists[a].mean, dists[b].mean),
                            rel_err(dists[a].covariance, dists[b].covariance))
    report(capsys, 4, "collapse identities", worst <= 1e-10, f"max pairwise rel err {worst:.2e} over 50 instances")


def _objective(y, t, alpha, G):
    return float((t - y) @ (t - y) + alpha * t @ G @ t)


def test_criterion_5_generative_optimality(capsys):
    rng = np.random.default_rng(5)
    worst_grad = 0.0
    beaten = 0
    for i in range(50):
        M = int(rng.integers(2, 13))
        g = Graph(random_adjacency(rng, M))
        profile = "laplacian" if i % 2 == 0 else BandProfile(tuple(range(min(2, M))), 3.0)
        pen = make_penalty(g.spectrum, profile)
        alpha = float(10 ** rng.uniform(-2, 2))
        op = make_smoothing_operator(pen, alpha)
        y = rng.normal(size=M)
        t = generative_project(op, y)
        G = pen.penalty_matrix
        grad = 2 * (t - y) + 2 * alpha * G @ t
        worst_grad = max(worst_grad, np.linalg.norm(grad) / np.linalg.norm(y))
        f0 = _objective(y, t, alpha, G)
        scale = 1e-2 * np.linalg.norm(y) / np.sqrt(M)
        beaten += sum(f0 < _objective(y, t + scale * rng.normal(size=M), alpha, G) for _ in range(100))
    ok = worst_grad <= 1e-8 and beaten == 5000
    report(capsys, 5, "generative projection optimality", ok,
           f"max relative gradient {worst_grad:.2e}, beat {beaten}/5000 perturbations")


def test_criterion_6_spectral_identities(capsys):
    rng = np.random.default_rng(6)
    worst_rt = worst_sm = 0.0
    mismatches = 0
    for i in range(50):
        M = int(rng.integers(2, 16))
        A = random_adjacency(rng, M) if i % 2 == 0 else random_disconnected_adjacency(rng, M)
        g = Graph(A)
        x = rng.normal(size=M)
        worst_rt = max(worst_rt, rel_err(igft(g.spectrum, gft(g.spectrum, x)), x))
        lam = g.spectrum.eigenvalues
        for k in range(M):
            worst_sm = max(worst_sm, abs(smoothness(g.laplacian, g.spectrum.basis[:, k]) - lam[k]))
        mismatches += g.spectrum.num_zero != union_find_components(A)
    ok = worst_rt <= 1e-10 and worst_sm <= 1e-8 and mismatches == 0
    report(capsys, 6, "spectral identities", ok,
           f"round trip {worst_rt:.1e}, smoothness {worst_sm:.1e}, component mismatches {mismatches}/50")


def test_criterion_7_kronecker(capsys):
    rng = np.random.default_rng(7)
    passed = 0
    for _ in range(50):
        N, K, M = (int(v) for v in rng.integers(1, 9, size=3))
        Phi, W = rng.normal(size=(N, K)), rng.normal(size=(K, M))
        S = rng.normal(size=(M, M))
        passed += check_vec_kronecker_identity(Phi, W, S + S.T)
    report(capsys, 7, "vec-Kronecker identity", passed == 50, f"{passed}/50 triples")


# regression values from this suite's own seeded run (mean NMSE in dB)
PINNED = {
    ("gp-l", 5): -6.449, ("gpg-l", 5): -17.251, ("gp-k", 5): -1.992, ("gpg-k", 5): -13.942,
    ("gp-l", 10): -9.180, ("gpg-l", 10): -20.472, ("gp-k", 10): -6.227, ("gpg-k", 10): -18.700,
    ("gp-l", 20): -12.359, ("gpg-l", 20): -21.969, ("gp-k", 20): -9.364, ("gpg-k", 20): -20.648,
}


def test_criterion_8_synthetic_benchmark(capsys):
    start = time.perf_counter()
    g = random_geodesic_graph(40, seed=1)
    ds = synth_smooth_dataset(g, "laplacian", 10.0, 80, 3, seed=2)
    res = run_benchmark(ds, g, BenchmarkSpec(train_sizes=(5, 10, 20), snr_db=0.0, trials=50, seed=3))
    elapsed = time.perf_counter() - start
    mean = {(r["method"], r["n_train"]): r["nmse_db_mean"] for r in res.records}
    wins = all(mean[(f"gpg-{k}", n)] < mean[(f"gp-{k}", n)] for k in "lk" for n in (5, 10, 20))
    gap = {(k, n): mean[(f"gp-{k}", n)] - mean[(f"gpg-{k}", n)] for k in "lk" for n in (5, 20)}
    shrinks = gap[("l", 5)] > gap[("l", 20)] and gap[("k", 5)] > gap[("k", 20)]
    drift = max(abs(mean[key] - v) for key, v in PINNED.items())
    ok = wins and shrinks and drift <= 0.01 and elapsed < 600
    table = ", ".join(f"{k.upper()} N={n} gap {gap[(k, n)]:.2f} dB" for k, n in sorted(gap))
    report(capsys, 8, "synthetic benchmark", ok,
           f"GPG wins everywhere: {wins}; {table}; max drift from pinned {drift:.3f} dB; {elapsed:.1f}s")


def test_criterion_9_noise_calibration(capsys):
    rng = np.random.default_rng(9)
    worst = 0.0
    cases = 0
    for shape in ((1000, 1), (50, 20), (20, 50), (100, 40)):
        for snr in (-10.0, 0.0, 10.0, 30.0):
            for seed in range(5):
                T0 = rng.normal(size=shape) * rng.uniform(0.1, 10)
                T, _ = add_noise_snr(T0, snr, seed)
                worst = max(worst, abs(empirical_snr_db(T0, T) - snr))
                cases += 1
    report(capsys, 9, "noise calibration", worst <= 0.5, f"max |empirical - requested| {worst:.3f} dB over {cases} cases")


def test_criterion_10_determinism(capsys, tmp_path):
    argv = ["bench", "--synth", "--synth-nodes", "12", "--synth-samples", "40", "--trials", "3",
            "--train-sizes", "5,10", "--seed", "7"]
    codes = [main(argv + ["--out", str(tmp_path / f"r{i}.json"), "--csv", str(tmp_path / f"r{i}.csv")])
             for i in range(2)]
    same = all((tmp_path / f"r0.{e}").read_bytes() == (tmp_path / f"r1.{e}").read_bytes() for e in ("json", "csv"))
    ok = codes == [0, 0] and same
    report(capsys, 10, "bench determinism", ok, f"exit codes {codes}, byte-identical outputs: {same}")
