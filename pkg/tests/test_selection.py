import json

import numpy as np
import pytest

from graphgp.exceptions import DataError, DimensionError
from graphgp.graph import Graph
from graphgp.kernels import KernelSpec, rbf_bandwidth_heuristic
from graphgp.model import fit, predict_mean
from graphgp.selection import CvConfig, grid_search_cv, kfold_split, nmse

from conftest import random_adjacency


class TestKfold:
    def test_sizes_and_partition(self):
        splits = kfold_split(7, 5, seed=3)
        assert [len(v) for _, v in splits] == [2, 2, 1, 1, 1]
        vals = np.concatenate([v for _, v in splits])
        assert sorted(vals.tolist()) == list(range(7))
        for tr, v in splits:
            assert set(tr).isdisjoint(v) and len(tr) + len(v) == 7

    def test_deterministic(self):
        a = [v.tolist() for _, v in kfold_split(20, 4, seed=11)]
        b = [v.tolist() for _, v in kfold_split(20, 4, seed=11)]
        c = [v.tolist() for _, v in kfold_split(20, 4, seed=12)]
        assert a == b and a != c

    def test_leave_one_out(self):
        splits = kfold_split(4, 4, seed=0)
        assert all(len(v) == 1 for _, v in splits)

    def test_errors(self):
        with pytest.raises(DataError):
            kfold_split(3, 5, 0)
        with pytest.raises(ValueError):
            kfold_split(10, 1, 0)


class TestNmse:
    def test_zero_prediction(self):
        assert nmse(np.zeros((2, 3)), np.ones((2, 3))) == 0.0

    def test_perfect_fit(self):
        assert nmse(np.ones(4), np.ones(4)) == float("-inf")

    def test_hand_value(self):
        # error energy 1 against reference energy 100 gives -20 dB
        T0 = np.array([[10.0, 0.0]])
        assert nmse(T0 + [[0.0, 1.0]], T0) == pytest.approx(-20.0)

    def test_errors(self):
        with pytest.raises(DataError):
            nmse(np.ones(3), np.zeros(3))
        with pytest.raises(DimensionError):
            nmse(np.ones(3), np.ones(4))


class TestConfig:
    def test_sorted_dedup(self):
        c = CvConfig(alpha_grid=(10, 0, 1, 1), gamma_grid=(2, 0.5))
        assert c.alpha_grid == (0.0, 1.0, 10.0) and c.gamma_grid == (0.5, 2.0)

    @pytest.mark.parametrize("kw", [{"folds": 1}, {"alpha_grid": (-1,)}, {"gamma_grid": (0,)}, {"alpha_grid": ()}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            CvConfig(**kw)


def _problem(rng, M=5, N=12):
    g = Graph(random_adjacency(rng, M))
    X = rng.normal(size=(N, 2))
    T = rng.normal(size=(N, M))
    return g, X, T


class TestGridSearch:
    def test_matches_brute_force(self, rng):
        g, X, T = _problem(rng)
        config = CvConfig(folds=3, alpha_grid=(0, 1, 10), gamma_grid=(0.1, 1, 10), seed=4)
        report = grid_search_cv(X, T, g.spectrum, "laplacian", "rbf", 2.0, config)
        bw = rbf_bandwidth_heuristic(X)
        assert report.bandwidth == bw
        table = report.score_table()
        for (alpha, gamma), score in table.items():
            kernel = KernelSpec("rbf", gamma, bw)
            errs = []
            for tr, v in kfold_split(len(X), 3, 4):
                m = fit(X[tr], T[tr], g.spectrum, "laplacian", kernel, alpha, 2.0)
                errs.append(nmse(predict_mean(m, X[v]), T[v]))
            assert score == pytest.approx(np.mean(errs), rel=1e-9, abs=1e-9)
        best = min(report.scores, key=lambda s: s[2])
        assert (report.best_alpha, report.best_gamma) == best[:2]
        assert report.best_score == best[2]

    def test_tie_goes_to_smallest_alpha(self, rng):
        # without edges every alpha gives the same model
        X, T = rng.normal(size=(10, 2)), rng.normal(size=(10, 3))
        config = CvConfig(folds=2, alpha_grid=(5, 0.1, 1), gamma_grid=(1.0,))
        report = grid_search_cv(X, T, Graph.empty(3).spectrum, "laplacian", "linear", 1.0, config)
        scores = [s for _, _, s in report.scores]
        assert scores[0] == pytest.approx(scores[1], rel=1e-12) == pytest.approx(scores[2], rel=1e-12)
        assert report.best_alpha == 0.1

    def test_alpha_zero_only(self, rng):
        g, X, T = _problem(rng)
        report = grid_search_cv(X, T, g.spectrum, "laplacian", "linear", 1.0, CvConfig(folds=4, alpha_grid=(0,)))
        assert report.best_alpha == 0.0
        assert {a for a, _, _ in report.scores} == {0.0}

    def test_deterministic(self, rng):
        g, X, T = _problem(rng)
        config = CvConfig(folds=3, alpha_grid=(0, 1), gamma_grid=(0.1, 1), seed=9)
        a = grid_search_cv(X, T, g.spectrum, "laplacian", "rbf", 1.0, config)
        b = grid_search_cv(X, T, g.spectrum, "laplacian", "rbf", 1.0, config)
        assert a.to_json() == b.to_json()

    def test_smooth_data_prefers_graph(self, rng):
        g = Graph(random_adjacency(rng, 8, p=0.6))
        X = rng.normal(size=(30, 2))
        # strongly smooth targets: only the constant graph mode carries signal
        T = (X @ [1.0, -0.5])[:, None] * np.ones(8) + 0.3 * rng.normal(size=(30, 8))
        config = CvConfig(folds=5, alpha_grid=(0, 10, 1000), gamma_grid=(1.0,))
        report = grid_search_cv(X, T, g.spectrum, "laplacian", "linear", 1 / 0.09, config)
        assert report.best_alpha > 0

    def test_too_many_folds(self, rng):
        g, X, T = _problem(rng, N=3)
        with pytest.raises(DataError):
            grid_search_cv(X, T, g.spectrum, "laplacian", "linear", 1.0, CvConfig(folds=5))

    def test_json(self, rng):
        g, X, T = _problem(rng)
        report = grid_search_cv(X, T, g.spectrum, "laplacian", "linear", 1.0, CvConfig(folds=3, alpha_grid=(0, 1), gamma_grid=(1,)))
        d = json.loads(report.to_json())
        assert set(d) == {"best_alpha", "best_gamma", "folds", "seed", "bandwidth", "scores", "fold_assignments"}
        assert len(d["scores"]) == 2 and d["bandwidth"] is None
        assert sorted(i for f in d["fold_assignments"] for i in f) == list(range(12))
