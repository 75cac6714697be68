"""K-fold cross-validation over (alpha, gamma) and the NMSE metric."""

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, DimensionError
from .graph import make_penalty, make_smoothing_operator
from .kernels import KernelSpec, kernel_matrix, rbf_bandwidth_heuristic
from .model import _assemble, _validate, kernel_eigh, predict_mean

DEFAULT_ALPHA_GRID = (0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0)
DEFAULT_GAMMA_GRID = tuple(float(g) for g in np.logspace(-3, 3, 7))


@dataclass(frozen=True)
class CvConfig:
    folds: int = 5
    alpha_grid: tuple = DEFAULT_ALPHA_GRID
    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha_grid", tuple(sorted({float(a) for a in self.alpha_grid})))
        object.__setattr__(self, "gamma_grid", tuple(sorted({float(g) for g in self.gamma_grid})))
        if self.folds < 2:
            raise ValueError(f"need at least 2 folds, got {self.folds}")
        if not self.alpha_grid or not self.gamma_grid:
            raise ValueError("alpha and gamma grids must be non-empty")
        if self.alpha_grid[0] < 0:
            raise ValueError("alpha grid values must be nonnegative")
        if self.gamma_grid[0] <= 0:
            raise ValueError("gamma grid values must be positive")


@dataclass(frozen=True)
class CvReport:
    best_alpha: float
    best_gamma: float
    scores: tuple  # ((alpha, gamma, mean validation NMSE in dB), ...) in grid order
    fold_assignments: tuple  # validation indices per fold
    folds: int
    seed: int
    bandwidth: float = None

    @property
    def best_score(self):
        return min(s for _, _, s in self.scores)

    def score_table(self):
        return {(a, g): s for a, g, s in self.scores}

    def to_dict(self):
        return {
            "best_alpha": self.best_alpha,
            "best_gamma": self.best_gamma,
            "folds": self.folds,
            "seed": self.seed,
            "bandwidth": self.bandwidth,
            "scores": [
                {"alpha": a, "gamma": g, "nmse_db": _json_float(s)} for a, g, s in self.scores
            ],
            "fold_assignments": [list(map(int, v)) for v in self.fold_assignments],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _json_float(x):
    # JSON has no infinities; a perfect fit is written as null
    return float(x) if np.isfinite(x) else None


def kfold_split(n, folds, seed):
    """Shuffled partition of ``range(n)`` into ``folds`` validation sets.

    Returns a list of ``(train_indices, validation_indices)`` pairs. Fold sizes
    differ by at most one, larger folds first.
    """
    n, folds = int(n), int(folds)
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    if folds > n:
        raise DataError(f"cannot split {n} samples into {folds} folds")
    perm = np.random.default_rng(seed).permutation(n)
    out = []
    for val in np.array_split(perm, folds):
        val = np.sort(val)
        out.append((np.setdiff1d(perm, val), val))
    return out


def nmse(Y, T0):
    """Normalised squared error ``10 log10(||Y - T0||_F^2 / ||T0||_F^2)`` in dB.

    Returns ``-inf`` for an exact fit.
    """
    Y = np.asarray(Y, dtype=float)
    T0 = np.asarray(T0, dtype=float)
    if Y.shape != T0.shape:
        raise DimensionError(f"prediction shape {Y.shape} != reference shape {T0.shape}")
    ref = float(np.sum(T0**2))
    if ref == 0:
        raise DataError("NMSE undefined for an all-zero reference")
    err = float(np.sum((Y - T0) ** 2))
    if err == 0:
        return float("-inf")
    return 10.0 * np.log10(err / ref)


def grid_search_cv(X, T, spectrum, penalty, kernel_family, beta, config=None, bandwidth=None):
    """Choose ``(alpha, gamma)`` by K-fold cross-validation.

    Each grid point is scored by the mean validation NMSE against the
    (noisy) held-out targets. Ties go to the smallest alpha, then the
    smallest gamma. For the RBF family the bandwidth defaults to the
    heuristic evaluated on all of ``X``.
    """
    config = config or CvConfig()
    if not hasattr(penalty, "penalty_matrix"):
        penalty = make_penalty(spectrum, penalty)
    X, T, beta = _validate(X, T, beta, penalty.basis.shape[0])
    N = X.shape[0]
    if config.folds > N:
        raise DataError(f"{config.folds} folds requested but only {N} samples")

    if kernel_family == "rbf" and bandwidth is None:
        bandwidth = rbf_bandwidth_heuristic(X)
    unit = KernelSpec(kernel_family, 1.0, bandwidth)
    splits = kfold_split(N, config.folds, config.seed)
    operators = {a: make_smoothing_operator(penalty, a) for a in config.alpha_grid}

    totals = np.zeros((len(config.alpha_grid), len(config.gamma_grid)))
    for train, val in splits:
        Xtr, Ttr = X[train], T[train]
        theta_unit, U = kernel_eigh(kernel_matrix(unit, Xtr))
        for ig, gamma in enumerate(config.gamma_grid):
            kernel = unit.with_gamma(gamma)
            theta = theta_unit / gamma
            for ia, alpha in enumerate(config.alpha_grid):
                model = _assemble(Xtr, Ttr, operators[alpha], kernel, beta, U, theta)
                totals[ia, ig] += nmse(predict_mean(model, X[val]), T[val])
    means = totals / len(splits)

    scores = []
    best = None
    for ia, alpha in enumerate(config.alpha_grid):
        for ig, gamma in enumerate(config.gamma_grid):
            s = float(means[ia, ig])
            scores.append((alpha, gamma, s))
            if best is None or s < best[2]:
                best = (alpha, gamma, s)
    return CvReport(
        best_alpha=best[0],
        best_gamma=best[1],
        scores=tuple(scores),
        fold_assignments=tuple(tuple(int(i) for i in val) for _, val in splits),
        folds=config.folds,
        seed=config.seed,
        bandwidth=bandwidth,
    )
