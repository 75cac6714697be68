"""
Datasets, distance-based graphs, noise injection and synthetic smooth signals.

All randomness goes through ``numpy.random.Generator`` with the PCG64 bit
generator, seeded explicitly, so results reproduce across platforms.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import _csv
from .exceptions import DataError, GraphError
from .graph import Graph, gft, make_penalty, make_smoothing_operator, smoothness

RNG_NAME = "numpy.random.PCG64"
EARTH_RADIUS_KM = 6371.0


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Inputs ``X`` (N x d), targets ``T`` (N x M) and optional clean targets."""

    inputs: np.ndarray
    targets: np.ndarray
    clean_targets: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.inputs, dtype=float)
        T = np.asarray(self.targets, dtype=float)
        X = X[:, None] if X.ndim == 1 else X
        T = T[:, None] if T.ndim == 1 else T
        if X.shape[0] != T.shape[0]:
            raise DataError(f"inputs have {X.shape[0]} rows but targets have {T.shape[0]}")
        arrays = [X, T]
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", T)
        if self.clean_targets is not None:
            T0 = np.asarray(self.clean_targets, dtype=float)
            T0 = T0[:, None] if T0.ndim == 1 else T0
            if T0.shape != T.shape:
                raise DataError(f"clean targets shape {T0.shape} != targets shape {T.shape}")
            object.__setattr__(self, "clean_targets", T0)
            arrays.append(T0)
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise DataError("dataset contains non-finite values")

    @property
    def num_samples(self):
        return self.inputs.shape[0]

    @property
    def num_nodes(self):
        return self.targets.shape[1]

    @property
    def input_dim(self):
        return self.inputs.shape[1]

    @property
    def reference_targets(self):
        """Clean targets if known, otherwise the observed ones."""
        return self.targets if self.clean_targets is None else self.clean_targets


def load_dataset(inputs_path, targets_path, clean_targets_path=None):
    """Load headerless CSVs; row ``n`` of each file belongs to sample ``n``."""
    X = _csv.read_matrix(inputs_path, name="inputs")
    T = _csv.read_matrix(targets_path, name="targets")
    if X.shape[0] != T.shape[0]:
        raise DataError(f"row count mismatch: inputs have {X.shape[0]} rows, targets have {T.shape[0]}")
    T0 = None
    if clean_targets_path is not None:
        T0 = _csv.read_matrix(clean_targets_path, name="clean targets")
    return Dataset(X, T, T0)


def save_dataset(dataset, inputs_path, targets_path, clean_targets_path=None):
    _csv.write_matrix(inputs_path, dataset.inputs)
    _csv.write_matrix(targets_path, dataset.targets)
    if clean_targets_path is not None and dataset.clean_targets is not None:
        _csv.write_matrix(clean_targets_path, dataset.clean_targets)


def great_circle_distance(p, q, radius=EARTH_RADIUS_KM):
    """Haversine distance between ``(lat, lon)`` points given in degrees."""
    lat1, lon1, lat2, lon2 = np.radians([p[0], p[1], q[0], q[1]])
    h = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * radius * np.arcsin(np.sqrt(min(h, 1.0)))


def geodesic_graph(coords, distance=None):
    """Gaussian-weighted graph ``A[i, j] = exp(-d_ij^2 / sum_{i,j} d_ij^2)``.

    ``distance`` is a callable on two coordinate rows; Euclidean by default.
    The normaliser sums over all ordered pairs and the diagonal is zeroed.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 1:
        coords = coords[:, None]
    M = coords.shape[0]
    if M < 2:
        raise GraphError("geodesic graph needs at least two points")
    if distance is None:
        d2 = cdist(coords, coords, "sqeuclidean")
    else:
        d2 = cdist(coords, coords, lambda a, b: distance(a, b)) ** 2
    total = float(np.sum(d2))
    if total == 0:
        raise GraphError("all points coincide; geodesic weights undefined")
    A = np.exp(-d2 / total)
    np.fill_diagonal(A, 0.0)
    return Graph(A)


def random_geodesic_graph(num_nodes, seed, dim=2):
    """Geodesic graph on points drawn uniformly from the unit square (cube)."""
    coords = make_rng(seed).uniform(size=(num_nodes, dim))
    return geodesic_graph(coords)


def add_noise_snr(T0, snr_db, seed):
    """Add white Gaussian noise at a given SNR.

    The noise variance is the mean per-entry signal power divided by
    ``10**(snr_db / 10)``.

    Returns
    -------
    T : ndarray
        Noisy targets.
    beta : float
        Noise precision (inverse variance).
    """
    T0 = np.asarray(T0, dtype=float)
    power = float(np.mean(T0**2)) if T0.size else 0.0
    if power == 0:
        raise DataError("cannot calibrate noise against a zero-energy signal")
    var = power / 10.0 ** (float(snr_db) / 10.0)
    noise = make_rng(seed).standard_normal(T0.shape) * np.sqrt(var)
    return T0 + noise, 1.0 / var


def empirical_snr_db(T0, T):
    T0 = np.asarray(T0, dtype=float)
    return 10.0 * np.log10(np.sum(T0**2) / np.sum((np.asarray(T) - T0) ** 2))


def _mean_smoothness(L, Y):
    return float(np.mean([smoothness(L, y) for y in Y]))


def synth_smooth_dataset(
    graph,
    penalty,
    alpha_gen,
    n,
    input_dim,
    seed,
    mode="linear",
    input_noise=0.1,
    lag_corr=0.9,
):
    """Synthetic regression data whose targets follow a graph spectral profile.

    Latent white Gaussian vectors ``y_n`` are smoothed, ``t_n = B y_n`` with
    ``B = (I + alpha_gen G)^{-1}``.

    mode="linear"
        ``x_n = c_n + R g_n`` where ``c_n`` are the first ``input_dim`` graph
        Fourier coefficients of ``t_n``, ``g_n`` is white noise and ``R`` a
        fixed random matrix scaled by ``input_noise``.
    mode="lagged"
        ``x_n = t_{n-1}``. Latents follow a stationary AR(1) with coefficient
        ``lag_corr`` so that consecutive targets are related.
    """
    alpha_gen = float(alpha_gen)
    if alpha_gen < 0:
        raise ValueError("alpha_gen must be nonnegative")
    if n < 1:
        raise ValueError("n must be at least 1")
    if mode not in ("linear", "lagged"):
        raise ValueError(f"unknown mode {mode!r}")
    if penalty is None or isinstance(penalty, str):
        penalty = make_penalty(graph.spectrum, penalty or "laplacian")
    M = graph.num_nodes
    rng = make_rng(seed)
    op = make_smoothing_operator(penalty, alpha_gen)

    if mode == "linear":
        if not 1 <= input_dim <= M:
            raise ValueError(f"input_dim must lie in [1, {M}], got {input_dim}")
        Y = rng.standard_normal((n, M))
        T0 = Y @ op.b_matrix
        R = rng.standard_normal((input_dim, input_dim)) * (input_noise / np.sqrt(input_dim))
        coeffs = gft(graph.spectrum, T0.T).T[:, :input_dim]
        X = coeffs + rng.standard_normal((n, input_dim)) @ R.T
    else:
        E = rng.standard_normal((n + 1, M))
        Y = np.empty_like(E)
        Y[0] = E[0]
        scale = np.sqrt(1.0 - lag_corr**2)
        for i in range(1, n + 1):
            Y[i] = lag_corr * Y[i - 1] + scale * E[i]
        T_all = Y @ op.b_matrix
        X, T0, Y = T_all[:-1], T_all[1:], Y[1:]

    latent_s = _mean_smoothness(graph.laplacian, Y)
    target_s = _mean_smoothness(graph.laplacian, T0)
    meta = {
        "generator": "synth_smooth_dataset",
        "mode": mode,
        "alpha_gen": alpha_gen,
        "seed": seed if not isinstance(seed, np.random.Generator) else None,
        "rng": RNG_NAME,
        "latent_smoothness": latent_s,
        "target_smoothness": target_s,
        "smooth": bool(target_s < latent_s),
    }
    return Dataset(X, T0.copy(), T0, meta)
