"""
Gaussian process regression with graph-structured vector targets.

Training targets form an ``N x M`` matrix ``T`` (row ``n`` is the target
vector observed at input ``x_n``; column ``m`` is the series at node ``m``).
Stacking the columns, ``t = vec(T)``, the model prior is

    t ~ N(0, C),   C = B^2 kron K + I / beta,

with ``K`` the ``N x N`` input kernel matrix and ``B`` the graph smoothing
operator. Because ``B^2 = V diag(s**2) V^T`` and ``K = U diag(theta) U^T``,
``C`` is diagonalised by ``V kron U`` with eigenvalues
``s[i]**2 theta[j] + 1/beta``. Prediction therefore costs one ``N x N`` and
one ``M x M`` eigendecomposition instead of an ``MN x MN`` solve.

``predict_naive`` evaluates the same formulas with dense matrices and is kept
as an independent check of ``predict``.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .exceptions import DataError, DecompositionError, DimensionError, OracleCapError
from .graph import Graph, make_penalty, make_smoothing_operator
from .kernels import (
    _as_inputs,
    cross_kernel,
    cross_kernel_matrix,
    kernel_eval,
    kernel_matrix,
)

ORACLE_CAP = 2000


@dataclass(frozen=True, eq=False)
class PredictiveDistribution:
    """Gaussian predictive distribution of one target vector."""

    mean: np.ndarray
    covariance: np.ndarray

    @property
    def variance(self):
        return np.diag(self.covariance).copy()


@dataclass(frozen=True, eq=False)
class GpgModel:
    """Fitted model state. ``eta`` and ``rho`` are indexed ``[graph freq, kernel eig]``."""

    inputs: np.ndarray
    targets: np.ndarray
    smoothing: object
    kernel: object
    beta: float
    kernel_basis: np.ndarray
    kernel_eigenvalues: np.ndarray
    eta: np.ndarray
    rho: np.ndarray
    penalty: object = None

    @property
    def num_inputs(self):
        return self.targets.shape[0]

    @property
    def num_nodes(self):
        return self.targets.shape[1]

    @property
    def alpha(self):
        return self.smoothing.alpha

    @property
    def vec_targets(self):
        # column stacking: node-major, sample-minor, matching B^2 kron K
        return self.targets.ravel(order="F")


def _validate(X, T, beta, num_nodes):
    X = _as_inputs(X)
    T = np.asarray(T, dtype=float)
    if T.ndim == 1:
        T = T[:, None]
    if T.ndim != 2:
        raise DimensionError(f"targets must be 2-D, got shape {T.shape}")
    if X.shape[0] < 1:
        raise DataError("need at least one training input")
    if X.shape[0] != T.shape[0]:
        raise DimensionError(f"{X.shape[0]} inputs but {T.shape[0]} target rows")
    if T.shape[1] != num_nodes:
        raise DimensionError(f"targets have {T.shape[1]} columns, graph has {num_nodes} nodes")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(T))):
        raise DataError("inputs and targets must be finite")
    beta = float(beta)
    if not (beta > 0 and np.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    return X, T, beta


def kernel_eigh(K):
    """Eigenpairs of a kernel matrix with round-off negatives clipped to zero."""
    try:
        theta, U = np.linalg.eigh(0.5 * (K + K.T))
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"kernel eigendecomposition failed: {exc}") from exc
    return np.clip(theta, 0.0, None), U


def _assemble(X, T, smoothing, kernel, beta, U, theta, penalty=None):
    s2 = smoothing.gains**2
    eta = 1.0 / (np.outer(s2, theta) + 1.0 / beta)
    rho = smoothing.basis.T @ T.T @ U
    return GpgModel(
        inputs=X,
        targets=T,
        smoothing=smoothing,
        kernel=kernel,
        beta=beta,
        kernel_basis=U,
        kernel_eigenvalues=theta,
        eta=eta,
        rho=rho,
        penalty=penalty,
    )


def fit(X, T, spectrum, penalty, kernel, alpha, beta):
    """Fit the graph GP.

    Parameters
    ----------
    X : (N, d) array
        Training inputs, one per row.
    T : (N, M) array
        Training targets; column ``m`` belongs to graph node ``m``.
    spectrum : GraphSpectrum
    penalty : SpectralPenalty or profile
        Built on ``spectrum``; a profile (e.g. ``"laplacian"``) is converted.
    kernel : KernelSpec
    alpha : float
        Graph regularisation weight, ``alpha >= 0``.
    beta : float
        Noise precision.
    """
    if not hasattr(penalty, "penalty_matrix"):
        penalty = make_penalty(spectrum, penalty)
    smoothing = make_smoothing_operator(penalty, alpha)
    return fit_operator(X, T, smoothing, kernel, beta, penalty=penalty)


def fit_operator(X, T, smoothing, kernel, beta, penalty=None):
    """Fit with an explicit smoothing operator (e.g. a directed-graph one)."""
    X, T, beta = _validate(X, T, beta, smoothing.num_nodes)
    theta, U = kernel_eigh(kernel_matrix(kernel, X))
    return _assemble(X, T, smoothing, kernel, beta, U, theta, penalty)


def fit_graph(X, T, graph, kernel, alpha, beta, profile="laplacian"):
    """Convenience wrapper taking a :class:`Graph`."""
    return fit(X, T, graph.spectrum, make_penalty(graph.spectrum, profile), kernel, alpha, beta)


def _spectral_parts(model, k, kappa):
    w = model.kernel_basis.T @ k
    s2 = model.smoothing.gains**2
    coef = s2 * ((model.eta * model.rho) @ w)
    latent_var = kappa * s2 - s2**2 * (model.eta @ w**2)
    return coef, latent_var


def _query(model, x_new):
    x_new = np.atleast_1d(np.asarray(x_new, dtype=float))
    if x_new.shape != (model.inputs.shape[1],):
        raise DimensionError(
            f"query has shape {x_new.shape}, training inputs have dimension {model.inputs.shape[1]}"
        )
    return x_new


def predict(model, x_new):
    """Predictive distribution of the target vector at ``x_new``.

    The mean's coefficient on graph frequency ``k`` is

        sum_j rho[k, j] (u_j^T k_x) beta / (beta theta_j + (1 + alpha J_k^2)^2)

    and the covariance is diagonal in the graph Fourier basis apart from the
    isotropic noise term.
    """
    x_new = _query(model, x_new)
    k = cross_kernel(model.kernel, model.inputs, x_new)
    kappa = kernel_eval(model.kernel, x_new, x_new)
    coef, latent_var = _spectral_parts(model, k, kappa)
    V = model.smoothing.basis
    mean = V @ coef
    cov = (V * latent_var) @ V.T + np.eye(model.num_nodes) / model.beta
    return PredictiveDistribution(mean=mean, covariance=0.5 * (cov + cov.T))


def mean_spectrum(model, x_new):
    """Graph Fourier coefficients of the predictive mean (in the model's basis)."""
    x_new = _query(model, x_new)
    k = cross_kernel(model.kernel, model.inputs, x_new)
    return _spectral_parts(model, k, 0.0)[0]


def shrinkage_factor(beta_theta, alpha_j2):
    """Per-frequency attenuation ``beta theta / (beta theta + (1 + alpha J^2)^2)``.

    Dividing by ``theta`` gives the weight of kernel eigenpair ``j`` in the mean
    coefficient of graph frequency ``k``; with ``alpha J^2 = 0`` it reduces to
    the conventional factor ``beta theta / (beta theta + 1)``.
    """
    beta_theta = np.asarray(beta_theta, dtype=float)
    return beta_theta / (beta_theta + (1.0 + np.asarray(alpha_j2, dtype=float)) ** 2)


def predict_mean(model, Xq):
    """Predictive means for each row of ``Xq``, shape ``(Q, M)``."""
    Xq = _as_inputs(Xq)
    if Xq.shape[1] != model.inputs.shape[1]:
        raise DimensionError(
            f"queries have dimension {Xq.shape[1]}, training inputs {model.inputs.shape[1]}"
        )
    W = cross_kernel_matrix(model.kernel, model.inputs, Xq) @ model.kernel_basis
    coef = (W @ (model.eta * model.rho).T) * model.smoothing.gains**2
    return coef @ model.smoothing.basis.T


def predict_batch(model, Xq):
    """Independent predictive distributions for each row of ``Xq``."""
    return [predict(model, x) for x in _as_inputs(Xq)]


# -- dense oracle ------------------------------------------------------------


def dense_covariance(model):
    """The full ``MN x MN`` prior covariance of the stacked training targets."""
    K = kernel_matrix(model.kernel, model.inputs)
    MN = model.num_nodes * model.num_inputs
    return np.kron(model.smoothing.b_squared, K) + np.eye(MN) / model.beta


def _cho_factor(C):
    try:
        return linalg.cho_factor(C, lower=True)
    except linalg.LinAlgError:
        pass
    jitter = 1e-10 * float(np.mean(np.diag(C)))
    try:
        return linalg.cho_factor(C + jitter * np.eye(C.shape[0]), lower=True)
    except linalg.LinAlgError as exc:
        raise DecompositionError(f"Cholesky failed after jitter {jitter:.3g}") from exc


def predict_naive(model, x_new, cap=ORACLE_CAP):
    """Predictive distribution from explicit dense matrices.

    Builds ``C = B^2 kron K + I/beta``, ``D = B^2 kron k`` and
    ``F = k(x, x) B^2 + I/beta`` and returns ``D^T C^{-1} t`` and
    ``F - D^T C^{-1} D``.
    """
    MN = model.num_nodes * model.num_inputs
    if MN > cap:
        raise OracleCapError(f"dense oracle limited to MN <= {cap}, got {MN}")
    x_new = _query(model, x_new)
    B2 = model.smoothing.b_squared
    C = dense_covariance(model)
    k = cross_kernel(model.kernel, model.inputs, x_new)
    D = np.kron(B2, k[:, None])
    F = kernel_eval(model.kernel, x_new, x_new) * B2 + np.eye(model.num_nodes) / model.beta
    factor = _cho_factor(C)
    mean = D.T @ linalg.cho_solve(factor, model.vec_targets)
    cov = F - D.T @ linalg.cho_solve(factor, D)
    return PredictiveDistribution(mean=mean, covariance=0.5 * (cov + cov.T))


# -- conventional GP ---------------------------------------------------------


def predict_conventional(X, T, kernel, beta, x_new):
    """Independent scalar GPs per target coordinate, sharing one kernel matrix."""
    T = np.asarray(T, dtype=float)
    if T.ndim == 1:
        T = T[:, None]
    X, T, beta = _validate(X, T, beta, T.shape[1])
    x_new = np.atleast_1d(np.asarray(x_new, dtype=float))
    if x_new.shape != (X.shape[1],):
        raise DimensionError(f"query has shape {x_new.shape}, inputs have dimension {X.shape[1]}")
    C = kernel_matrix(kernel, X) + np.eye(X.shape[0]) / beta
    factor = _cho_factor(C)
    k = cross_kernel(kernel, X, x_new)
    a = linalg.cho_solve(factor, k)
    mean = T.T @ a
    var = kernel_eval(kernel, x_new, x_new) + 1.0 / beta - float(k @ a)
    return PredictiveDistribution(mean=mean, covariance=var * np.eye(T.shape[1]))


# -- trace diagnostics -------------------------------------------------------


def marginal_trace(model):
    """``tr(C)`` for the stacked training targets, from the eigenvalues."""
    s2 = model.smoothing.gains**2
    return float(np.sum(np.outer(s2, model.kernel_eigenvalues)) + model.eta.size / model.beta)


def conventional_marginal_trace(model):
    """``tr(I kron K + I/beta)``: the same data without graph coupling."""
    M, N = model.num_nodes, model.num_inputs
    return float(M * np.sum(model.kernel_eigenvalues) + M * N / model.beta)


def predictive_trace_pair(X, T, graph, penalty, kernel, alpha, beta, x_new):
    """Return ``(tr Sigma_conventional, tr Sigma_graph)`` at ``x_new``."""
    if not isinstance(graph, Graph):
        graph = Graph(graph)
    model = fit(X, T, graph.spectrum, penalty, kernel, alpha, beta)
    conv = predict_conventional(X, T, kernel, beta, x_new)
    return float(np.trace(conv.covariance)), float(np.trace(predict(model, x_new).covariance))
