"""
Input kernels.

Two families are supported, both scaled by an amplitude ``1/gamma``:

* ``linear``: ``k(x, z) = x^T z / gamma``
* ``rbf``:    ``k(x, z) = exp(-||x - z||^2 / bandwidth) / gamma``
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import DataError, DimensionError

FAMILIES = ("linear", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family with precision ``gamma`` (amplitude ``1/gamma``) and RBF bandwidth."""

    family: str
    gamma: float = 1.0
    bandwidth: float = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"kernel family must be one of {FAMILIES}, got {self.family!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.family == "rbf" and not (self.bandwidth is not None and self.bandwidth > 0):
            raise ValueError(f"rbf kernel needs a positive bandwidth, got {self.bandwidth}")

    @property
    def amplitude(self):
        return 1.0 / self.gamma

    def with_gamma(self, gamma):
        return replace(self, gamma=float(gamma))

    def to_dict(self):
        return {"family": self.family, "gamma": self.gamma, "bandwidth": self.bandwidth}

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], d["gamma"], d.get("bandwidth"))


def _as_inputs(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionError(f"inputs must be a 2-D array, got shape {X.shape}")
    return X


def _unit_kernel(spec, X, Z):
    if X.shape[1] != Z.shape[1]:
        raise DimensionError(f"input dimension mismatch: {X.shape[1]} vs {Z.shape[1]}")
    if spec.family == "linear":
        return X @ Z.T
    return np.exp(-cdist(X, Z, "sqeuclidean") / spec.bandwidth)


def kernel_eval(spec, x, z):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if x.shape != z.shape or x.ndim != 1:
        raise DimensionError(f"input shapes differ: {x.shape} vs {z.shape}")
    return float(_unit_kernel(spec, x[None], z[None])[0, 0]) * spec.amplitude


def kernel_matrix(spec, X):
    """Gram matrix ``K[m, n] = k(x_m, x_n)``; rows of ``X`` are inputs."""
    X = _as_inputs(X)
    if X.shape[0] == 0:
        raise DataError("kernel matrix needs at least one input")
    K = spec.amplitude * _unit_kernel(spec, X, X)
    # fill both triangles from one evaluation
    iu = np.triu_indices_from(K, 1)
    K[(iu[1], iu[0])] = K[iu]
    return K


def cross_kernel(spec, X, x_new):
    """Vector ``[k(x_new, x_1), ..., k(x_new, x_N)]``."""
    X = _as_inputs(X)
    x_new = np.atleast_1d(np.asarray(x_new, dtype=float))
    if x_new.ndim != 1:
        raise DimensionError(f"query must be a single input vector, got shape {x_new.shape}")
    return spec.amplitude * _unit_kernel(spec, X, x_new[None])[:, 0]


def cross_kernel_matrix(spec, X, Xq):
    """``(Q, N)`` matrix of kernel values between query rows ``Xq`` and training rows ``X``."""
    return spec.amplitude * _unit_kernel(spec, _as_inputs(Xq), _as_inputs(X))


def rbf_bandwidth_heuristic(X):
    """Sum of squared distances over all ordered input pairs.

    Raises
    ------
    DataError
        If all inputs coincide (zero bandwidth).
    """
    X = _as_inputs(X)
    if np.all(X == X[0]):
        raise DataError("bandwidth heuristic is zero: all inputs identical")
    # sum_{m,n} ||x_m - x_n||^2 = 2 N sum ||x_m - mean||^2
    centred = X - X.mean(axis=0)
    return 2.0 * X.shape[0] * float(np.sum(centred**2))
