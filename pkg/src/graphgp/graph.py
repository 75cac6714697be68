"""
Graph structure, Laplacian spectrum and spectral smoothing operators.

An undirected graph on ``M`` nodes is described by a symmetric, nonnegative
adjacency matrix ``A`` with zero diagonal. Its combinatorial Laplacian
``L = D - A`` has the eigendecomposition ``L = V diag(lam) V^T``; the columns
of ``V`` form the graph Fourier basis, ordered from smooth to rough.

A spectral penalty assigns a weight ``J(i) >= 0`` to each graph frequency and
induces the quadratic form ``G = V diag(J**2) V^T``. The smoothing operator
``B = (I + alpha G)^{-1}`` maps a signal ``y`` to the minimiser of

    ||y - z||^2 + alpha z^T G z,

and is always formed from the eigenpairs, ``B = V diag(1 / (1 + alpha J**2)) V^T``.

Example
-------
>>> import numpy as np
>>> from graphgp.graph import Graph, make_penalty, make_smoothing_operator
>>> g = Graph(np.array([[0., 1.], [1., 0.]]))
>>> op = make_smoothing_operator(make_penalty(g.spectrum, "laplacian"), 1.0)
>>> np.round(op.b_matrix, 6)
array([[0.666667, 0.333333],
       [0.333333, 0.666667]])
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import _csv
from .exceptions import DecompositionError, DimensionError, DataError, GraphError

# relative threshold below which a Laplacian eigenvalue counts as zero
ZERO_EIG_RTOL = 1e-8
# relative asymmetry tolerated (and removed) at graph construction
SYMMETRY_RTOL = 1e-6


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GraphSpectrum:
    """Orthonormal graph Fourier basis and ascending eigenvalues."""

    basis: np.ndarray
    eigenvalues: np.ndarray

    @property
    def num_nodes(self):
        return self.eigenvalues.shape[0]

    @property
    def zero_threshold(self):
        return ZERO_EIG_RTOL * max(float(self.eigenvalues[-1]), 0.0)

    @property
    def num_zero(self):
        """Number of eigenvalues treated as zero."""
        return int(np.sum(self.eigenvalues <= self.zero_threshold))


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph.

    The adjacency is symmetrised on construction; inputs whose asymmetry
    exceeds ``SYMMETRY_RTOL`` (relative to the largest weight) are rejected,
    as are negative weights, self loops and non-finite entries.
    """

    adjacency: np.ndarray

    def __post_init__(self):
        A = np.array(self.adjacency, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise GraphError(f"adjacency must be a non-empty square matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise GraphError("adjacency has non-finite entries")
        if np.any(A < 0):
            raise GraphError("adjacency has negative edge weights")
        if np.any(np.diag(A) != 0):
            raise GraphError("adjacency has self loops (nonzero diagonal)")
        scale = np.max(A) if A.size else 0.0
        asym = np.max(np.abs(A - A.T))
        if asym > SYMMETRY_RTOL * scale:
            raise GraphError(
                f"adjacency is not symmetric (max asymmetry {asym:.3g}); "
                "use directed_smoothing_operator for directed graphs"
            )
        object.__setattr__(self, "adjacency", _frozen(0.5 * (A + A.T)))

    @property
    def num_nodes(self):
        return self.adjacency.shape[0]

    @cached_property
    def laplacian(self):
        return _frozen(build_laplacian(self))

    @cached_property
    def spectrum(self):
        return eigendecompose(self.laplacian)

    @cached_property
    def num_components(self):
        n, _ = connected_components(self.adjacency != 0, directed=False)
        return int(n)

    @classmethod
    def empty(cls, num_nodes):
        """Completely disconnected graph (``L = 0``)."""
        return cls(np.zeros((num_nodes, num_nodes)))


def build_laplacian(graph):
    """Combinatorial Laplacian ``L = D - A``."""
    A = graph.adjacency
    return np.diag(A.sum(axis=1)) - A


def eigendecompose(L):
    """Eigendecomposition of a symmetric positive semidefinite matrix.

    Eigenvalues are returned in ascending order. Negative round-off
    eigenvalues within the zero threshold are clamped to 0, and each
    eigenvector is signed so that its largest-magnitude entry is positive.

    Raises
    ------
    DecompositionError
        If the eigensolver fails or the matrix is clearly indefinite.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise DecompositionError("matrix has non-finite entries")
    L = 0.5 * (L + L.T)
    try:
        lam, V = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition failed: {exc}") from exc

    eps = ZERO_EIG_RTOL * max(lam[-1], 0.0)
    if lam[0] < -eps:
        raise DecompositionError(
            f"matrix is not positive semidefinite (min eigenvalue {lam[0]:.3g})"
        )
    lam = np.where(lam < 0, 0.0, lam)

    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    V = V * signs
    return GraphSpectrum(basis=_frozen(V), eigenvalues=_frozen(lam))


def _check_len(spectrum, x, what):
    x = np.asarray(x, dtype=float)
    if x.shape[:1] != (spectrum.num_nodes,):
        raise DimensionError(
            f"{what} has leading dimension {x.shape[:1]}, graph has {spectrum.num_nodes} nodes"
        )
    return x


def gft(spectrum, x):
    """Graph Fourier transform ``V^T x``. Columns of a 2-D ``x`` are transformed independently."""
    return spectrum.basis.T @ _check_len(spectrum, x, "signal")


def igft(spectrum, xhat):
    """Inverse graph Fourier transform ``V xhat``."""
    return spectrum.basis @ _check_len(spectrum, xhat, "coefficients")


def smoothness(L, y):
    """Rayleigh quotient ``y^T L y / y^T y``; small for smooth signals."""
    L = np.asarray(L, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (L.shape[0],):
        raise DimensionError(f"signal shape {y.shape} does not match {L.shape}")
    yy = float(y @ y)
    if yy == 0:
        raise DataError("smoothness is undefined for the zero signal")
    return float(y @ L @ y) / yy


# -- spectral penalty profiles ---------------------------------------------


@dataclass(frozen=True)
class LaplacianProfile:
    """``J(i) = sqrt(lam_i)``, which gives ``G = L``."""

    def to_dict(self):
        return {"kind": "laplacian"}


@dataclass(frozen=True)
class CustomProfile:
    """Explicit per-frequency penalty weights."""

    diag: tuple

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(float(v) for v in self.diag))

    def to_dict(self):
        return {"kind": "custom", "diag": list(self.diag)}


@dataclass(frozen=True)
class BandProfile:
    """Pass the frequencies in ``keep`` (0-based) and penalise the rest by ``weight``."""

    keep: tuple
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "keep", tuple(sorted(int(i) for i in self.keep)))
        object.__setattr__(self, "weight", float(self.weight))

    def to_dict(self):
        return {"kind": "band", "keep": list(self.keep), "weight": self.weight}


def profile_from_dict(d):
    kind = d.get("kind")
    if kind == "laplacian":
        return LaplacianProfile()
    if kind == "custom":
        return CustomProfile(d["diag"])
    if kind == "band":
        return BandProfile(d["keep"], d["weight"])
    raise ValueError(f"unknown penalty profile kind {kind!r}")


def parse_profile(text):
    """Parse ``laplacian``, ``band:I,J,...:W`` or ``custom:v1,v2,...``."""
    kind, _, rest = text.partition(":")
    if kind == "laplacian" and not rest:
        return LaplacianProfile()
    if kind == "band":
        idx, sep, weight = rest.rpartition(":")
        if not sep:
            raise ValueError(f"band profile needs 'band:indices:weight', got {text!r}")
        keep = [int(i) for i in idx.split(",") if i.strip()]
        return BandProfile(keep, float(weight))
    if kind == "custom":
        return CustomProfile([float(v) for v in rest.split(",")])
    raise ValueError(f"cannot parse penalty profile {text!r}")


@dataclass(frozen=True, eq=False)
class SpectralPenalty:
    """Per-frequency weights ``J`` and the matrix ``G = V diag(J**2) V^T``."""

    profile_diag: np.ndarray
    penalty_matrix: np.ndarray
    basis: np.ndarray
    profile: object = field(default=None, compare=False)


def _profile_diag(spectrum, profile):
    M = spectrum.num_nodes
    if isinstance(profile, str):
        profile = parse_profile(profile)
    if isinstance(profile, LaplacianProfile):
        return np.sqrt(spectrum.eigenvalues), profile
    if isinstance(profile, CustomProfile):
        J = np.asarray(profile.diag, dtype=float)
        if J.shape != (M,):
            raise DimensionError(f"custom profile has {J.size} entries, graph has {M} nodes")
        if np.any(J < 0) or not np.all(np.isfinite(J)):
            raise ValueError("custom profile entries must be finite and nonnegative")
        return J, profile
    if isinstance(profile, BandProfile):
        if profile.weight < 0:
            raise ValueError("band profile weight must be nonnegative")
        keep = np.asarray(profile.keep, dtype=int)
        if keep.size and (keep.min() < 0 or keep.max() >= M):
            raise IndexError(f"band indices {profile.keep} out of range for {M} nodes")
        J = np.full(M, profile.weight)
        J[keep] = 0.0
        return J, profile
    raise TypeError(f"unsupported penalty profile {profile!r}")


def make_penalty(spectrum, profile):
    """Build the spectral penalty for ``profile`` on the given graph spectrum."""
    J, profile = _profile_diag(spectrum, profile)
    V = spectrum.basis
    G = (V * J**2) @ V.T
    G = 0.5 * (G + G.T)
    return SpectralPenalty(
        profile_diag=_frozen(J), penalty_matrix=_frozen(G), basis=V, profile=profile
    )


def penalty_from_matrix(G):
    """Spectral penalty for an arbitrary symmetric PSD quadratic form ``G``."""
    spec = eigendecompose(G)
    J = np.sqrt(spec.eigenvalues)
    return SpectralPenalty(
        profile_diag=_frozen(J),
        penalty_matrix=_frozen(0.5 * (np.asarray(G) + np.asarray(G).T)),
        basis=spec.basis,
    )


@dataclass(frozen=True, eq=False)
class SmoothingOperator:
    """``B = (I + alpha G)^{-1}`` together with its eigenstructure.

    ``gains`` holds the eigenvalues ``1 / (1 + alpha J**2)`` of ``B`` in the
    order of the columns of ``basis``.
    """

    alpha: float
    basis: np.ndarray
    gains: np.ndarray
    b_matrix: np.ndarray
    b_squared: np.ndarray

    @property
    def num_nodes(self):
        return self.gains.shape[0]


def make_smoothing_operator(penalty, alpha):
    """Form ``B = (I + alpha G)^{-1}`` from the penalty's eigenpairs."""
    alpha = float(alpha)
    if not alpha >= 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    V = penalty.basis
    M = V.shape[0]
    if alpha == 0:
        eye = np.eye(M)
        return SmoothingOperator(0.0, V, _frozen(np.ones(M)), _frozen(eye), _frozen(eye))
    gains = 1.0 / (1.0 + alpha * penalty.profile_diag**2)
    B = (V * gains) @ V.T
    B2 = (V * gains**2) @ V.T
    return SmoothingOperator(
        alpha,
        V,
        _frozen(gains),
        _frozen(0.5 * (B + B.T)),
        _frozen(0.5 * (B2 + B2.T)),
    )


def generative_project(op, y):
    """Closest signal to ``y`` with the operator's spectral profile, ``B y``."""
    y = np.asarray(y, dtype=float)
    if y.shape[:1] != (op.num_nodes,):
        raise DimensionError(f"signal shape {y.shape} does not match {op.num_nodes} nodes")
    return op.b_matrix @ y


def directed_smoothing_operator(adjacency, alpha):
    """Smoothing operator for a directed graph.

    The adjacency is divided by its spectral radius, and the penalty
    ``(I - A)^T (I - A)`` measures the distance between a signal and its
    one-step graph shift.
    """
    return make_smoothing_operator(directed_penalty(adjacency), alpha)


def directed_penalty(adjacency):
    """Spectral penalty ``(I - A)^T (I - A)`` with ``A`` scaled to unit spectral radius."""
    A = np.asarray(adjacency, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise GraphError(f"adjacency must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise GraphError("adjacency has non-finite entries")
    radius = float(np.max(np.abs(np.linalg.eigvals(A))))
    if radius <= 1e-12 * max(np.max(np.abs(A)), 1e-300):
        raise GraphError("cannot normalise adjacency with zero spectral radius")
    R = np.eye(A.shape[0]) - A / radius
    return penalty_from_matrix(R.T @ R)


def check_vec_kronecker_identity(Phi, W, B):
    """Check ``vec(Phi W B) == (B^T kron Phi) vec(W)`` with column-major ``vec``.

    For the symmetric ``B`` used by the model, ``B^T kron Phi == B kron Phi``.
    """
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if Phi.shape[1] != W.shape[0] or W.shape[1] != B.shape[0] or B.shape[0] != B.shape[1]:
        raise DimensionError(
            f"incompatible shapes Phi{Phi.shape}, W{W.shape}, B{B.shape}"
        )
    lhs = (Phi @ W @ B).ravel(order="F")
    rhs = np.kron(B.T, Phi) @ W.ravel(order="F")
    return bool(np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs))


def load_adjacency(path):
    """Read an ``M x M`` adjacency CSV and validate it as an undirected graph."""
    return Graph(_csv.read_matrix(path, name="adjacency"))


def save_adjacency(path, graph):
    _csv.write_matrix(path, graph.adjacency)
