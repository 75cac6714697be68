import numpy as np
import pytest

from graphgp.graph import Graph


def random_adjacency(rng, M, p=0.4, connected=True):
    """Random weighted undirected adjacency; a random spanning path guarantees connectivity."""
    A = np.where(rng.random((M, M)) < p, rng.uniform(0.1, 2.0, (M, M)), 0.0)
    A = np.triu(A, 1)
    if connected:
        order = rng.permutation(M)
        for a, b in zip(order[:-1], order[1:]):
            A[min(a, b), max(a, b)] = rng.uniform(0.1, 2.0)
    return A + A.T


def random_disconnected_adjacency(rng, M):
    """Two or more components (or no edges at all for M < 4)."""
    if M < 4:
        return np.zeros((M, M))
    cut = rng.integers(1, M - 1)
    A = np.zeros((M, M))
    A[:cut, :cut] = random_adjacency(rng, cut)
    A[cut:, cut:] = random_adjacency(rng, M - cut)
    return A


def union_find_components(A):
    parent = list(range(A.shape[0]))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(A.shape[0]):
        for j in range(i + 1, A.shape[0]):
            if A[i, j] != 0:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(A.shape[0])})


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.linalg.norm(b), 1e-300)
    return np.linalg.norm(a - b) / scale


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def path2():
    return Graph(np.array([[0.0, 1.0], [1.0, 0.0]]))


@pytest.fixture
def k4():
    return Graph(np.ones((4, 4)) - np.eye(4))


def random_instance(rng, M, N, family, alpha, connected=True, beta=None, d=2):
    """Random (graph, X, T, kernel, alpha, beta, x_new) tuple for model tests."""
    from graphgp.kernels import KernelSpec

    if connected:
        A = random_adjacency(rng, M)
    else:
        A = random_disconnected_adjacency(rng, M)
    X = rng.normal(size=(N, d))
    T = rng.normal(size=(N, M))
    gamma = float(rng.uniform(0.3, 3.0))
    bandwidth = float(rng.uniform(0.5, 4.0)) if family == "rbf" else None
    beta = float(rng.uniform(0.5, 20.0)) if beta is None else beta
    return Graph(A), X, T, KernelSpec(family, gamma, bandwidth), alpha, beta, rng.normal(size=d)
