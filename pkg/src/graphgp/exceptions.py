"""Exception hierarchy for graphgp."""


class GraphGPError(Exception):
    """Base class for all errors raised by graphgp."""


class GraphError(GraphGPError, ValueError):
    """Adjacency matrix violates the graph invariants."""


class DimensionError(GraphGPError, ValueError):
    """Array shapes do not agree."""


class DecompositionError(GraphGPError, ArithmeticError):
    """An eigendecomposition or factorization failed."""


class DataError(GraphGPError, ValueError):
    """Malformed or non-finite input data."""


class OracleCapError(GraphGPError, MemoryError):
    """Dense oracle path refused an instance that is too large."""
