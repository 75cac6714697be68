"""
Model files.

A model file is JSON holding everything needed to refit deterministically:
training inputs and targets, the adjacency matrix, the penalty profile,
``alpha``, ``beta`` and the kernel. Spectral factors are recomputed on load.
Floats are written with ``repr`` precision, so arrays round-trip exactly.
"""

import json

import numpy as np

from .exceptions import DataError
from .graph import Graph, directed_smoothing_operator, profile_from_dict
from .kernels import KernelSpec
from .model import fit, fit_operator

FORMAT = "graphgp.model"
VERSION = 1


def model_to_dict(model, adjacency, directed=False, extra=None):
    if not directed and (model.penalty is None or model.penalty.profile is None):
        raise ValueError("undirected model has no penalty profile to serialise")
    return {
        "format": FORMAT,
        "version": VERSION,
        "inputs": model.inputs.tolist(),
        "targets": model.targets.tolist(),
        "adjacency": np.asarray(adjacency, dtype=float).tolist(),
        "directed": bool(directed),
        "profile": None if directed else model.penalty.profile.to_dict(),
        "alpha": model.alpha,
        "beta": model.beta,
        "kernel": model.kernel.to_dict(),
        "extra": extra or {},
    }


def model_from_dict(d):
    """Refit a model from its description. Returns ``(model, graph, extra)``.

    ``graph`` is ``None`` for directed models.
    """
    if d.get("format") != FORMAT:
        raise DataError(f"not a graphgp model file (format={d.get('format')!r})")
    if d.get("version") != VERSION:
        raise DataError(f"unsupported model file version {d.get('version')!r}")
    X = np.array(d["inputs"], dtype=float)
    T = np.array(d["targets"], dtype=float)
    kernel = KernelSpec.from_dict(d["kernel"])
    if d["directed"]:
        op = directed_smoothing_operator(d["adjacency"], d["alpha"])
        return fit_operator(X, T, op, kernel, d["beta"]), None, d.get("extra", {})
    graph = Graph(np.array(d["adjacency"], dtype=float))
    profile = profile_from_dict(d["profile"])
    model = fit(X, T, graph.spectrum, profile, kernel, d["alpha"], d["beta"])
    return model, graph, d.get("extra", {})


def save_model(path, model, adjacency, directed=False, extra=None):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model, adjacency, directed, extra), fh)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON: {exc}") from None
    return model_from_dict(d)
