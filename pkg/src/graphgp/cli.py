"""
Command line front end: ``graphgp {fit,predict,bench,synth}``.

Machine-readable output goes to files or standard output as JSON / headerless
CSV; diagnostics go to standard error. Relative output paths are resolved
against ``$GRAPHGP_OUTPUT_DIR`` when it is set.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import _csv
from .bench import METHODS, BenchmarkSpec, run_benchmark
from .data import (
    Dataset,
    add_noise_snr,
    load_dataset,
    random_geodesic_graph,
    save_dataset,
    synth_smooth_dataset,
)
from .exceptions import DataError, DecompositionError, DimensionError, GraphError, OracleCapError
from .graph import (
    CustomProfile,
    Graph,
    directed_penalty,
    make_penalty,
    make_smoothing_operator,
    parse_profile,
    save_adjacency,
)
from .kernels import KernelSpec, rbf_bandwidth_heuristic
from .model import conventional_marginal_trace, fit_operator, marginal_trace, predict
from .selection import DEFAULT_ALPHA_GRID, DEFAULT_GAMMA_GRID, CvConfig, grid_search_cv
from .serialize import load_model, save_model

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4
OUTPUT_DIR_ENV = "GRAPHGP_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _out_path(path, default):
    path = path or default
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _log(msg):
    print(msg, file=sys.stderr)


def _load_profile(text):
    if text.startswith("custom:") and os.path.exists(text[len("custom:"):]):
        return CustomProfile(_csv.read_matrix(text[len("custom:"):], name="profile").ravel())
    try:
        return parse_profile(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cv_config(args):
    return CvConfig(
        folds=args.folds,
        alpha_grid=args.alpha_grid or DEFAULT_ALPHA_GRID,
        gamma_grid=args.gamma_grid or DEFAULT_GAMMA_GRID,
        seed=args.seed,
    )


def _add_cv_flags(p):
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--alpha-grid", type=_floats, default=None, help="comma-separated alpha values")
    p.add_argument("--gamma-grid", type=_floats, default=None, help="comma-separated gamma values")
    p.add_argument("--seed", type=int, default=0)


# -- fit -----------------------------------------------------------------------


def cmd_fit(args):
    ds = load_dataset(args.inputs, args.targets)
    adjacency = _csv.read_matrix(args.graph, name="adjacency")
    X = ds.inputs
    scaling = None
    if args.standardize:
        mean, scale = X.mean(axis=0), X.std(axis=0)
        scale[scale == 0] = 1.0
        X = (X - mean) / scale
        scaling = {"mean": mean.tolist(), "scale": scale.tolist()}

    if args.directed:
        penalty = directed_penalty(adjacency)
    else:
        graph = Graph(adjacency)
        penalty = make_penalty(graph.spectrum, _load_profile(args.profile))
    if ds.num_nodes != penalty.basis.shape[0]:
        raise DimensionError(f"targets have {ds.num_nodes} columns, graph has {penalty.basis.shape[0]} nodes")

    bandwidth = args.bandwidth
    if args.kernel == "rbf" and bandwidth is None:
        bandwidth = rbf_bandwidth_heuristic(X)

    report = None
    if args.cv:
        report = grid_search_cv(X, ds.targets, None, penalty, args.kernel, args.beta, _cv_config(args), bandwidth)
        alpha, gamma = report.best_alpha, report.best_gamma
    else:
        if args.alpha is None:
            raise UsageError("--alpha is required unless --cv is given")
        alpha, gamma = args.alpha, args.gamma

    kernel = KernelSpec(args.kernel, gamma, bandwidth)
    model = fit_operator(X, ds.targets, make_smoothing_operator(penalty, alpha), kernel, args.beta, penalty)
    out = _out_path(args.out, "model.json")
    save_model(out, model, adjacency, directed=args.directed, extra={"input_scaling": scaling})

    summary = {
        "model": out,
        "M": model.num_nodes,
        "N": model.num_inputs,
        "alpha": alpha,
        "gamma": gamma,
        "beta": model.beta,
        "kernel": args.kernel,
        "sigma2": bandwidth,
        "trace_gpg": marginal_trace(model),
        "trace_conventional": conventional_marginal_trace(model),
        "cv": report.to_dict() if report is not None else None,
    }
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


# -- predict -------------------------------------------------------------------


def cmd_predict(args):
    model, _, extra = load_model(args.model)
    Xq = _csv.read_matrix(args.query, name="query")
    if Xq.shape[1] != model.inputs.shape[1]:
        raise DimensionError(
            f"query has {Xq.shape[1]} columns, model inputs have {model.inputs.shape[1]}"
        )
    scaling = extra.get("input_scaling")
    if scaling:
        Xq = (Xq - np.array(scaling["mean"])) / np.array(scaling["scale"])
    dists = [predict(model, x) for x in Xq]
    rows = np.array([d.mean for d in dists])
    if args.with_variance:
        rows = np.hstack([rows, np.array([d.variance for d in dists])])
    _csv.write_matrix(_out_path(args.out, "predictions.csv"), rows)
    if args.full_cov:
        _csv.write_matrix(
            _out_path(args.full_cov, "covariances.csv"),
            np.array([d.covariance.ravel() for d in dists]),
        )
    _log(f"wrote {len(dists)} predictions")
    return 0


# -- bench ---------------------------------------------------------------------


def _synth_from_args(args, prefix):
    g = random_geodesic_graph(getattr(args, f"{prefix}nodes"), getattr(args, f"{prefix}seed"))
    ds = synth_smooth_dataset(
        g,
        "laplacian",
        getattr(args, f"{prefix}alpha"),
        getattr(args, f"{prefix}samples"),
        getattr(args, f"{prefix}input_dim"),
        getattr(args, f"{prefix}seed") + 1,
        mode=getattr(args, f"{prefix}mode"),
    )
    return g, ds


def cmd_bench(args):
    if args.synth:
        graph, ds = _synth_from_args(args, "synth_")
    else:
        if not (args.inputs and args.targets and args.graph):
            raise UsageError("bench needs --inputs, --targets and --graph, or --synth")
        ds = load_dataset(args.inputs, args.targets, args.clean_targets)
        graph = Graph(_csv.read_matrix(args.graph, name="adjacency"))
        if ds.num_nodes != graph.num_nodes:
            raise DimensionError(f"targets have {ds.num_nodes} columns, graph has {graph.num_nodes} nodes")
    if args.standardize:
        X = ds.inputs
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        ds = Dataset((X - X.mean(axis=0)) / scale, ds.targets, ds.clean_targets, ds.meta)

    spec = BenchmarkSpec(
        methods=args.methods,
        train_sizes=args.train_sizes,
        snr_db=args.snr_db,
        trials=args.trials,
        seed=args.seed,
        cv=CvConfig(
            folds=args.folds,
            alpha_grid=args.alpha_grid or DEFAULT_ALPHA_GRID,
            gamma_grid=args.gamma_grid or DEFAULT_GAMMA_GRID,
            seed=args.seed,
        ),
        train_frac=args.train_frac,
        cv_once=args.cv_once,
    )
    result = run_benchmark(ds, graph, spec, _load_profile(args.profile),
                           progress=lambda t, n: _log(f"trial {t}/{n}"))
    with open(_out_path(args.out, "bench.json"), "w") as fh:
        fh.write(result.to_json())
    if args.csv:
        result.write_csv(_out_path(args.csv, "bench.csv"))
    return 0


# -- synth ---------------------------------------------------------------------


def cmd_synth(args):
    graph, ds = _synth_from_args(args, "")
    out_dir = _out_path(args.out_dir, "synth")
    os.makedirs(out_dir, exist_ok=True)
    targets = ds.clean_targets
    meta = dict(ds.meta, graph_seed=args.seed, nodes=args.nodes, snr_db=args.snr_db)
    if args.snr_db is not None:
        targets, beta = add_noise_snr(ds.clean_targets, args.snr_db, args.seed + 2)
        meta["beta"] = beta
    ds = Dataset(ds.inputs, targets, ds.clean_targets, meta)
    save_dataset(
        ds,
        os.path.join(out_dir, "inputs.csv"),
        os.path.join(out_dir, "targets.csv"),
        os.path.join(out_dir, "clean_targets.csv"),
    )
    save_adjacency(os.path.join(out_dir, "adjacency.csv"), graph)
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not meta["smooth"]:
        _log("warning: generated targets are not smoother than their latents")
    _log(f"wrote dataset to {out_dir}")
    return 0


# -- parser --------------------------------------------------------------------


def _add_synth_flags(p, prefix=""):
    dest = prefix.replace("-", "_")
    p.add_argument(f"--{prefix}nodes", dest=f"{dest}nodes", type=int, default=40)
    p.add_argument(f"--{prefix}alpha", f"--{prefix}alpha-gen", dest=f"{dest}alpha", type=float, default=10.0)
    p.add_argument(f"--{prefix}samples", dest=f"{dest}samples", type=int, default=80)
    p.add_argument(f"--{prefix}input-dim", dest=f"{dest}input_dim", type=int, default=3)
    p.add_argument(f"--{prefix}seed", dest=f"{dest}seed", type=int, default=0)
    p.add_argument(f"--{prefix}mode", dest=f"{dest}mode", choices=("linear", "lagged"), default="linear")


def build_parser():
    parser = argparse.ArgumentParser(prog="graphgp", description="GP regression for vector targets on graph nodes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model and write it to a file")
    p.add_argument("--inputs", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--graph", required=True, help="adjacency CSV")
    p.add_argument("--directed", action="store_true", help="treat the adjacency as directed")
    p.add_argument("--kernel", choices=("linear", "rbf"), default="rbf")
    p.add_argument("--profile", default="laplacian",
                   help="laplacian | band:I,J,...:W | custom:v1,v2,... | custom:PATH")
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--bandwidth", type=float, help="RBF bandwidth (default: heuristic)")
    p.add_argument("--cv", action="store_true", help="choose alpha and gamma by cross-validation")
    p.add_argument("--standardize", action="store_true", help="standardise input features")
    _add_cv_flags(p)
    p.add_argument("--out", help="model file (default model.json)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="predict at query inputs")
    p.add_argument("--model", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--out", help="predictions CSV (default predictions.csv)")
    p.add_argument("--with-variance", action="store_true")
    p.add_argument("--full-cov", metavar="PATH", help="also write flattened M x M covariances")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="Monte-Carlo NMSE comparison of GP and GPG")
    p.add_argument("--inputs")
    p.add_argument("--targets")
    p.add_argument("--clean-targets")
    p.add_argument("--graph")
    p.add_argument("--synth", action="store_true", help="use a generated dataset")
    _add_synth_flags(p, "synth-")
    p.add_argument("--profile", default="laplacian")
    p.add_argument("--methods", type=lambda s: s.split(","), default=list(METHODS))
    p.add_argument("--train-sizes", type=_ints, default=[5, 10, 20])
    p.add_argument("--snr-db", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--train-frac", type=float, default=0.5)
    p.add_argument("--cv-once", action="store_true", help="tune once on the first trial")
    p.add_argument("--standardize", action="store_true")
    _add_cv_flags(p)
    p.add_argument("--out", help="results JSON (default bench.json)")
    p.add_argument("--csv", help="also write results as headerless CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="generate a synthetic graph dataset")
    _add_synth_flags(p)
    p.add_argument("--snr-db", type=float, help="add noise to the written targets")
    p.add_argument("--out-dir", help="output directory (default synth)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DecompositionError, OracleCapError, np.linalg.LinAlgError, ArithmeticError) as exc:
        _log(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    except (DataError, GraphError, DimensionError, OSError, KeyError) as exc:
        _log(f"error: {exc}")
        return EXIT_DATA
    except (UsageError, ValueError, IndexError) as exc:
        _log(f"usage error: {exc}")
        return EXIT_USAGE

if __name__ == "__main__":
    sys.exit(main())
