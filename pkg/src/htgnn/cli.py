"""Command-line surface over the rating-prediction pipeline.

Every subcommand is a thin wrapper over the library functions; shared
flags (``--config``, ``--seed``, ``--output-dir``, ``--verbose``) are
accepted after any subcommand. Exit codes: 0 success, 1 validation
error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .data_model import QuarterParseError, SyntheticConfig, gen_synthetic, load_quarter_csv, scale_features, write_quarter_csv
from .gcn import build_hetero_graph, forward, load_model, predict, save_model, train
from .mdm import infer_loan_matrix, loan_matrix_to_edges
from .metrics import classification_metrics, homophily_ratio, paired_t_test
from .pipeline import (
    ExperimentConfig,
    build_persistence_edges,
    config_from_dict,
    load_experiment_config,
    run_experiment,
)

logger = logging.getLogger(__name__)


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is None:
        raise ValueError("this subcommand requires --config <json>")
    return load_experiment_config(args.config, seed=args.seed, output_dir=args.output_dir)


def _out_path(args: argparse.Namespace, default_name: str) -> Path:
    if getattr(args, "output", None):
        return Path(args.output)
    out_dir = Path(args.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / default_name


def _read_edges_or_empty(path: str | None) -> np.ndarray:
    if path is None:
        return np.empty((0, 2), np.int64)
    edges, _, _ = fileio.read_edges_csv(path)
    return edges


def cmd_synth(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if config.synthetic is None:
        raise ValueError("config has no 'synthetic' section")
    snap_t, snap_t1 = gen_synthetic(config.synthetic)
    out_dir = Path(args.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    path_t = out_dir / "quarter_t.csv"
    path_t1 = out_dir / "quarter_t1.csv"
    write_quarter_csv(snap_t, path_t)
    write_quarter_csv(snap_t1, path_t1)
    print(f"wrote {path_t} and {path_t1}")
    return 0


def cmd_distances(args: argparse.Namespace) -> int:
    from .distance import cosine_distance_matrix

    config = _maybe_config(args)
    snap = load_quarter_csv(args.input)
    x = scale_features(snap.features, config.feature_scaling)
    d = cosine_distance_matrix(x)
    path = _out_path(args, "distances.csv")
    fileio.write_dense_matrix_csv(path, d)
    print(f"wrote {path}")
    return 0


def cmd_persistence(args: argparse.Namespace) -> int:
    config = _maybe_config(args)
    snap = load_quarter_csv(args.input)
    x = scale_features(snap.features, config.feature_scaling)
    _, pairs, _, _ = build_persistence_edges(x, config)
    path = _out_path(args, "diagram.csv")
    fileio.write_diagram_csv(path, pairs)
    print(f"wrote {path}")
    return 0


def cmd_mdm(args: argparse.Namespace) -> int:
    snap = load_quarter_csv(args.input)
    z = infer_loan_matrix(snap.interbank_assets, snap.interbank_liabilities)
    edges, weights = loan_matrix_to_edges(z)
    path = _out_path(args, "edges_q.csv")
    fileio.write_edges_csv(path, edges, weights, "q")
    if args.loan_matrix:
        fileio.write_dense_matrix_csv(args.loan_matrix, z)
    print(f"wrote {path} ({edges.shape[0]} edges)")
    return 0


def cmd_ph_graph(args: argparse.Namespace) -> int:
    config = _maybe_config(args)
    snap = load_quarter_csv(args.input)
    x = scale_features(snap.features, config.feature_scaling)
    _, _, edges, weights = build_persistence_edges(x, config)
    path = _out_path(args, "edges_p.csv")
    fileio.write_edges_csv(path, edges, weights, "p")
    print(f"wrote {path} ({edges.shape[0]} edges)")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _maybe_config(args)
    snap = load_quarter_csv(args.input)
    x = scale_features(snap.features, config.feature_scaling)
    edges_q = _read_edges_or_empty(args.edges_q)
    edges_p = _read_edges_or_empty(args.edges_p)
    graph = build_hetero_graph(x, edges_q, edges_p, snap.ratings)
    if config.model_variant == "lqm":
        alphas = (1.0, 0.0)
    elif config.model_variant == "ph":
        alphas = (0.0, 1.0)
    else:
        alphas = (config.alpha_q, config.alpha_p)
    seed = args.seed if args.seed is not None else config.seed
    model = train(graph, config.train_config(seed), alpha_q=alphas[0], alpha_p=alphas[1])
    path = _out_path(args, "model.npz")
    save_model(model, path)
    print(f"wrote {path}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    config = _maybe_config(args)
    snap = load_quarter_csv(args.input)
    x = scale_features(snap.features, config.feature_scaling)
    model = load_model(args.model)
    graph = build_hetero_graph(x, _read_edges_or_empty(args.edges_q), _read_edges_or_empty(args.edges_p))
    predictions = predict(model, graph)
    _, _, probs = forward(model, graph)
    path = _out_path(args, "predictions.csv")
    fileio.write_predictions_csv(path, snap.bank_ids, predictions, probs)
    print(f"wrote {path}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    truth = load_quarter_csv(args.truth)
    banks, predictions, _ = fileio.read_predictions_csv(args.predictions)
    if banks != truth.bank_ids:
        raise ValueError("predictions and truth cover different banks")
    scores = classification_metrics(truth.ratings, predictions)
    report = {
        "accuracy": 100.0 * scores["accuracy"],
        "f1": 100.0 * scores["macro_f1"],
        "precision": 100.0 * scores["macro_precision"],
        "recall": 100.0 * scores["macro_recall"],
        "homophily_q": None,
        "homophily_p": None,
    }
    for key, path in (("homophily_q", args.edges_q), ("homophily_p", args.edges_p)):
        if path is not None:
            edges, _, _ = fileio.read_edges_csv(path)
            report[key] = homophily_ratio(edges, truth.ratings) if edges.shape[0] else None
    text = json.dumps(report, indent=2)
    if args.output:
        fileio.atomic_write_text(args.output, text + "\n")
        print(f"wrote {args.output}")
    else:
        print(text)
    return 0


def cmd_homophily(args: argparse.Namespace) -> int:
    truth = load_quarter_csv(args.truth)
    edges, _, relation = fileio.read_edges_csv(args.edges)
    ratio = homophily_ratio(edges, truth.ratings)
    print(json.dumps({"relation": relation, "homophily": ratio}))
    return 0


def cmd_ttest(args: argparse.Namespace) -> int:
    a = np.loadtxt(args.a, ndmin=1)
    b = np.loadtxt(args.b, ndmin=1)
    result = paired_t_test(a, b)
    report = {"t_statistic": result.t_statistic, "p_value": result.p_value, "dof": result.dof}
    text = json.dumps(report, indent=2)
    if args.output:
        fileio.atomic_write_text(args.output, text + "\n")
        print(f"wrote {args.output}")
    else:
        print(text)
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if config.output_dir is None:
        raise ValueError("pipeline requires --output-dir (or output_dir in the config)")
    report = run_experiment(config)
    print(json.dumps({"report": str(Path(config.output_dir) / "report.json"),
                      "means": report["means"]}, indent=2))
    return 0


def _maybe_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config from --config when given, else defaults (synthetic stub)."""
    if args.config is not None:
        return load_experiment_config(args.config, seed=args.seed, output_dir=args.output_dir)
    stub = config_from_dict({"synthetic": dataclasses.asdict(SyntheticConfig(n_banks=1))},
                            output_dir=args.output_dir)
    if args.seed is not None:
        stub.seed = args.seed
    return stub


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--output-dir", help="directory for outputs")
    common.add_argument("--verbose", action="store_true", help="verbose logging")

    parser = argparse.ArgumentParser(prog="htgnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic quarter pair")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("distances", parents=[common], help="cosine distance matrix CSV")
    p.add_argument("--input", required=True, help="quarter CSV")
    p.add_argument("--output", help="output CSV path")
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("persistence", parents=[common], help="persistence diagram CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_persistence)

    p = sub.add_parser("mdm", parents=[common], help="lending edge set from totals")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--loan-matrix", help="also dump the dense loan matrix CSV")
    p.set_defaults(func=cmd_mdm)

    p = sub.add_parser("ph-graph", parents=[common], help="persistence edge set")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_ph_graph)

    p = sub.add_parser("train", parents=[common], help="train a model on one quarter")
    p.add_argument("--input", required=True, help="labelled quarter CSV")
    p.add_argument("--edges-q", help="lending edge CSV")
    p.add_argument("--edges-p", help="persistence edge CSV")
    p.add_argument("--output")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="predict ratings for a quarter")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--edges-q")
    p.add_argument("--edges-p")
    p.add_argument("--output")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common], help="score predictions against truth")
    p.add_argument("--predictions", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--edges-q")
    p.add_argument("--edges-p")
    p.add_argument("--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("homophily", parents=[common], help="edge-label homophily ratio")
    p.add_argument("--edges", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_homophily)

    p = sub.add_parser("ttest", parents=[common], help="paired t-test of two sample files")
    p.add_argument("--a", required=True, help="file with one number per line")
    p.add_argument("--b", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_ttest)

    p = sub.add_parser("pipeline", parents=[common], help="full three-variant experiment")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, QuarterParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failure boundary
        logger.exception("runtime failure")
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
