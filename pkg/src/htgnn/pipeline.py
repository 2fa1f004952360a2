"""Experiment orchestration: data, both graphs, three model variants.

One repeat builds the lending edge set (from the loan-matrix solver) and
the persistence edge set (from the filtration pipeline) for quarters t
and t+1, trains a model per variant on quarter t, predicts quarter t+1
with frozen weights, and scores the predictions. ``run_experiment``
sweeps all three variants over ``n_repeats`` seeds, aggregates means,
runs pairwise paired t-tests on per-repeat accuracy, and writes every
intermediate artifact plus a deterministic report.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fileio
from .data_model import QuarterSnapshot, SyntheticConfig, gen_synthetic, load_quarter_csv, scale_features
from .distance import cosine_distance_matrix
from .filtration import PhConfig, build_rips_filtration
from .gcn import TrainConfig, build_hetero_graph, forward, predict, save_model, train
from .mdm import MdmConfig, infer_loan_matrix, loan_matrix_to_edges
from .metrics import ZeroVarianceError, classification_metrics, homophily_ratio, paired_t_test
from .persistence_graph import extract_edges
from .reduction import filter_persistent, reduce_boundary_matrix

logger = logging.getLogger(__name__)

VARIANTS = ("lqm", "ph", "htgnn")

# Above this node count the 2-homology pass (4-point simplices, O(N^4))
# is out of desk-scale reach; the pipeline drops to 1-homology loudly.
AUTO_H2_NODE_LIMIT = 300

_CONFIG_KEYS = (
    "r0",
    "r_max",
    "tau",
    "alpha_q",
    "alpha_p",
    "learning_rate",
    "epochs",
    "weight_decay",
    "dropout_rate",
    "hidden_dim",
    "n_layers",
    "seed",
    "n_repeats",
    "max_homology_dim",
    "feature_scaling",
    "model_variant",
    "sample_size",
)


@dataclass
class ExperimentConfig:
    """Everything one experiment needs, mirroring the config JSON keys."""

    synthetic: SyntheticConfig | None = None
    quarter_csvs: tuple[str, str] | None = None
    r0: float = 0.0
    r_max: float = 0.7
    tau: float = 0.05
    alpha_q: float = 0.1
    alpha_p: float = 0.9
    learning_rate: float = 0.01
    epochs: int = 1000
    weight_decay: float = 5e-4
    dropout_rate: float = 0.5
    hidden_dim: int = 64
    n_layers: int = 2
    seed: int = 0
    n_repeats: int = 10
    max_homology_dim: int = 2
    feature_scaling: str = "min_max"
    model_variant: str = "htgnn"
    sample_size: int | None = None
    output_dir: str | None = None

    def __post_init__(self) -> None:
        if (self.synthetic is None) == (self.quarter_csvs is None):
            raise ValueError("exactly one of 'synthetic' and 'quarter_csvs' must be set")
        if self.quarter_csvs is not None and len(self.quarter_csvs) != 2:
            raise ValueError("quarter_csvs must list exactly two paths (t, t+1)")
        if abs(self.alpha_q + self.alpha_p - 1.0) > 1e-9 or min(self.alpha_q, self.alpha_p) < 0:
            raise ValueError("alpha_q and alpha_p must be nonnegative and sum to 1")
        if self.n_repeats < 1:
            raise ValueError("n_repeats must be >= 1")
        if self.model_variant not in VARIANTS:
            raise ValueError(f"model_variant must be one of {VARIANTS}")
        if self.feature_scaling not in ("none", "min_max"):
            raise ValueError("feature_scaling must be 'none' or 'min_max'")
        if self.sample_size is not None and self.sample_size < 1:
            raise ValueError("sample_size must be positive when set")
        # Delegate range checks to the component configs.
        self.ph_config(1)
        self.train_config(self.seed)

    def ph_config(self, n_nodes: int) -> PhConfig:
        dim = self.max_homology_dim
        if n_nodes > AUTO_H2_NODE_LIMIT and dim > 1:
            logger.warning(
                "lowering max_homology_dim from %d to 1 for N=%d nodes "
                "(2-homology needs O(N^4) simplices)",
                dim,
                n_nodes,
            )
            dim = 1
        return PhConfig(r0=self.r0, r_max=self.r_max, tau=self.tau, max_homology_dim=dim)

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            weight_decay=self.weight_decay,
            dropout_rate=self.dropout_rate,
            hidden_dim=self.hidden_dim,
            n_layers=self.n_layers,
            seed=seed,
        )

    def to_dict(self) -> dict:
        payload = {key: getattr(self, key) for key in _CONFIG_KEYS}
        if self.synthetic is not None:
            payload["synthetic"] = dataclasses.asdict(self.synthetic)
        if self.quarter_csvs is not None:
            payload["quarter_csvs"] = list(self.quarter_csvs)
        return payload


def config_from_dict(payload: dict, output_dir: str | None = None) -> ExperimentConfig:
    known = set(_CONFIG_KEYS) | {"synthetic", "quarter_csvs", "output_dir"}
    unknown = set(payload) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {key: payload[key] for key in _CONFIG_KEYS if key in payload}
    if "synthetic" in payload and payload["synthetic"] is not None:
        kwargs["synthetic"] = SyntheticConfig(**payload["synthetic"])
    if "quarter_csvs" in payload and payload["quarter_csvs"] is not None:
        kwargs["quarter_csvs"] = tuple(payload["quarter_csvs"])
    kwargs["output_dir"] = output_dir if output_dir is not None else payload.get("output_dir")
    return ExperimentConfig(**kwargs)


def load_experiment_config(
    path: str | Path, seed: int | None = None, output_dir: str | None = None
) -> ExperimentConfig:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    config = config_from_dict(payload, output_dir=output_dir)
    if seed is not None:
        config.seed = seed
        if config.synthetic is not None:
            config.synthetic = dataclasses.replace(config.synthetic, seed=seed)
    return config


@dataclass
class RepeatData:
    """One repeat's prepared inputs: sampled snapshots plus scaled features."""

    snap_t: QuarterSnapshot
    snap_t1: QuarterSnapshot
    x_t: np.ndarray
    x_t1: np.ndarray


def _prepare_repeat(config: ExperimentConfig, seed: int) -> RepeatData:
    if config.synthetic is not None:
        snap_t, snap_t1 = gen_synthetic(dataclasses.replace(config.synthetic, seed=seed))
    else:
        snap_t = load_quarter_csv(config.quarter_csvs[0])
        snap_t1 = load_quarter_csv(config.quarter_csvs[1])
        if snap_t.bank_ids != snap_t1.bank_ids:
            raise ValueError("quarter CSVs must cover the same banks in the same order")
    if config.sample_size is not None and config.sample_size < snap_t.n_banks:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(snap_t.n_banks, size=config.sample_size, replace=False))
        snap_t = snap_t.subset(idx)
        snap_t1 = snap_t1.subset(idx)
    x_t = scale_features(snap_t.features, config.feature_scaling)
    x_t1 = scale_features(snap_t1.features, config.feature_scaling)
    return RepeatData(snap_t, snap_t1, x_t, x_t1)


def build_lending_edges(snap: QuarterSnapshot) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Loan matrix and its undirected edge set for one quarter."""
    z = infer_loan_matrix(snap.interbank_assets, snap.interbank_liabilities, MdmConfig())
    edges, weights = loan_matrix_to_edges(z)
    return edges, weights, z


def build_persistence_edges(x_scaled: np.ndarray, config: ExperimentConfig):
    """Distance matrix, diagram, and persistence edge set for one quarter."""
    d = cosine_distance_matrix(x_scaled)
    ph = config.ph_config(x_scaled.shape[0])
    filtration = build_rips_filtration(d, ph)
    pairs = reduce_boundary_matrix(filtration)
    persistent = filter_persistent(pairs, ph)
    edges, weights = extract_edges(persistent, d, ph)
    return d, pairs, edges, weights


_EMPTY_EDGES = np.empty((0, 2), np.int64)


def _variant_alphas(config: ExperimentConfig, variant: str) -> tuple[float, float]:
    if variant == "lqm":
        return 1.0, 0.0
    if variant == "ph":
        return 0.0, 1.0
    return config.alpha_q, config.alpha_p


def _train_and_score(
    data: RepeatData,
    eq_t: np.ndarray,
    ep_t: np.ndarray,
    eq_t1: np.ndarray,
    ep_t1: np.ndarray,
    alphas: tuple[float, float],
    train_cfg: TrainConfig,
):
    graph_t = build_hetero_graph(data.x_t, eq_t, ep_t, data.snap_t.ratings)
    model = train(graph_t, train_cfg, alpha_q=alphas[0], alpha_p=alphas[1])
    graph_t1 = build_hetero_graph(data.x_t1, eq_t1, ep_t1)
    predictions = predict(model, graph_t1)
    scores = classification_metrics(data.snap_t1.ratings, predictions)
    return model, graph_t1, predictions, scores


def _safe_homophily(edges: np.ndarray, labels: np.ndarray) -> float | None:
    if edges.shape[0] == 0:
        return None
    return homophily_ratio(edges, labels)


def run_variant(config: ExperimentConfig, variant: str, seed: int) -> dict:
    """One seeded end-to-end run of a single model variant.

    Builds only the edge sets the variant uses, trains on quarter t,
    predicts quarter t+1, and returns fraction-valued classification
    metrics plus the homophily of each built edge set (None when the
    set was not built or is empty).
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    data = _prepare_repeat(config, seed)
    need_q = variant in ("lqm", "htgnn")
    need_p = variant in ("ph", "htgnn")
    eq_t = eq_t1 = ep_t = ep_t1 = _EMPTY_EDGES
    if need_q:
        eq_t, _, _ = build_lending_edges(data.snap_t)
        eq_t1, _, _ = build_lending_edges(data.snap_t1)
    if need_p:
        _, _, ep_t, _ = build_persistence_edges(data.x_t, config)
        _, _, ep_t1, _ = build_persistence_edges(data.x_t1, config)
    _, _, _, scores = _train_and_score(
        data, eq_t, ep_t, eq_t1, ep_t1, _variant_alphas(config, variant),
        config.train_config(seed),
    )
    scores["homophily_q"] = _safe_homophily(eq_t, data.snap_t.ratings) if need_q else None
    scores["homophily_p"] = _safe_homophily(ep_t, data.snap_t.ratings) if need_p else None
    return scores


def _metrics_percent(scores: dict) -> dict:
    return {
        "accuracy": 100.0 * scores["accuracy"],
        "f1": 100.0 * scores["macro_f1"],
        "precision": 100.0 * scores["macro_precision"],
        "recall": 100.0 * scores["macro_recall"],
    }


def _pairwise_t_tests(accuracies: dict[str, list[float]], n_repeats: int) -> dict:
    if n_repeats < 2:
        return {"omitted_reason": "paired t-tests need n_repeats >= 2"}
    tests: dict[str, dict] = {}
    for left, right in (("lqm", "ph"), ("lqm", "htgnn"), ("ph", "htgnn")):
        key = f"{left}_vs_{right}"
        try:
            result = paired_t_test(np.array(accuracies[left]), np.array(accuracies[right]))
            tests[key] = {
                "t_statistic": result.t_statistic,
                "p_value": result.p_value,
                "dof": result.dof,
            }
        except ZeroVarianceError:
            tests[key] = {"error": "zero variance in paired differences"}
    return tests


def run_experiment(config: ExperimentConfig) -> dict:
    """All three variants x n_repeats, with artifacts and a report JSON.

    Repeat k is seeded with ``seed + k`` for data sampling, weight
    initialisation, and dropout jointly. Edge sets are built once per
    repeat and shared across variants (per-variant training only differs
    in the mixing coefficients and which edge sets the graph carries).
    Partial outputs are removed if any repeat fails.
    """
    if config.output_dir is None:
        raise ValueError("run_experiment requires output_dir")
    out_root = Path(config.output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []

    def _track(path: Path) -> Path:
        created.append(path)
        return path

    started = time.perf_counter()
    repeats: list[dict] = []
    accuracies: dict[str, list[float]] = {v: [] for v in VARIANTS}
    metric_rows: dict[str, list[dict]] = {v: [] for v in VARIANTS}
    timings: dict[str, float] = {}
    try:
        for k in range(config.n_repeats):
            seed = config.seed + k
            repeat_started = time.perf_counter()
            repeat_dir = out_root / f"repeat_{k:03d}"
            repeat_dir.mkdir(parents=True, exist_ok=True)
            _track(repeat_dir)

            data = _prepare_repeat(config, seed)
            eq_t, wq_t, _ = build_lending_edges(data.snap_t)
            eq_t1, wq_t1, _ = build_lending_edges(data.snap_t1)
            d_t, pairs_t, ep_t, wp_t = build_persistence_edges(data.x_t, config)
            d_t1, pairs_t1, ep_t1, wp_t1 = build_persistence_edges(data.x_t1, config)

            fileio.write_dense_matrix_csv(_track(repeat_dir / "distances_t.csv"), d_t)
            fileio.write_dense_matrix_csv(_track(repeat_dir / "distances_t1.csv"), d_t1)
            fileio.write_diagram_csv(_track(repeat_dir / "diagram_t.csv"), pairs_t)
            fileio.write_diagram_csv(_track(repeat_dir / "diagram_t1.csv"), pairs_t1)
            fileio.write_edges_csv(_track(repeat_dir / "edges_q_t.csv"), eq_t, wq_t, "q")
            fileio.write_edges_csv(_track(repeat_dir / "edges_q_t1.csv"), eq_t1, wq_t1, "q")
            fileio.write_edges_csv(_track(repeat_dir / "edges_p_t.csv"), ep_t, wp_t, "p")
            fileio.write_edges_csv(_track(repeat_dir / "edges_p_t1.csv"), ep_t1, wp_t1, "p")

            entry: dict = {
                "seed": seed,
                "homophily_q": _safe_homophily(eq_t, data.snap_t.ratings),
                "homophily_p": _safe_homophily(ep_t, data.snap_t.ratings),
                "metrics": {},
            }
            for variant in VARIANTS:
                use_q = variant in ("lqm", "htgnn")
                use_p = variant in ("ph", "htgnn")
                model, graph_t1, predictions, scores = _train_and_score(
                    data,
                    eq_t if use_q else _EMPTY_EDGES,
                    ep_t if use_p else _EMPTY_EDGES,
                    eq_t1 if use_q else _EMPTY_EDGES,
                    ep_t1 if use_p else _EMPTY_EDGES,
                    _variant_alphas(config, variant),
                    config.train_config(seed),
                )
                save_model(model, _track(repeat_dir / f"model_{variant}.npz"))
                _, _, probs = forward(model, graph_t1)
                fileio.write_predictions_csv(
                    _track(repeat_dir / f"predictions_{variant}.csv"),
                    data.snap_t1.bank_ids,
                    predictions,
                    probs,
                )
                entry["metrics"][variant] = _metrics_percent(scores)
                accuracies[variant].append(scores["accuracy"])
                metric_rows[variant].append(_metrics_percent(scores))
            repeats.append(entry)
            timings[f"repeat_{k:03d}_seconds"] = time.perf_counter() - repeat_started
            logger.info("repeat %d/%d done", k + 1, config.n_repeats)

        means = {
            variant: {
                key: sum(row[key] for row in rows) / len(rows)
                for key in ("accuracy", "f1", "precision", "recall")
            }
            for variant, rows in metric_rows.items()
        }
        hom_q = [r["homophily_q"] for r in repeats if r["homophily_q"] is not None]
        hom_p = [r["homophily_p"] for r in repeats if r["homophily_p"] is not None]
        quarter_t, quarter_t1 = _quarter_ids(config)
        report = {
            "config": config.to_dict(),
            "quarters": {"t": quarter_t, "t_plus_1": quarter_t1},
            "repeats": repeats,
            "means": means,
            "mean_homophily": {
                "q": sum(hom_q) / len(hom_q) if hom_q else None,
                "p": sum(hom_p) / len(hom_p) if hom_p else None,
            },
            "t_tests": _pairwise_t_tests(accuracies, config.n_repeats),
            "timings": timings,
        }
        report["timings"]["total_seconds"] = time.perf_counter() - started
        fileio.atomic_write_json(_track(out_root / "report.json"), report)
        return report
    except Exception:
        for path in reversed(created):
            if path.is_file():
                path.unlink(missing_ok=True)
        for path in reversed(created):
            if path.is_dir():
                try:
                    path.rmdir()
                except OSError:
                    pass
        raise


def _quarter_ids(config: ExperimentConfig) -> tuple[str, str]:
    if config.synthetic is not None:
        return "Q1", "Q2"
    return tuple(Path(p).stem for p in config.quarter_csvs)
